use super::report::{Comparison, Criterion, ExperimentReport};
use super::{ecdf_curve, scaled_threshold, Experiment, ExperimentConfig, KS_ONE_SAMPLE_BASE};
use crate::error::Result;
use crate::limits::{extremal_cdf_scaled, limit_spec_for};
use crate::models::norming;
use crate::par::map_replicas;
use crate::rng::replica_rng;
use crate::stats::ks_one_sample;

const SCOPE: &str = "Compares the law of W_n(1) with the extremal limit at the fixed time t = 1. \
Finite-dimensional agreement is implied by, but does not establish, weak M1 convergence of the path.";

/// Largest normalised observation floored at 0, i.e. `W_n(1)`, for each replica.
pub(crate) fn partial_maxima(config: &ExperimentConfig) -> Result<Vec<f64>> {
    let model = config.model()?;
    let a_n = norming(&model, config.n, config.norming)?;
    Ok(map_replicas(config.reps, |rep| {
        let mut rng = replica_rng(config.seed, rep as u64);
        let (mut z, mut x) = (Vec::new(), Vec::new());
        model.sample_into(&mut rng, config.n, &mut z, &mut x);
        x.iter().fold(0.0f64, |m, &v| m.max(v / a_n))
    }))
}

pub(super) fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let model = config.model()?;
    let spec = limit_spec_for(&model)?;
    let scale = config.norming.mark_scale(&model);
    let cdf = |x: f64| if x > 0.0 { extremal_cdf_scaled(&spec, 1.0, x, scale).unwrap_or(0.0) } else { 0.0 };

    let sample = partial_maxima(config)?;
    let ks = ks_one_sample(&sample, cdf);
    let threshold = scaled_threshold(KS_ONE_SAMPLE_BASE, config.reps);

    let mut report = ExperimentReport::new(Experiment::E1, config, SCOPE);
    report.stat("ks_one_sample", ks);
    report.stat("ks_threshold", threshold);
    report.stat("theta", spec.theta);
    report.stat("r", spec.r);
    report.stat("mark_scale", scale);
    report.criterion(Criterion::new("ks_w1_vs_extremal_limit", ks, Comparison::Le, threshold));
    report.curve("ecdf", ecdf_curve(&sample, cdf, 200));
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::run_experiment;

    #[test]
    fn iid_case_matches_frechet_limit() {
        let cfg = ExperimentConfig {
            coefficients: vec![1.0],
            n: 2_000,
            reps: 4_000,
            block_len: 40,
            ..ExperimentConfig::defaults(Experiment::E1)
        };
        let r = run_experiment(Experiment::E1, &cfg).unwrap();
        assert!(r.passed, "{}", r.summary());
    }

    #[test]
    fn single_replica_is_flagged() {
        let cfg = ExperimentConfig { reps: 1, n: 1_000, block_len: 30, ..ExperimentConfig::defaults(Experiment::E1) };
        let r = run_experiment(Experiment::E1, &cfg).unwrap();
        assert!(r.insufficient_sample && !r.passed);
    }

    #[test]
    fn reproducible() {
        let cfg = ExperimentConfig { n: 1_000, reps: 200, block_len: 30, ..ExperimentConfig::defaults(Experiment::E1) };
        let a = run_experiment(Experiment::E1, &cfg).unwrap();
        let b = run_experiment(Experiment::E1, &cfg).unwrap();
        assert_eq!(a.statistics, b.statistics);
    }
}
