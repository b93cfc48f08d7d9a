use super::report::{Comparison, Criterion, ExperimentReport};
use super::{
    ecdf_curve, scaled_threshold, simulate_partial_processes, Experiment, ExperimentConfig, KS_TWO_SAMPLE_BASE,
};
use crate::error::Result;
use crate::limits::{limit_spec_for, simulate_limit_joint, truncation_tail_bound, LimitRun, LimitSamples, MarkLaw};
use crate::models::norming;
use crate::rng::derive_seed;
use crate::stats::{ecdf, hill, ks_two_sample};

/// Series truncation must leave less than this in expected absolute mass.
pub const MAX_TAIL_BOUND: f64 = 1e-3;
/// Seed label separating limit draws from the sample replicas.
pub(crate) const LIMIT_STREAM: u64 = 0x004c_494d_4954;

const SCOPE: &str = "Compares the law of V_n(1) with series draws of the stable limit V(1) at the fixed time t = 1. \
Finite-dimensional agreement is implied by, but does not establish, weak M1 convergence of the path.";

/// Limit draws on `grid`, with marks stretched to match the configured norming.
pub(crate) fn limit_draws(config: &ExperimentConfig, grid: Vec<f64>) -> Result<(LimitSamples, f64)> {
    let model = config.model()?;
    let spec = limit_spec_for(&model)?;
    let marks = MarkLaw::for_model(&model);
    let scale = config.norming.mark_scale(&model);
    let run = LimitRun::new(grid, config.truncation, config.limit_reps, derive_seed(config.seed, LIMIT_STREAM))
        .with_point_scale(scale);
    let bound = truncation_tail_bound(&spec, &marks, config.truncation, scale);
    Ok((simulate_limit_joint(&spec, &marks, &run)?, bound))
}

pub(super) fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let model = config.model()?;
    let a_n = norming(&model, config.n, config.norming)?;
    let sample: Vec<f64> = simulate_partial_processes(&model, config.n, a_n, config.reps, config.seed, &[1.0])?
        .into_iter()
        .map(|row| row[0].0)
        .collect();
    let (limit, tail_bound) = limit_draws(config, vec![1.0])?;
    let reference = limit.v_at(0);

    let ks = ks_two_sample(&sample, &reference);
    let threshold = scaled_threshold(KS_TWO_SAMPLE_BASE, config.reps);
    let k = (config.reps / 50).max(10);

    let mut report = ExperimentReport::new(Experiment::E2, config, SCOPE);
    report.stat("ks_two_sample", ks);
    report.stat("ks_threshold", threshold);
    report.stat("series_tail_bound", tail_bound);
    if let Ok(h) = hill(&sample, k) {
        report.stat("hill_tail_index_v1", h);
        report.stat("hill_k", k as f64);
    }
    report.criterion(Criterion::new("ks_v1_vs_series_limit", ks, Comparison::Le, threshold));
    report.criterion(Criterion::new("series_tail_bound", tail_bound, Comparison::Lt, MAX_TAIL_BOUND));

    let mut sorted = reference;
    sorted.sort_by(f64::total_cmp);
    report.curve("ecdf", ecdf_curve(&sample, |x| ecdf(&sorted, x), 200));
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::run_experiment;

    #[test]
    fn iid_case_matches_positive_stable_series() {
        let cfg = ExperimentConfig {
            coefficients: vec![1.0],
            n: 2_000,
            reps: 4_000,
            block_len: 40,
            limit_reps: 20_000,
            ..ExperimentConfig::defaults(Experiment::E2)
        };
        let r = run_experiment(Experiment::E2, &cfg).unwrap();
        assert!(r.passed, "{}", r.summary());
    }

    #[test]
    fn short_series_fails_tail_bound() {
        let cfg = ExperimentConfig {
            n: 1_000,
            reps: 200,
            block_len: 30,
            truncation: 3,
            limit_reps: 200,
            ..ExperimentConfig::defaults(Experiment::E2)
        };
        let r = run_experiment(Experiment::E2, &cfg).unwrap();
        let c = r.criteria.iter().find(|c| c.name == "series_tail_bound").unwrap();
        assert!(!c.pass);
        assert!(!r.passed);
    }
}
