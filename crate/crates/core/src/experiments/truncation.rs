use super::report::{Comparison, Criterion, Curve, ExperimentReport};
use super::{Experiment, ExperimentConfig};
use crate::error::Result;
use crate::limits::{karamata_limit, karamata_truncated_moment};
use crate::models::{norming, partial_processes, truncated_process, MovingMaximaModel};
use crate::par::map_replicas;
use crate::rng::replica_rng;
use crate::stats::proportion_stderr;

/// Largest admissible relative error of the truncated moment at the top of the ladder.
pub const MAX_RELATIVE_ERROR: f64 = 0.03;

const SCOPE: &str = "Quadrature of the truncated first moment against its regular-variation limit, \
and Monte Carlo probabilities that dropping the small jumps moves the path by more than eps in sup norm.";

pub(super) fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(Experiment::E4, config, SCOPE);
    let n_max = *config.n_ladder.iter().max().expect("validated non-empty");

    let mut rows = Vec::new();
    for &alpha in &config.alphas {
        let model = MovingMaximaModel::new(alpha, config.coefficients.clone())?;
        for &u in &config.u_levels {
            let target = karamata_limit(alpha, u);
            for &n in &config.n_ladder {
                let value = karamata_truncated_moment(&model, u, n)?;
                let rel = (value - target).abs() / target;
                report.stat(format!("moment_alpha{alpha}_u{u}_n{n}"), value);
                report.stat(format!("relerr_alpha{alpha}_u{u}_n{n}"), rel);
                rows.push(vec![alpha, u, n as f64, value, target, rel]);
                if n == n_max {
                    report.criterion(Criterion::new(
                        format!("karamata_relerr_alpha{alpha}_u{u}_n{n}"),
                        rel,
                        Comparison::Le,
                        MAX_RELATIVE_ERROR,
                    ));
                }
            }
        }
    }
    report.curve("karamata", Curve::new(&["alpha", "u", "n", "moment", "limit", "relative_error"], rows));

    exceedance(config, &mut report)?;
    Ok(report.finish())
}

/// `P(sup_t |L_n - L_n^(u)| > eps)` for each `u`, with the Markov bound
/// `n E[|X_1|/a_n; |X_1|/a_n <= u] / eps` as a ceiling.
fn exceedance(config: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let model = config.model()?;
    let a_n = norming(&model, config.n, config.norming)?;
    let mut levels = config.u_levels.clone();
    levels.sort_by(f64::total_cmp);

    let gaps: Vec<Vec<f64>> = map_replicas(config.reps, |rep| {
        let mut rng = replica_rng(config.seed, rep as u64);
        let (mut z, mut x) = (Vec::new(), Vec::new());
        model.sample_into(&mut rng, config.n, &mut z, &mut x);
        let full = partial_processes(&x, a_n)?;
        levels.iter().map(|&u| full.uniform_distance(&truncated_process(&x, a_n, u)?)).collect::<Result<Vec<_>>>()
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut probabilities = Vec::new();
    for (j, &u) in levels.iter().enumerate() {
        let hits = gaps.iter().filter(|g| g[j] > config.eps).count();
        let p = hits as f64 / config.reps as f64;
        let se = proportion_stderr(p, config.reps);
        let markov = karamata_truncated_moment(&model, u, config.n)? / config.eps;
        let asymptotic = karamata_limit(model.alpha(), u) / config.eps;
        report.stat(format!("exceed_p_u{u}"), p);
        report.stat(format!("exceed_stderr_u{u}"), se);
        report.stat(format!("exceed_markov_bound_u{u}"), markov);
        report.criterion(Criterion::new(format!("exceedance_below_markov_u{u}"), p, Comparison::Le, markov + 3.0 * se));
        rows.push(vec![u, p, se, markov, asymptotic]);
        probabilities.push((p, se));
    }
    // Larger u drops more jumps, so the exceedance probability must not fall as u grows.
    let worst_drop = probabilities
        .windows(2)
        .map(|w| w[0].0 - w[1].0 - 3.0 * (w[0].1.powi(2) + w[1].1.powi(2)).sqrt())
        .fold(f64::NEG_INFINITY, f64::max);
    report.stat("exceed_worst_drop_in_u", worst_drop);
    report.criterion(Criterion::new("exceedance_monotone_in_u", worst_drop.max(0.0), Comparison::Le, 0.0));
    report.curve("exceedance", Curve::new(&["u", "p_hat", "stderr", "markov_bound", "asymptotic_bound"], rows));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::run_experiment;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            n: 5_000,
            reps: 300,
            block_len: 50,
            alphas: vec![0.5],
            n_ladder: vec![10_000, 1_000_000],
            ..ExperimentConfig::defaults(Experiment::E4)
        }
    }

    #[test]
    fn half_alpha_passes() {
        let r = run_experiment(Experiment::E4, &small()).unwrap();
        assert!(r.passed, "{}", r.summary());
        let p = |u: &str| r.statistics[&format!("exceed_p_u{u}")];
        assert!(p("0.1") <= p("0.5"));
    }

    #[test]
    fn huge_eps_never_exceeds() {
        let r = run_experiment(Experiment::E4, &ExperimentConfig { eps: 1e12, ..small() }).unwrap();
        for u in ["0.1", "0.25", "0.5", "1"] {
            assert_eq!(r.statistics[&format!("exceed_p_u{u}")], 0.0);
        }
    }
}
