use super::report::{Comparison, Criterion, Curve, ExperimentReport};
use super::{Experiment, ExperimentConfig};
use crate::cadlag::{CadlagPath, SampleRule};
use crate::error::Result;
use crate::models::{gn_path, norming};
use crate::par::map_replicas;
use crate::rng::{derive_seed, replica_rng};
use crate::skorokhod::omega_delta;
use crate::stats::proportion_stderr;

/// Replicas per ladder rung on which the monotone control `omega(W_n) = 0` is checked.
const CONTROL_REPS: usize = 200;

const SCOPE: &str = "Estimates P(omega_{2/n}(V_n - 2 W_n) > eps/2) along a ladder of n. \
A probability that stays away from 0 rules out strong M1 tightness of (V_n, W_n); it says nothing against weak M1 convergence.";

/// Asymptotic lower bound `(1 - exp(-eps^-alpha)) - 4^alpha eps^(-2 alpha)` on the oscillation probability.
pub fn oscillation_lower_bound(alpha: f64, eps: f64) -> f64 {
    -(-eps.powf(-alpha)).exp_m1() - 4f64.powf(alpha) * eps.powf(-2.0 * alpha)
}

/// The bound is informative only when `eps^(2 alpha) (1 - exp(-eps^-alpha)) > 4^alpha`.
pub fn eps_condition(alpha: f64, eps: f64) -> f64 {
    eps.powf(2.0 * alpha) * -(-eps.powf(-alpha)).exp_m1()
}

struct Rung {
    n: usize,
    p_hat: f64,
    stderr: f64,
    control_max: f64,
}

fn rung(config: &ExperimentConfig, n: usize) -> Result<Rung> {
    let model = config.model()?;
    let a_n = norming(&model, n, config.norming)?;
    let delta = 2.0 / n as f64;
    let seed = derive_seed(config.seed, n as u64);
    let hits: Vec<(bool, f64)> = map_replicas(config.reps, |rep| {
        let mut rng = replica_rng(seed, rep as u64);
        let (mut z, mut x) = (Vec::new(), Vec::new());
        model.sample_into(&mut rng, n, &mut z, &mut x);
        let hit = omega_delta(&gn_path(&x, a_n)?, delta)? > config.eps / 2.0;
        let control = if rep < CONTROL_REPS {
            let scaled: Vec<f64> = x.iter().map(|v| v / a_n).collect();
            omega_delta(&CadlagPath::from_scalar_samples(&scaled, SampleRule::RunningMax)?, delta)?
        } else {
            0.0
        };
        Ok((hit, control))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let p_hat = hits.iter().filter(|h| h.0).count() as f64 / config.reps as f64;
    Ok(Rung {
        n,
        p_hat,
        stderr: proportion_stderr(p_hat, config.reps),
        control_max: hits.iter().map(|h| h.1).fold(0.0, f64::max),
    })
}

pub(super) fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut ladder = config.n_ladder.clone();
    ladder.sort_unstable();
    ladder.dedup();
    let rungs = ladder.iter().map(|&n| rung(config, n)).collect::<Result<Vec<_>>>()?;
    let bound = oscillation_lower_bound(config.alpha, config.eps);
    let condition = eps_condition(config.alpha, config.eps);

    let mut report = ExperimentReport::new(Experiment::E5, config, SCOPE);
    report.stat("lower_bound", bound);
    report.stat("eps_condition", condition);
    report.stat("eps_condition_threshold", 4f64.powf(config.alpha));
    for r in &rungs {
        report.stat(format!("p_hat_n{}", r.n), r.p_hat);
        report.stat(format!("stderr_n{}", r.n), r.stderr);
        report.stat(format!("control_omega_max_n{}", r.n), r.control_max);
    }

    let (first, last) = (&rungs[0], &rungs[rungs.len() - 1]);
    report.criterion(Criterion::new(
        format!("p_hat_above_lower_bound_n{}", last.n),
        last.p_hat,
        Comparison::Ge,
        bound - 3.0 * last.stderr,
    ));
    // "No decay": the top rung may not sit significantly below the bottom one.
    let slack = 3.0 * (first.stderr.powi(2) + last.stderr.powi(2)).sqrt();
    report.criterion(Criterion::new("no_decay_across_ladder", last.p_hat, Comparison::Ge, first.p_hat - slack));
    report.criterion(Criterion::new("eps_condition", condition, Comparison::Gt, 4f64.powf(config.alpha)));
    let control = rungs.iter().map(|r| r.control_max).fold(0.0, f64::max);
    report.criterion(Criterion::new("monotone_control_omega_w", control, Comparison::Le, 0.0));

    let rows = rungs.iter().map(|r| vec![r.n as f64, r.p_hat, r.stderr, bound]).collect();
    report.curve("p_hat_ladder", Curve::new(&["n", "p_hat", "stderr", "lower_bound"], rows));
    Ok(report.finish())
}
