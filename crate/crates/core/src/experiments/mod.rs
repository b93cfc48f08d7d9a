//! Seeded Monte Carlo experiments and their reports.
//!
//! | id | checks |
//! |----|--------|
//! | e1 | `W_n(1)` against the closed-form extremal limit (one-sample KS) |
//! | e2 | `V_n(1)` against series draws of the stable limit (two-sample KS) |
//! | e3 | joint law of `(V_n(t), W_n(t))` on a 10x10 CDF grid, rank dependence |
//! | e4 | Karamata truncated moments by quadrature, truncation exceedance probabilities |
//! | e5 | persistence of the M1 oscillation of `V_n - 2 W_n` (no strong M1 limit) |
//! | e6 | the deterministic weak/strong M1 discontinuity example |

mod config;
mod discontinuity;
mod extremal;
mod joint;
mod oscillation;
mod report;
mod stable_sum;
mod truncation;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::MovingMaximaModel;
use crate::par::map_replicas;
use crate::rng::replica_rng;

pub use config::{ConfigOverrides, ExperimentConfig};
pub use report::{canonical_json, Comparison, Criterion, Curve, ExperimentReport};

/// Base KS thresholds at the reference replica count; see [`scaled_threshold`].
pub const KS_ONE_SAMPLE_BASE: f64 = 0.02;
pub const KS_TWO_SAMPLE_BASE: f64 = 0.03;
pub const JOINT_GRID_BASE: f64 = 0.03;
pub const REFERENCE_REPS: usize = 10_000;
/// Below this many replicas a distributional report is flagged as insufficient.
pub const MIN_REPS: usize = 100;

/// `base * sqrt(REFERENCE_REPS / reps)`: thresholds loosen with fewer replicas
/// at the rate of the null KS standard error.
pub fn scaled_threshold(base: f64, reps: usize) -> f64 {
    base * (REFERENCE_REPS as f64 / reps as f64).sqrt()
}

pub const THRESHOLD_FORMULA: &str = "base * sqrt(10000 / reps)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
}

impl Experiment {
    pub const ALL: [Experiment; 6] =
        [Experiment::E1, Experiment::E2, Experiment::E3, Experiment::E4, Experiment::E5, Experiment::E6];

    pub fn title(self) -> &'static str {
        match self {
            Experiment::E1 => "extremal limit of the partial maxima",
            Experiment::E2 => "stable limit of the partial sums",
            Experiment::E3 => "joint law of partial sums and maxima",
            Experiment::E4 => "Karamata truncated moments and truncation error",
            Experiment::E5 => "M1 oscillation of V_n - 2 W_n",
            Experiment::E6 => "weak versus strong M1 continuity of the sum-maximum functional",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Experiment::E1 => "e1",
            Experiment::E2 => "e2",
            Experiment::E3 => "e3",
            Experiment::E4 => "e4",
            Experiment::E5 => "e5",
            Experiment::E6 => "e6",
        };
        f.write_str(s)
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}; expected e1..e6")))
    }
}

/// Validates `config` for `experiment`, runs it and times it.
pub fn run_experiment(experiment: Experiment, config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate(experiment)?;
    let start = Instant::now();
    let mut report = match experiment {
        Experiment::E1 => extremal::run(config),
        Experiment::E2 => stable_sum::run(config),
        Experiment::E3 => joint::run(config),
        Experiment::E4 => truncation::run(config),
        Experiment::E5 => oscillation::run(config),
        Experiment::E6 => discontinuity::run(config),
    }?;
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// `(V_n(t), W_n(t))` for every replica and every `t` in `grid`, replica-major.
pub(crate) fn simulate_partial_processes(
    model: &MovingMaximaModel,
    n: usize,
    a_n: f64,
    reps: usize,
    seed: u64,
    grid: &[f64],
) -> Result<Vec<Vec<(f64, f64)>>> {
    map_replicas(reps, |rep| {
        let mut rng = replica_rng(seed, rep as u64);
        let (mut z, mut x) = (Vec::new(), Vec::new());
        model.sample_into(&mut rng, n, &mut z, &mut x);
        let path = crate::models::partial_processes(&x, a_n)?;
        grid.iter().map(|&t| path.eval(t).map(|v| (v[0], v[1]))).collect::<Result<Vec<_>>>()
    })
    .into_iter()
    .collect()
}

/// Evenly spaced quantile rows `(x, F_empirical(x), F_reference(x))` for plotting.
pub(crate) fn ecdf_curve(sample: &[f64], reference: impl Fn(f64) -> f64, points: usize) -> Curve {
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rows = (1..=points)
        .map(|k| {
            let x = crate::stats::quantile_sorted(&sorted, (k as f64 - 0.5) / points as f64);
            vec![x, crate::stats::ecdf(&sorted, x), reference(x)]
        })
        .collect();
    Curve::new(&["x", "ecdf_empirical", "cdf_limit"], rows)
}
