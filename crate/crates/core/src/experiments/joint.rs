use super::report::{Comparison, Criterion, ExperimentReport};
use super::stable_sum::limit_draws;
use super::{scaled_threshold, simulate_partial_processes, Experiment, ExperimentConfig, JOINT_GRID_BASE};
use crate::error::Result;
use crate::models::norming;
use crate::stats::{energy_distance_bounded, joint_cdf_grid_sup, spearman};

/// Joint CDF evaluation lattice is `GRID x GRID`.
pub const GRID: usize = 10;
pub const MIN_RANK_CORRELATION: f64 = 0.5;
/// Points per sample in the (quadratic) energy distance.
const ENERGY_POINTS: usize = 2_000;

const SCOPE: &str = "Compares the joint law of (V_n(t), W_n(t)) with that of the limit (V(t), W(t)) at fixed times. \
Weak M1 convergence implies convergence at these continuity points; agreement here does not establish convergence of the path law.";

pub(super) fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let model = config.model()?;
    let a_n = norming(&model, config.n, config.norming)?;
    let sample = simulate_partial_processes(&model, config.n, a_n, config.reps, config.seed, &config.t_grid)?;
    let (limit, tail_bound) = limit_draws(config, config.t_grid.clone())?;
    let threshold = scaled_threshold(JOINT_GRID_BASE, config.reps);

    let mut report = ExperimentReport::new(Experiment::E3, config, SCOPE);
    report.stat("grid_threshold", threshold);
    report.stat("series_tail_bound", tail_bound);
    for (k, &t) in config.t_grid.iter().enumerate() {
        let empirical: Vec<(f64, f64)> = sample.iter().map(|row| row[k]).collect();
        let reference = limit.joint_at(k);
        let grid_sup = joint_cdf_grid_sup(&empirical, &reference, GRID);
        let flat = |pts: &[(f64, f64)]| pts.iter().flat_map(|p| [p.0, p.1]).collect::<Vec<_>>();
        let energy = energy_distance_bounded(&flat(&empirical), &flat(&reference), 2, ENERGY_POINTS);
        report.stat(format!("grid_sup_t{t}"), grid_sup);
        report.stat(format!("energy_distance_t{t}"), energy);
        report.criterion(Criterion::new(format!("joint_cdf_grid_sup_t{t}"), grid_sup, Comparison::Le, threshold));
    }

    let last = config.t_grid.len() - 1;
    let t_last = config.t_grid[last];
    let v: Vec<f64> = sample.iter().map(|row| row[last].0).collect();
    let w: Vec<f64> = sample.iter().map(|row| row[last].1).collect();
    let rho = spearman(&v, &w);
    report.stat(format!("spearman_v_w_t{t_last}"), rho);
    report.criterion(Criterion::new(format!("rank_correlation_t{t_last}"), rho, Comparison::Gt, MIN_RANK_CORRELATION));

    // Clusters with values of both signs would break the limit theorem's hypothesis.
    // With nonnegative coefficients every observation is positive, so V_n >= W_n.
    let sign_gap = sample.iter().flat_map(|row| row.iter().map(|&(v, w)| v - w)).fold(f64::INFINITY, f64::min);
    report.stat("min_v_minus_w", sign_gap);
    report.criterion(Criterion::new("no_opposite_signs", sign_gap, Comparison::Ge, 0.0));
    Ok(report.finish())
}
