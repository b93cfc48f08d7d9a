//! Truncated series simulation of the limit pair.

use rand::distr::Open01;
use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::{LimitSpec, MarkLaw};
use crate::cadlag::{CadlagPath, CompensatedSum};
use crate::error::{Error, Result};
use crate::par::map_replicas;
use crate::rng::replica_rng;

/// Settings of one batch of limit simulations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitRun {
    pub t_grid: Vec<f64>,
    /// Number of series terms `K`.
    pub truncation: usize,
    pub reps: usize,
    pub seed: u64,
    /// Every `P_i` is multiplied by this factor (norming conventions, homogeneity checks).
    pub point_scale: f64,
}

impl LimitRun {
    pub fn new(t_grid: Vec<f64>, truncation: usize, reps: usize, seed: u64) -> Self {
        Self { t_grid, truncation, reps, seed, point_scale: 1.0 }
    }

    pub fn with_point_scale(mut self, s: f64) -> Self {
        self.point_scale = s;
        self
    }
}

/// `(V(t), W(t))` samples, replica-major on the time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitSamples {
    pub t_grid: Vec<f64>,
    pub reps: usize,
    v: Vec<f64>,
    w: Vec<f64>,
    /// Upper bound on `E sum_{i > K} P_i |U_i|`, the mean mass dropped by truncation.
    pub tail_bound: f64,
}

impl LimitSamples {
    pub fn v(&self, rep: usize, k: usize) -> f64 {
        self.v[rep * self.t_grid.len() + k]
    }

    pub fn w(&self, rep: usize, k: usize) -> f64 {
        self.w[rep * self.t_grid.len() + k]
    }

    /// All replicas of `V(t_grid[k])`.
    pub fn v_at(&self, k: usize) -> Vec<f64> {
        (0..self.reps).map(|r| self.v(r, k)).collect()
    }

    pub fn w_at(&self, k: usize) -> Vec<f64> {
        (0..self.reps).map(|r| self.w(r, k)).collect()
    }

    pub fn joint_at(&self, k: usize) -> Vec<(f64, f64)> {
        (0..self.reps).map(|r| (self.v(r, k), self.w(r, k))).collect()
    }
}

struct PointPower {
    exponent: f64,
    integer: Option<i32>,
}

impl PointPower {
    fn new(alpha: f64) -> Self {
        let exponent = -1.0 / alpha;
        let r = exponent.round();
        let integer = ((exponent - r).abs() < 1e-12 && r.abs() <= 64.0).then_some(r as i32);
        Self { exponent, integer }
    }

    fn apply(&self, x: f64) -> f64 {
        match self.integer {
            Some(k) => x.powi(k),
            None => x.powf(self.exponent),
        }
    }
}

fn check(spec: &LimitSpec, truncation: usize, point_scale: f64) -> Result<()> {
    if spec.alpha >= 1.0 {
        return Err(Error::Unsupported(format!(
            "series simulation needs alpha < 1 for absolute summability, got {}",
            spec.alpha
        )));
    }
    if truncation == 0 {
        return Err(Error::domain("truncation must be at least 1"));
    }
    if !(point_scale > 0.0) || !point_scale.is_finite() {
        return Err(Error::domain(format!("point scale must be positive, got {point_scale}")));
    }
    Ok(())
}

/// Draws the first `truncation` series points `(T_i, P_i U_i, P_i R_i)` and hands them to `visit`.
fn for_each_point(
    spec: &LimitSpec,
    marks: &MarkLaw,
    truncation: usize,
    point_scale: f64,
    rng: &mut impl Rng,
    mut visit: impl FnMut(f64, f64, f64),
) {
    let power = PointPower::new(spec.alpha);
    let mut arrival = 0.0f64;
    for _ in 0..truncation {
        let e: f64 = rng.sample(Exp1);
        arrival += e;
        let p = power.apply(arrival / spec.theta) * point_scale;
        let t: f64 = rng.sample(Open01);
        let mark = marks.draw(rng);
        visit(t, p * mark.sum, p * mark.max);
    }
}

/// `E sum_{i > K} (Gamma_i / theta)^(-1/alpha) |U_i|`, times `point_scale`.
///
/// With `p = 1/alpha > 1`, `E Gamma_i^-p = Gamma(i - p) / Gamma(i)` for `i > p`
/// and `sum_{i >= N} Gamma(i - p) / Gamma(i) = Gamma(N - p) / ((p - 1) Gamma(N - 1))`
/// (telescoping), so the bound is exact rather than an integral comparison.
/// Infinite when `K + 1 <= p`, where the first dropped term has no mean.
pub fn truncation_tail_bound(spec: &LimitSpec, marks: &MarkLaw, truncation: usize, point_scale: f64) -> f64 {
    let p = 1.0 / spec.alpha;
    let k = truncation as f64;
    if k + 1.0 - p <= 0.0 {
        return f64::INFINITY;
    }
    let ratio = (ln_gamma(k + 1.0 - p) - ln_gamma(k)).exp() / (p - 1.0);
    point_scale * spec.theta.powf(p) * marks.mean_abs_sum() * ratio
}

/// Samples of `(V(t), W(t))` on `run.t_grid`, with
/// `V(t) = sum_{i <= K, T_i <= t} P_i U_i` and `W(t) = max_{i <= K, T_i <= t} P_i R_i ∨ 0`.
pub fn simulate_limit_joint(spec: &LimitSpec, marks: &MarkLaw, run: &LimitRun) -> Result<LimitSamples> {
    check(spec, run.truncation, run.point_scale)?;
    if run.t_grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::domain("time grid must lie in [0, 1]"));
    }
    let g = run.t_grid.len();
    let per_rep = map_replicas(run.reps, |rep| {
        let mut rng = replica_rng(run.seed, rep as u64);
        let mut sums = vec![CompensatedSum::default(); g];
        let mut maxima = vec![0.0f64; g];
        for_each_point(spec, marks, run.truncation, run.point_scale, &mut rng, |t, s, m| {
            for (k, &tk) in run.t_grid.iter().enumerate() {
                if t <= tk {
                    sums[k].add(s);
                    maxima[k] = maxima[k].max(m);
                }
            }
        });
        (sums.iter().map(|s| s.value()).collect::<Vec<_>>(), maxima)
    });
    let mut v = Vec::with_capacity(run.reps * g);
    let mut w = Vec::with_capacity(run.reps * g);
    for (sv, sw) in per_rep {
        v.extend(sv);
        w.extend(sw);
    }
    Ok(LimitSamples {
        t_grid: run.t_grid.clone(),
        reps: run.reps,
        v,
        w,
        tail_bound: truncation_tail_bound(spec, marks, run.truncation, run.point_scale),
    })
}

/// One full sample path of the truncated limit pair as a 2-dimensional step path.
pub fn simulate_limit_path(
    spec: &LimitSpec,
    marks: &MarkLaw,
    truncation: usize,
    point_scale: f64,
    rng: &mut impl Rng,
) -> Result<CadlagPath> {
    check(spec, truncation, point_scale)?;
    let mut points = Vec::with_capacity(truncation);
    for_each_point(spec, marks, truncation, point_scale, rng, |t, s, m| points.push((t, s, m)));
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut sum = CompensatedSum::default();
    let mut max = 0.0f64;
    let mut times = Vec::with_capacity(points.len());
    let mut values = Vec::with_capacity(2 * points.len());
    for group in points.chunk_by(|a, b| a.0 == b.0) {
        for &(_, s, m) in group {
            sum.add(s);
            max = max.max(m);
        }
        times.push(group[0].0);
        values.extend_from_slice(&[sum.value(), max]);
    }
    Ok(CadlagPath::from_parts_unchecked(2, vec![0.0, 0.0], times, values))
}
