//! Parameters of the joint limit `(V, W)`, series simulation of it, and
//! estimators that connect simulated sequences to those parameters.
//!
//! The limit of the point process of normalised observations is a Poisson
//! cluster process: cluster centres `P_i = (Gamma_i / theta)^(-1/alpha)` at
//! uniform times `T_i`, each carrying a normalised cluster `(eta_ij)_j`. Only
//! two functionals of a cluster enter the limit pair, its sum `U_i` and its
//! positive maximum `R_i`, so clusters are represented by those two numbers.

mod estimators;
mod karamata;
mod series;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::MovingMaximaModel;

pub use estimators::{
    blocks_extremal_index_estimator, empirical_cluster_marks, empirical_tail_process, TailProcessSample,
};
pub use karamata::{karamata_limit, karamata_truncated_moment};
pub use series::{simulate_limit_joint, simulate_limit_path, truncation_tail_bound, LimitRun, LimitSamples};

/// Constants of the limit: Lévy measure `(c_plus 1{x>0} + c_minus 1{x<0}) theta alpha |x|^(-alpha-1)`
/// for `V` and exponent measure `r theta alpha x^(-alpha-1)` for `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitSpec {
    pub alpha: f64,
    pub theta: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub r: f64,
}

impl LimitSpec {
    /// `alpha` may lie anywhere in `(0, 2)`; only `(0, 1)` can be simulated.
    pub fn new(alpha: f64, theta: f64, c_plus: f64, c_minus: f64, r: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::domain(format!("tail index must lie in (0, 2), got {alpha}")));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::domain(format!("extremal index must lie in (0, 1], got {theta}")));
        }
        for (name, v) in [("c_plus", c_plus), ("c_minus", c_minus), ("r", r)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        Ok(Self { alpha, theta, c_plus, c_minus, r })
    }

    /// Constants implied by a cluster mark law.
    pub fn from_marks(alpha: f64, theta: f64, marks: &MarkLaw) -> Result<Self> {
        let (c_plus, c_minus, r) = marks.moments(alpha);
        Self::new(alpha, theta, c_plus, c_minus, r)
    }

    /// Drift `(c_plus - c_minus) theta alpha / (1 - alpha)` carried by the uncompensated series.
    ///
    /// It equals `int_0^1 x nu'(dx)` for the positive part (and minus that for
    /// the negative part), the term the truncation `1_[-1,1]` in the
    /// Lévy–Khintchine exponent subtracts, so no compensator is added.
    pub fn drift(&self) -> Result<f64> {
        if self.alpha >= 1.0 {
            return Err(Error::Unsupported("the drift formula needs alpha < 1".into()));
        }
        Ok((self.c_plus - self.c_minus) * self.theta * self.alpha / (1.0 - self.alpha))
    }

    /// `nu''(x, inf) = r theta x^-alpha`.
    pub fn extremal_tail(&self, x: f64) -> f64 {
        self.r * self.theta * x.powf(-self.alpha)
    }
}

/// Limit constants for `X_k = Z_k ∨ Z_{k-1}`.
///
/// A large value of the sequence comes from one large innovation, which shows
/// up in two consecutive observations. Normalised by its maximum, the cluster
/// is `(1, 1)`: sum `U = 2`, positive maximum `R = 1`. Looking forward from the
/// first exceedance, the tail process stays above 1 at lag 1 with probability
/// 1/2 (when the big innovation is the current one rather than the previous),
/// which gives `theta = 1/2`, `c_plus = E U^alpha = 2^alpha`, `c_minus = 0`,
/// `r = E R^alpha = 1`.
pub fn limit_spec_mm11(alpha: f64) -> Result<LimitSpec> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("tail index must lie in (0, 1), got {alpha}")));
    }
    LimitSpec::new(alpha, 0.5, 2f64.powf(alpha), 0.0, 1.0)
}

/// Limit constants for a general finite moving maxima model.
///
/// The same single-big-innovation argument applies: the normalised cluster is
/// `c_i / max_j c_j`, so `U = sum c / max c`, `R = 1`, and the extremal index is
/// the share of the marginal tail weight carried by the largest coefficient,
/// `theta = max c^alpha / sum c^alpha`.
pub fn limit_spec_for(model: &MovingMaximaModel) -> Result<LimitSpec> {
    let alpha = model.alpha();
    let cmax = model.coefficients().iter().cloned().fold(0.0, f64::max);
    let theta = cmax.powf(alpha) / model.tail_weight();
    LimitSpec::from_marks(alpha, theta, &MarkLaw::for_model(model))
}

/// Sum and positive maximum of one normalised cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterMarkSample {
    pub sum: f64,
    pub max: f64,
}

/// Distribution of `(U, R)` used by the series simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkLaw {
    Fixed(ClusterMarkSample),
    /// Uniform resampling from an observed collection.
    Empirical(Vec<ClusterMarkSample>),
}

impl MarkLaw {
    /// Deterministic cluster of a moving maxima model.
    pub fn for_model(model: &MovingMaximaModel) -> Self {
        let c = model.coefficients();
        let cmax = c.iter().cloned().fold(0.0, f64::max);
        MarkLaw::Fixed(ClusterMarkSample { sum: c.iter().sum::<f64>() / cmax, max: 1.0 })
    }

    pub fn empirical(samples: Vec<ClusterMarkSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InsufficientData("empty cluster mark sample".into()));
        }
        Ok(MarkLaw::Empirical(samples))
    }

    fn as_slice(&self) -> &[ClusterMarkSample] {
        match self {
            MarkLaw::Fixed(m) => std::slice::from_ref(m),
            MarkLaw::Empirical(v) => v,
        }
    }

    /// `(E[U^alpha; U > 0], E[(-U)^alpha; U < 0], E[R^alpha])`.
    pub fn moments(&self, alpha: f64) -> (f64, f64, f64) {
        let s = self.as_slice();
        let n = s.len() as f64;
        let pos = s.iter().filter(|m| m.sum > 0.0).map(|m| m.sum.powf(alpha)).sum::<f64>() / n;
        let neg = s.iter().filter(|m| m.sum < 0.0).map(|m| (-m.sum).powf(alpha)).sum::<f64>() / n;
        let r = s.iter().map(|m| m.max.max(0.0).powf(alpha)).sum::<f64>() / n;
        (pos, neg, r)
    }

    /// `E|U|`.
    pub fn mean_abs_sum(&self) -> f64 {
        let s = self.as_slice();
        s.iter().map(|m| m.sum.abs()).sum::<f64>() / s.len() as f64
    }

    pub(crate) fn draw(&self, rng: &mut impl rand::Rng) -> ClusterMarkSample {
        match self {
            MarkLaw::Fixed(m) => *m,
            MarkLaw::Empirical(v) => v[rng.random_range(0..v.len())],
        }
    }
}

/// `P(W(t) <= x) = exp(-t r theta x^-alpha)`.
pub fn extremal_cdf(spec: &LimitSpec, t: f64, x: f64) -> Result<f64> {
    extremal_cdf_scaled(spec, t, x, 1.0)
}

/// [`extremal_cdf`] for the limit of a process normed so that its marks are
/// stretched by `mark_scale` (see [`crate::models::NormingMode::mark_scale`]).
pub fn extremal_cdf_scaled(spec: &LimitSpec, t: f64, x: f64, mark_scale: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::domain(format!("time must lie in (0, 1], got {t}")));
    }
    if !(x > 0.0) {
        return Err(Error::domain(format!("level must be positive, got {x}")));
    }
    Ok((-t * spec.extremal_tail(x / mark_scale)).exp())
}
