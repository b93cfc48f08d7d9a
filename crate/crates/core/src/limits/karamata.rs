//! Truncated first moments of the moving maxima marginal.

use crate::error::{Error, Result};
use crate::models::{norming, MovingMaximaModel, NormingMode};

/// `u^(1-alpha) alpha / (1 - alpha)`, the limit of [`karamata_truncated_moment`].
pub fn karamata_limit(alpha: f64, u: f64) -> f64 {
    u.powf(1.0 - alpha) * alpha / (1.0 - alpha)
}

/// `n E[(X_1/a_n) 1{X_1 <= u a_n}]` under marginal norming, by quadrature
/// against the exact marginal law `P(X_1 <= x) = exp(-C x^-alpha)`.
///
/// With `b = u a_n`, `E[X 1{X <= b}] = int_0^b P(X > x) dx - b P(X > b)`. The
/// integral is taken in the variable `y = x^(1-alpha)`, in which the integrand
/// tends to the constant `C` for large `y`; the interval is split where the
/// tail turns from `1` to its power law.
pub fn karamata_truncated_moment(model: &MovingMaximaModel, u: f64, n: usize) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::domain(format!("truncation level must be positive, got {u}")));
    }
    let alpha = model.alpha();
    let weight = model.tail_weight();
    let a_n = norming(model, n, NormingMode::ByMarginal)?;
    let b = u * a_n;
    let tail = |x: f64| -(-weight * x.powf(-alpha)).exp_m1();

    let beta = 1.0 - alpha;
    let integrand = |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let x = y.powf(1.0 / beta);
        tail(x) * y.powf(alpha / beta) / beta
    };
    let y_end = b.powf(beta);
    let y_knee = (4.0 * weight.powf(1.0 / alpha)).powf(beta).min(y_end);
    let tolerance = 1e-13 * (weight * y_end / beta).max(1.0);
    let head = quadrature::integrate(integrand, 0.0, y_knee, tolerance).integral;
    let body = if y_end > y_knee { quadrature::integrate(integrand, y_knee, y_end, tolerance).integral } else { 0.0 };
    Ok(n as f64 / a_n * (head + body - b * tail(b)))
}
