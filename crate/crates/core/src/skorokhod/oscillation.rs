//! The M1 oscillation functional.

use crate::cadlag::CadlagPath;
use crate::error::{Error, Result};

/// Relative slack on window widths, so that grid-aligned windows such as
/// `delta = 2/n` are not widened by rounding in `k/n` differences.
const WINDOW_SLACK: f64 = 1e-9;

/// Distance from `x2` to the closed segment between `x1` and `x3` (in either order).
pub fn m1_point_oscillation(x1: f64, x2: f64, x3: f64) -> f64 {
    let (lo, hi) = if x1 <= x3 { (x1, x3) } else { (x3, x1) };
    if x2 >= lo && x2 <= hi {
        0.0
    } else {
        (x2 - x1).abs().min((x3 - x2).abs())
    }
}

/// `sup { M(x(t1), x(t), x(t2)) : t1 <= t <= t2, t2 - t1 <= delta }` for a scalar step path.
///
/// Write `I_k = [tau_k, tau_{k+1})` for the constancy intervals (`tau_0 = 0`,
/// the last interval closed at 1) and `v_k` for their values. A triple of
/// times only matters through the intervals it falls in, `k1 <= k <= k2`.
/// If two of them coincide then `M = 0`, so only `k1 < k < k2` counts. Such a
/// triple exists with `t2 - t1 <= delta` iff `tau_{k2} - tau_{k1+1} < delta`:
/// `t1` can approach `tau_{k1+1}` from below but never reach it, and the
/// earliest admissible `t2` is `tau_{k2}`. For a fixed outer pair the best
/// middle value is the extreme of `v_{k1+1..k2-1}` farthest outside
/// `[min(v_{k1}, v_{k2}), max(v_{k1}, v_{k2})]`. Scanning outer pairs with a
/// running max/min of the middle values therefore gives the exact supremum.
pub fn omega_delta(path: &CadlagPath, delta: f64) -> Result<f64> {
    path.require_scalar()?;
    if !(delta > 0.0) {
        return Err(Error::domain(format!("oscillation window must be positive, got {delta}")));
    }
    let times = path.jump_times();
    let levels = path.num_levels();
    let value = |k: usize| path.level(k)[0];
    let limit = delta * (1.0 - WINDOW_SLACK);

    let mut best = 0.0f64;
    for k1 in 0..levels.saturating_sub(2) {
        let left_edge = times[k1];
        let first_mid = value(k1 + 1);
        let (mut mid_max, mut mid_min) = (first_mid, first_mid);
        let v1 = value(k1);
        for k2 in k1 + 2..levels {
            if times[k2 - 1] - left_edge >= limit {
                break;
            }
            let v2 = value(k2);
            let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
            best = best.max(mid_max - hi).max(lo - mid_min);
            mid_max = mid_max.max(v2);
            mid_min = mid_min.min(v2);
        }
    }
    Ok(best)
}
