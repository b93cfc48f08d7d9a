//! Strong and weak M1 distances and the M1 oscillation functional.
//!
//! * [`m1_distance`] computes the strong M1 distance between paths of any
//!   common dimension as the max-norm Fréchet distance of their completed
//!   graphs. The answer comes as a bracket `[lower, upper]`: `upper` is always
//!   a value certified feasible by the free-space decision procedure and
//!   `lower` one certified infeasible (or the endpoint bound).
//! * [`m1_distance_monotone`] is an exact closed form for nondecreasing scalar
//!   paths, independent of the free-space route.
//! * [`wm1_distance`] is the product metric: the maximum over coordinates of
//!   the scalar M1 distances.

mod chain;
mod frechet;
mod monotone;
mod oscillation;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::cadlag::CadlagPath;
use crate::error::{Error, Result};
use chain::{max_norm, Chain};

pub use oscillation::{m1_point_oscillation, omega_delta};

/// Default bracket width for general M1 computations.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
const DEFAULT_MIN_RESOLUTION: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct M1Options {
    /// Points per completed graph for the discrete upper-bound pass. Must be at
    /// least the number of graph vertices; `None` picks `max(64, vertices)`.
    pub resolution: Option<usize>,
    /// Target width of the returned bracket.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for M1Options {
    fn default() -> Self {
        Self { resolution: None, tolerance: DEFAULT_TOLERANCE, max_iterations: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct M1Distance {
    /// Midpoint of the bracket.
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// `false` when the iteration budget ran out before `upper - lower <= tolerance`.
    pub closed: bool,
}

impl M1Distance {
    fn exact(v: f64) -> Self {
        Self { value: v, lower: v, upper: v, closed: true }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WM1Distance {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub closed: bool,
    pub components: Vec<M1Distance>,
}

/// Exact M1 distance between two nondecreasing scalar paths.
pub fn m1_distance_monotone(x: &CadlagPath, y: &CadlagPath) -> Result<f64> {
    x.require_scalar()?;
    y.require_scalar()?;
    if !x.is_nondecreasing() || !y.is_nondecreasing() {
        return Err(Error::domain("closed-form M1 distance needs nondecreasing paths"));
    }
    Ok(monotone::monotone_distance(&Chain::from_path(x), &Chain::from_path(y)))
}

/// Strong M1 distance between two paths of equal dimension.
pub fn m1_distance(x: &CadlagPath, y: &CadlagPath, opts: &M1Options) -> Result<M1Distance> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: y.dim() });
    }
    if !(opts.tolerance > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    // the metric is symmetric; fixing the argument order makes it bitwise so
    let (x, y) = match canonical_order(x, y) {
        Ordering::Greater => (y, x),
        _ => (x, y),
    };
    let (p, q) = (Chain::from_path(x), Chain::from_path(y));
    let vertices = p.len().max(q.len());
    let resolution = opts.resolution.unwrap_or(vertices.max(DEFAULT_MIN_RESOLUTION));
    if resolution < vertices {
        return Err(Error::domain(format!(
            "resolution {resolution} cannot represent a completed graph with {vertices} vertices"
        )));
    }

    let mut lower = max_norm(p.point(0), q.point(0)).max(max_norm(p.last(), q.last()));
    if frechet::decide(&p, &q, lower) {
        return Ok(M1Distance::exact(lower));
    }
    let mut upper = frechet::discrete_upper_bound(&p.densify(resolution), &q.densify(resolution));
    // guard against rounding at the boundary of the decision procedure
    while !frechet::decide(&p, &q, upper) {
        upper = upper * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    }

    let mut iterations = 0;
    while upper - lower > opts.tolerance && iterations < opts.max_iterations {
        let mid = 0.5 * (lower + upper);
        if mid <= lower || mid >= upper {
            break;
        }
        if frechet::decide(&p, &q, mid) {
            upper = mid;
        } else {
            lower = mid;
        }
        iterations += 1;
    }
    Ok(M1Distance { value: 0.5 * (lower + upper), lower, upper, closed: upper - lower <= opts.tolerance })
}

/// Weak M1 (product) distance between two 2-dimensional paths.
pub fn wm1_distance(x: &CadlagPath, y: &CadlagPath, opts: &M1Options) -> Result<WM1Distance> {
    for p in [x, y] {
        if p.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: p.dim() });
        }
    }
    let components =
        (0..2).map(|j| m1_distance(&x.component(j)?, &y.component(j)?, opts)).collect::<Result<Vec<_>>>()?;
    let fold = |f: fn(&M1Distance) -> f64| components.iter().map(f).fold(0.0, f64::max);
    Ok(WM1Distance {
        value: fold(|c| c.value),
        lower: fold(|c| c.lower),
        upper: fold(|c| c.upper),
        closed: components.iter().all(|c| c.closed),
        components,
    })
}

fn canonical_order(x: &CadlagPath, y: &CadlagPath) -> Ordering {
    let key = |p: &CadlagPath| {
        let mut k = vec![p.num_jumps() as f64];
        k.extend_from_slice(p.jump_times());
        for level in 0..p.num_levels() {
            k.extend_from_slice(p.level(level));
        }
        k
    };
    let (a, b) = (key(x), key(y));
    a.iter().zip(&b).map(|(u, v)| u.total_cmp(v)).find(|o| o.is_ne()).unwrap_or_else(|| a.len().cmp(&b.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(t: f64, h: f64) -> CadlagPath {
        CadlagPath::scalar(0.0, &[(t, h)]).unwrap()
    }

    #[test]
    fn identical_paths() {
        let p = CadlagPath::scalar(0.0, &[(0.2, 1.0), (0.7, -1.0)]).unwrap();
        let d = m1_distance(&p, &p, &M1Options::default()).unwrap();
        assert_eq!(d.value, 0.0);
        assert!(d.closed);
        assert_eq!(m1_distance_monotone(&step(0.3, 1.0), &step(0.3, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn shifted_small_step_monotone_closed_form() {
        let n = 10.0;
        let x = step(0.5 - 1.0 / n, 0.5);
        let y = step(0.5, 0.5);
        let d = m1_distance_monotone(&x, &y).unwrap();
        assert!((d - 0.1).abs() < 1e-12, "{d}");
        let g = m1_distance(&x, &y, &M1Options::default()).unwrap();
        assert!((g.value - d).abs() <= 1e-9);
    }

    #[test]
    fn narrow_bump_against_zero_is_half_height() {
        let u = 1.0;
        let n = 10.0;
        let y_n = CadlagPath::scalar(0.0, &[(0.5 - 1.0 / n, u / 2.0), (0.5, 0.0)]).unwrap();
        let zero = CadlagPath::zero(1).unwrap();
        let d = m1_distance(&y_n, &zero, &M1Options { tolerance: 1e-12, ..Default::default() }).unwrap();
        assert!((d.value - 0.5).abs() <= 1e-9, "{d:?}");
        assert!(d.lower <= 0.5 && d.upper >= 0.5 - 1e-15);
    }

    #[test]
    fn monotone_rejects_decreasing() {
        let down = CadlagPath::scalar(1.0, &[(0.5, 0.0)]).unwrap();
        assert!(m1_distance_monotone(&down, &step(0.5, 1.0)).is_err());
    }

    #[test]
    fn resolution_too_small() {
        let p = CadlagPath::scalar(0.0, &[(0.1, 1.0), (0.2, 2.0), (0.3, 3.0)]).unwrap();
        let opts = M1Options { resolution: Some(3), ..Default::default() };
        assert!(matches!(m1_distance(&p, &p, &opts), Err(Error::Domain(_))));
    }

    #[test]
    fn wm1_coordinate_shift() {
        let a = CadlagPath::stack(&[&step(0.4, 1.0), &step(0.3, 1.0)]).unwrap();
        let b = CadlagPath::stack(&[&step(0.4, 1.0), &step(0.3, 1.0).scale(1.0)]).unwrap();
        assert_eq!(wm1_distance(&a, &b, &M1Options::default()).unwrap().value, 0.0);

        // shift coordinate 0 by d = 0.05 in time, coordinate 1 untouched
        let c = CadlagPath::stack(&[&step(0.45, 1.0), &step(0.3, 1.0)]).unwrap();
        let d = wm1_distance(&a, &c, &M1Options::default()).unwrap();
        assert!((d.value - 0.05).abs() <= 1e-9, "{d:?}");
        assert_eq!(d.components[1].value, 0.0);
    }

    #[test]
    fn wm1_rejects_scalar() {
        let s = step(0.5, 1.0);
        assert!(wm1_distance(&s, &s, &M1Options::default()).is_err());
    }

    #[test]
    fn bitwise_symmetry() {
        let a = CadlagPath::scalar(0.0, &[(0.21, 1.3), (0.5, -0.4), (0.77, 2.0)]).unwrap();
        let b = CadlagPath::scalar(0.1, &[(0.3, 0.9), (0.52, 0.2)]).unwrap();
        let o = M1Options::default();
        assert_eq!(m1_distance(&a, &b, &o).unwrap(), m1_distance(&b, &a, &o).unwrap());
    }
}
