//! Time-space point measures and the sum-maximum functional.

use std::ops::{Bound, RangeBounds};

use serde::{Deserialize, Serialize};

use crate::cadlag::{CadlagPath, CompensatedSum};
use crate::error::{Error, Result};

/// Finite point measure on `[0, 1] x (R \ {0})`.
///
/// Atoms are kept sorted by time; atoms sharing a time stay in insertion order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "MeasureJson", into = "MeasureJson")]
pub struct TimeSpacePointMeasure {
    atoms: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    atoms: Vec<[f64; 2]>,
}

impl TryFrom<MeasureJson> for TimeSpacePointMeasure {
    type Error = Error;
    fn try_from(j: MeasureJson) -> Result<Self> {
        Self::new(j.atoms.into_iter().map(|[t, x]| (t, x)).collect())
    }
}

impl From<TimeSpacePointMeasure> for MeasureJson {
    fn from(m: TimeSpacePointMeasure) -> Self {
        MeasureJson { atoms: m.atoms.into_iter().map(|(t, x)| [t, x]).collect() }
    }
}

/// Which part of the continuity set a measure falls outside of, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaStatus {
    InLambda,
    /// An atom sits at time 0 or 1, or has `|mark| = u`.
    ViolatesLambda1,
    /// Some time carries both a mark above `u` and a mark below `-u`.
    ViolatesLambda2,
}

impl TimeSpacePointMeasure {
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        for &(t, x) in &atoms {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::domain(format!("atom time {t} outside [0, 1]")));
            }
            if !x.is_finite() || x == 0.0 {
                return Err(Error::domain(format!("atom mark {x} must be finite and nonzero")));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { atoms })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `sum_i delta_(i/n, X_i/a_n)`, dropping zero marks.
    pub fn build_nn(sample: &[f64], a_n: f64) -> Result<Self> {
        if !(a_n > 0.0) || !a_n.is_finite() {
            return Err(Error::domain(format!("norming constant must be positive, got {a_n}")));
        }
        let nf = sample.len() as f64;
        let atoms = sample
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0.0)
            .map(|(i, &x)| ((i + 1) as f64 / nf, x / a_n))
            .collect();
        Self::new(atoms)
    }

    /// The pair (running sum of marks with `|x| > u`, running max of all marks floored at 0).
    ///
    /// Atoms at a common time produce a single jump; atoms at time 0 are folded
    /// into the initial value.
    pub fn sum_max_functional(&self, u: f64) -> Result<CadlagPath> {
        if !(u > 0.0) {
            return Err(Error::domain(format!("truncation level must be positive, got {u}")));
        }
        let mut sum = CompensatedSum::default();
        let mut max = 0.0f64;
        let mut initial = [0.0, 0.0];
        let mut times = Vec::new();
        let mut values = Vec::new();
        let mut i = 0;
        while i < self.atoms.len() {
            let t = self.atoms[i].0;
            while i < self.atoms.len() && self.atoms[i].0 == t {
                let x = self.atoms[i].1;
                if x.abs() > u {
                    sum.add(x);
                }
                max = max.max(x);
                i += 1;
            }
            if t == 0.0 {
                initial = [sum.value(), max];
            } else {
                times.push(t);
                values.extend_from_slice(&[sum.value(), max]);
            }
        }
        Ok(CadlagPath::from_parts_unchecked(2, initial.to_vec(), times, values))
    }

    pub fn lambda_membership(&self, u: f64) -> LambdaStatus {
        if self.atoms.iter().any(|&(t, x)| t == 0.0 || t == 1.0 || x.abs() == u) {
            return LambdaStatus::ViolatesLambda1;
        }
        for group in self.atoms.chunk_by(|a, b| a.0 == b.0) {
            let above = group.iter().any(|&(_, x)| x > u);
            let below = group.iter().any(|&(_, x)| x < -u);
            if above && below {
                return LambdaStatus::ViolatesLambda2;
            }
        }
        LambdaStatus::InLambda
    }

    /// Number of atoms with time in `times` and mark in `marks`.
    pub fn restrict_count(&self, times: impl RangeBounds<f64>, marks: impl RangeBounds<f64>) -> usize {
        self.atoms.iter().filter(|(t, x)| contains(&times, *t) && contains(&marks, *x)).count()
    }
}

fn contains(range: &impl RangeBounds<f64>, v: f64) -> bool {
    let lower = match range.start_bound() {
        Bound::Included(&a) => v >= a,
        Bound::Excluded(&a) => v > a,
        Bound::Unbounded => true,
    };
    let upper = match range.end_bound() {
        Bound::Included(&b) => v <= b,
        Bound::Excluded(&b) => v < b,
        Bound::Unbounded => true,
    };
    lower && upper
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skorokhod::{m1_distance, wm1_distance, M1Options};

    fn eta_n(u: f64, n: usize) -> TimeSpacePointMeasure {
        TimeSpacePointMeasure::new(vec![(0.5 - 1.0 / n as f64, u / 2.0), (0.5, 2.0 * u)]).unwrap()
    }

    fn eta(u: f64) -> TimeSpacePointMeasure {
        TimeSpacePointMeasure::new(vec![(0.5, u / 2.0), (0.5, 2.0 * u)]).unwrap()
    }

    #[test]
    fn build_nn_example() {
        let m = TimeSpacePointMeasure::build_nn(&[1.0, -2.0], 2.0).unwrap();
        assert_eq!(m.atoms(), &[(0.5, 0.5), (1.0, -1.0)]);
        assert!(TimeSpacePointMeasure::build_nn(&[0.0, 0.0], 1.0).unwrap().is_empty());
        assert!(TimeSpacePointMeasure::build_nn(&[1.0], 0.0).is_err());
    }

    #[test]
    fn rejects_bad_atoms() {
        assert!(TimeSpacePointMeasure::new(vec![(1.2, 1.0)]).is_err());
        assert!(TimeSpacePointMeasure::new(vec![(0.5, 0.0)]).is_err());
        assert!(TimeSpacePointMeasure::new(vec![(0.5, f64::INFINITY)]).is_err());
    }

    #[test]
    fn functional_on_merging_atoms() {
        let p = eta_n(1.0, 10).sum_max_functional(1.0).unwrap();
        let (sum, max) = (p.component(0).unwrap(), p.component(1).unwrap());
        for (t, s, m) in
            [(0.0, 0.0, 0.0), (0.39, 0.0, 0.0), (0.4, 0.0, 0.5), (0.45, 0.0, 0.5), (0.5, 2.0, 2.0), (1.0, 2.0, 2.0)]
        {
            assert_eq!(sum.eval_scalar(t).unwrap(), s, "sum at {t}");
            assert_eq!(max.eval_scalar(t).unwrap(), m, "max at {t}");
        }
    }

    #[test]
    fn empty_measure_gives_zero_path() {
        let p = TimeSpacePointMeasure::empty().sum_max_functional(1.0).unwrap();
        assert_eq!(p, CadlagPath::zero(2).unwrap());
    }

    #[test]
    fn negative_atom() {
        let p = TimeSpacePointMeasure::new(vec![(0.3, -5.0)]).unwrap().sum_max_functional(1.0).unwrap();
        assert_eq!(p.eval(0.2).unwrap(), &[0.0, 0.0]);
        assert_eq!(p.eval(0.3).unwrap(), &[-5.0, 0.0]);
    }

    #[test]
    fn simultaneous_atoms_make_one_jump() {
        let p = eta(1.0).sum_max_functional(1.0).unwrap();
        assert_eq!(p.num_jumps(), 1);
        assert_eq!(p.final_value(), &[2.0, 2.0]);
    }

    #[test]
    fn atoms_at_zero_fold_into_initial_value() {
        let p = TimeSpacePointMeasure::new(vec![(0.0, 3.0), (0.5, 1.0)]).unwrap().sum_max_functional(0.5).unwrap();
        assert_eq!(p.initial_value(), &[3.0, 3.0]);
        assert_eq!(p.final_value(), &[4.0, 3.0]);
    }

    #[test]
    fn strict_truncation() {
        let p = TimeSpacePointMeasure::new(vec![(0.5, 1.0)]).unwrap().sum_max_functional(1.0).unwrap();
        assert_eq!(p.final_value(), &[0.0, 1.0]);
    }

    #[test]
    fn lambda_cases() {
        assert_eq!(eta(1.0).lambda_membership(1.0), LambdaStatus::InLambda);
        let at_zero = TimeSpacePointMeasure::new(vec![(0.0, 2.0)]).unwrap();
        assert_eq!(at_zero.lambda_membership(1.0), LambdaStatus::ViolatesLambda1);
        let on_level = TimeSpacePointMeasure::new(vec![(0.4, -1.0)]).unwrap();
        assert_eq!(on_level.lambda_membership(1.0), LambdaStatus::ViolatesLambda1);
        let opposite = TimeSpacePointMeasure::new(vec![(0.5, 2.0), (0.5, -2.0)]).unwrap();
        assert_eq!(opposite.lambda_membership(1.0), LambdaStatus::ViolatesLambda2);
    }

    #[test]
    fn counting() {
        let m = TimeSpacePointMeasure::new(vec![(0.2, 3.0), (0.7, 0.5)]).unwrap();
        assert_eq!(m.restrict_count(0.0..=1.0, 1.0..), 1);
        assert_eq!(m.restrict_count(.., ..), 2);
        assert_eq!(TimeSpacePointMeasure::empty().restrict_count(.., ..), 0);
    }

    #[test]
    fn json_shape() {
        let m = TimeSpacePointMeasure::new(vec![(0.2, 3.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"atoms":[[0.2,3.0]]}"#);
        let back: TimeSpacePointMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<TimeSpacePointMeasure>(r#"{"atoms":[[2.0,1.0]]}"#).is_err());
    }

    #[test]
    fn weak_convergence_but_strong_gap() {
        for u in [1.0, 2.0] {
            let limit = eta(u).sum_max_functional(u).unwrap();
            let opts = M1Options::default();
            let mut previous = f64::INFINITY;
            for n in 3..=50 {
                let approx = eta_n(u, n).sum_max_functional(u).unwrap();
                let weak = wm1_distance(&approx, &limit, &opts).unwrap();
                assert!(weak.value <= previous + 1e-9);
                previous = weak.value;
                let strong = m1_distance(&approx, &limit, &opts).unwrap();
                // the difference map doubles max-norm errors, so the gap is at least u/4
                assert!(strong.lower >= u / 4.0 - 1e-9, "n={n}: {strong:?}");
                if n >= 4 {
                    assert!(strong.upper <= u / 4.0 + 1e-9, "n={n}: {strong:?}");
                }
            }
            assert!(previous <= 0.05 * u);
        }
    }

    #[test]
    fn continuity_under_small_perturbations() {
        let base = vec![(0.2, 3.0), (0.45, -2.5), (0.45, 0.4), (0.8, 1.7)];
        let u = 1.0;
        let eta = TimeSpacePointMeasure::new(base.clone()).unwrap();
        assert_eq!(eta.lambda_membership(u), LambdaStatus::InLambda);
        let limit = eta.sum_max_functional(u).unwrap();
        let mut last = f64::INFINITY;
        for k in [10usize, 100, 1000] {
            let h = 1.0 / k as f64;
            let moved = base
                .iter()
                .enumerate()
                .map(|(i, &(t, x))| {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    (t + sign * h * 0.5, x + sign * h * 0.1)
                })
                .collect();
            let approx = TimeSpacePointMeasure::new(moved).unwrap().sum_max_functional(u).unwrap();
            let d = wm1_distance(&approx, &limit, &M1Options::default()).unwrap();
            assert!(d.value < last);
            last = d.value;
        }
        assert!(last < 1e-2);
    }
}
