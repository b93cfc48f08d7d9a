//! Right-continuous step functions on `[0, 1]` with values in `R^d`.
//!
//! A [`CadlagPath`] is stored as an initial value plus one `(jump time, new
//! value)` pair per jump. Jump times are strictly increasing and lie in
//! `(0, 1]`; the path holds each value until the next jump. Consecutive equal
//! values are kept as they are so that paths built on a common grid share
//! their jump times; [`CadlagPath::compress`] removes them explicitly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// How [`CadlagPath::from_samples`] turns `X_1..X_n` into a path.
///
/// In every case the path equals `0` on `[0, 1/n)` and jumps at `k/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleRule {
    /// `X_1 + ... + X_k` at `k/n`.
    CumulativeSum,
    /// `max(0, X_1, ..., X_k)` at `k/n` (empty maximum is zero).
    RunningMax,
    /// `X_k` at `k/n`.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PathJson", into = "PathJson")]
pub struct CadlagPath {
    dim: usize,
    initial: Vec<f64>,
    jump_times: Vec<f64>,
    // row-major, one row of `dim` values per jump
    values: Vec<f64>,
}

impl CadlagPath {
    /// Builds a path from an initial value and one value row per jump time.
    pub fn new(initial: Vec<f64>, jump_times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        let dim = initial.len();
        if values.len() != jump_times.len() {
            return Err(Error::domain(format!("{} jump times but {} value rows", jump_times.len(), values.len())));
        }
        let mut flat = Vec::with_capacity(dim * values.len());
        for row in &values {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(dim, initial, jump_times, flat)
    }

    /// Builds a path from row-major flat storage, validating every invariant.
    pub fn from_flat(dim: usize, initial: Vec<f64>, jump_times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("path dimension must be positive"));
        }
        if initial.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: initial.len() });
        }
        if values.len() != dim * jump_times.len() {
            return Err(Error::domain("value storage does not match jump count"));
        }
        let mut prev = 0.0;
        for &t in &jump_times {
            if !(t > prev && t <= 1.0) {
                return Err(Error::domain(format!(
                    "jump times must be strictly increasing in (0, 1], got {t} after {prev}"
                )));
            }
            prev = t;
        }
        if initial.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::domain("path values must be finite"));
        }
        Ok(Self { dim, initial, jump_times, values })
    }

    /// Trusted constructor for internal builders that already hold the invariants.
    pub(crate) fn from_parts_unchecked(dim: usize, initial: Vec<f64>, jump_times: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert_eq!(initial.len(), dim);
        debug_assert_eq!(values.len(), dim * jump_times.len());
        debug_assert!(jump_times.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(jump_times.first().is_none_or(|&t| t > 0.0));
        debug_assert!(jump_times.last().is_none_or(|&t| t <= 1.0));
        Self { dim, initial, jump_times, values }
    }

    pub fn constant(value: Vec<f64>) -> Result<Self> {
        Self::from_flat(value.len(), value, Vec::new(), Vec::new())
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::constant(vec![0.0; dim])
    }

    /// Scalar path from `(jump time, new value)` pairs.
    pub fn scalar(initial: f64, jumps: &[(f64, f64)]) -> Result<Self> {
        let (times, values): (Vec<f64>, Vec<f64>) = jumps.iter().copied().unzip();
        Self::from_flat(1, vec![initial], times, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_jumps(&self) -> usize {
        self.jump_times.len()
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn initial_value(&self) -> &[f64] {
        &self.initial
    }

    /// Value held on the `k`-th constancy interval (`k = 0` is the initial value).
    pub fn level(&self, k: usize) -> &[f64] {
        if k == 0 {
            &self.initial
        } else {
            &self.values[(k - 1) * self.dim..k * self.dim]
        }
    }

    /// Number of constancy intervals, i.e. `num_jumps() + 1`.
    pub fn num_levels(&self) -> usize {
        self.jump_times.len() + 1
    }

    pub fn final_value(&self) -> &[f64] {
        self.level(self.num_jumps())
    }

    /// Right-continuous value `x(t)`.
    pub fn eval(&self, t: f64) -> Result<&[f64]> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::domain(format!("time {t} outside [0, 1]")));
        }
        Ok(self.level(self.jump_times.partition_point(|&s| s <= t)))
    }

    /// Left limit `x(t-)`, defined for `t` in `(0, 1]`.
    pub fn left_limit(&self, t: f64) -> Result<&[f64]> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::domain(format!("left limit undefined at time {t}")));
        }
        Ok(self.level(self.jump_times.partition_point(|&s| s < t)))
    }

    /// Scalar shorthand for [`CadlagPath::eval`].
    pub fn eval_scalar(&self, t: f64) -> Result<f64> {
        self.require_scalar()?;
        Ok(self.eval(t)?[0])
    }

    pub(crate) fn require_scalar(&self) -> Result<()> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: self.dim });
        }
        Ok(())
    }

    /// Builds the step path `t -> rule(X)_{floor(nt)}` from `n` rows of `dim`
    /// values stored row-major in `samples`.
    pub fn from_samples(dim: usize, samples: &[f64], rule: SampleRule) -> Result<Self> {
        if dim == 0 || !samples.len().is_multiple_of(dim) {
            return Err(Error::domain("sample storage is not a whole number of rows"));
        }
        let n = samples.len() / dim;
        if n == 0 {
            return Err(Error::domain("cannot build a path from an empty sample"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("samples must be finite"));
        }
        let jump_times = grid_times(n);
        let mut values = Vec::with_capacity(samples.len());
        match rule {
            SampleRule::Raw => values.extend_from_slice(samples),
            SampleRule::CumulativeSum => {
                let mut acc = vec![CompensatedSum::default(); dim];
                for row in samples.chunks_exact(dim) {
                    for (a, &x) in acc.iter_mut().zip(row) {
                        a.add(x);
                        values.push(a.value());
                    }
                }
            }
            SampleRule::RunningMax => {
                let mut acc = vec![0.0f64; dim];
                for row in samples.chunks_exact(dim) {
                    for (a, &x) in acc.iter_mut().zip(row) {
                        *a = a.max(x);
                        values.push(*a);
                    }
                }
            }
        }
        Ok(Self::from_parts_unchecked(dim, vec![0.0; dim], jump_times, values))
    }

    pub fn from_scalar_samples(samples: &[f64], rule: SampleRule) -> Result<Self> {
        Self::from_samples(1, samples, rule)
    }

    /// Scalar projection onto coordinate `j`.
    pub fn component(&self, j: usize) -> Result<Self> {
        if j >= self.dim {
            return Err(Error::domain(format!("component {j} of a {}-dimensional path", self.dim)));
        }
        let values = self.values.iter().skip(j).step_by(self.dim).copied().collect();
        Ok(Self::from_parts_unchecked(1, vec![self.initial[j]], self.jump_times.clone(), values))
    }

    /// Stacks scalar paths into one vector-valued path on the union of their jump times.
    pub fn stack(components: &[&CadlagPath]) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::domain("nothing to stack"));
        }
        for c in components {
            c.require_scalar()?;
        }
        let times = union_times(components.iter().map(|p| p.jump_times()));
        let dim = components.len();
        let initial = components.iter().map(|p| p.initial[0]).collect();
        let mut values = Vec::with_capacity(times.len() * dim);
        let mut cursors = vec![0usize; dim];
        for &t in &times {
            for (p, cur) in components.iter().zip(cursors.iter_mut()) {
                while *cur < p.jump_times.len() && p.jump_times[*cur] <= t {
                    *cur += 1;
                }
                values.push(p.level(*cur)[0]);
            }
        }
        Ok(Self::from_parts_unchecked(dim, initial, times, values))
    }

    /// Pointwise `sum_i weights[i] * paths[i]`, jumping on the union of the inputs' jump times.
    pub fn linear_combination(paths: &[&CadlagPath], weights: &[f64]) -> Result<Self> {
        if paths.is_empty() || paths.len() != weights.len() {
            return Err(Error::domain("need one weight per path and at least one path"));
        }
        let dim = paths[0].dim;
        for p in paths {
            if p.dim != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.dim });
            }
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::domain("weights must be finite"));
        }
        let combine = |levels: &mut dyn Iterator<Item = &[f64]>, out: &mut Vec<f64>| {
            let start = out.len();
            out.resize(start + dim, 0.0);
            for (level, &w) in levels.zip(weights) {
                for (o, &v) in out[start..].iter_mut().zip(level) {
                    *o += w * v;
                }
            }
        };
        let mut initial = Vec::with_capacity(dim);
        combine(&mut paths.iter().map(|p| p.initial.as_slice()), &mut initial);

        let times = union_times(paths.iter().map(|p| p.jump_times()));
        let mut values = Vec::with_capacity(times.len() * dim);
        let mut cursors = vec![0usize; paths.len()];
        for &t in &times {
            for (p, cur) in paths.iter().zip(cursors.iter_mut()) {
                while *cur < p.jump_times.len() && p.jump_times[*cur] <= t {
                    *cur += 1;
                }
            }
            combine(&mut paths.iter().zip(&cursors).map(|(p, &c)| p.level(c)), &mut values);
        }
        Ok(Self::from_parts_unchecked(dim, initial, times, values))
    }

    /// Drops jumps that do not change the value.
    pub fn compress(&self) -> Self {
        let mut times = Vec::new();
        let mut values = Vec::new();
        let mut current = self.initial.as_slice();
        for k in 0..self.num_jumps() {
            let next = self.level(k + 1);
            if next != current {
                times.push(self.jump_times[k]);
                values.extend_from_slice(next);
                current = next;
            }
        }
        Self::from_parts_unchecked(self.dim, self.initial.clone(), times, values)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_parts_unchecked(
            self.dim,
            self.initial.iter().map(|v| v * s).collect(),
            self.jump_times.clone(),
            self.values.iter().map(|v| v * s).collect(),
        )
    }

    /// `true` when every coordinate is nondecreasing in time.
    pub fn is_nondecreasing(&self) -> bool {
        (1..self.num_levels()).all(|k| self.level(k - 1).iter().zip(self.level(k)).all(|(a, b)| a <= b))
    }

    /// Uniform distance `sup_t ||x(t) - y(t)||` in the max-norm.
    pub fn uniform_distance(&self, other: &CadlagPath) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let diff = Self::linear_combination(&[self, other], &[1.0, -1.0])?;
        Ok((0..diff.num_levels()).flat_map(|k| diff.level(k).iter().map(|v| v.abs())).fold(0.0, f64::max))
    }
}

/// Jump grid `1/n, 2/n, ..., 1`.
pub(crate) fn grid_times(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (1..=n).map(|k| k as f64 / nf).collect()
}

/// Sorted union of several strictly increasing time lists.
fn union_times<'a>(lists: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut acc: Vec<f64> = Vec::new();
    for list in lists {
        if acc.as_slice() == list {
            continue;
        }
        let mut merged = Vec::with_capacity(acc.len() + list.len());
        let (mut i, mut j) = (0, 0);
        while i < acc.len() || j < list.len() {
            let next = match (acc.get(i), list.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    i += 1;
                    j += 1;
                    a
                }
                (Some(&a), Some(&b)) if a < b => {
                    i += 1;
                    a
                }
                (_, Some(&b)) => {
                    j += 1;
                    b
                }
                (Some(&a), None) => {
                    i += 1;
                    a
                }
                (None, None) => unreachable!(),
            };
            merged.push(next);
        }
        acc = merged;
    }
    acc
}

#[derive(Serialize, Deserialize)]
struct PathJson {
    dim: usize,
    t: Vec<f64>,
    v: Vec<Vec<f64>>,
    v0: Vec<f64>,
}

impl TryFrom<PathJson> for CadlagPath {
    type Error = Error;

    fn try_from(raw: PathJson) -> Result<Self> {
        let path = CadlagPath::new(raw.v0, raw.t, raw.v)?;
        if path.dim != raw.dim {
            return Err(Error::DimensionMismatch { expected: raw.dim, got: path.dim });
        }
        Ok(path)
    }
}

impl From<CadlagPath> for PathJson {
    fn from(p: CadlagPath) -> Self {
        let v = if p.dim == 0 { Vec::new() } else { p.values.chunks_exact(p.dim).map(<[f64]>::to_vec).collect() };
        PathJson { dim: p.dim, t: p.jump_times, v, v0: p.initial }
    }
}
