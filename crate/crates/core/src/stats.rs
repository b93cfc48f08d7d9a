//! Goodness-of-fit and summary statistics used by the experiments.

use crate::error::{Error, Result};

fn sorted(sample: &[f64]) -> Vec<f64> {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Fraction of `sorted` that is `<= x`.
pub fn ecdf(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64
}

/// `sup_x |F_n(x) - F(x)|` for a continuous reference CDF.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let s = sorted(sample);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Sup of `|F_a - F_b|` over a `grid x grid` lattice of joint CDF evaluation
/// points placed at the `(k - 1/2)/grid` quantiles of the reference sample `b`.
pub fn joint_cdf_grid_sup(a: &[(f64, f64)], b: &[(f64, f64)], grid: usize) -> f64 {
    let quantiles = |coord: fn(&(f64, f64)) -> f64| {
        let s = sorted(&b.iter().map(coord).collect::<Vec<_>>());
        (1..=grid).map(|k| quantile_sorted(&s, (k as f64 - 0.5) / grid as f64)).collect::<Vec<_>>()
    };
    let (xs, ys) = (quantiles(|p| p.0), quantiles(|p| p.1));
    let joint = |sample: &[(f64, f64)], x: f64, y: f64| {
        sample.iter().filter(|p| p.0 <= x && p.1 <= y).count() as f64 / sample.len() as f64
    };
    let mut worst = 0.0f64;
    for &x in &xs {
        for &y in &ys {
            worst = worst.max((joint(a, x, y) - joint(b, x, y)).abs());
        }
    }
    worst
}

/// Linear-interpolation quantile of an already sorted sample.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantile(sample: &[f64], p: f64) -> f64 {
    quantile_sorted(&sorted(sample), p)
}

pub fn median(sample: &[f64]) -> f64 {
    quantile(sample, 0.5)
}

pub fn mean(sample: &[f64]) -> f64 {
    sample.iter().sum::<f64>() / sample.len() as f64
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn ranks(sample: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..sample.len()).collect();
    order.sort_by(|&i, &j| sample[i].total_cmp(&sample[j]));
    let mut out = vec![0.0; sample.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && sample[order[end]] == sample[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            out[i] = rank;
        }
        start = end;
    }
    out
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    sxy / (sxx * syy).sqrt()
}

/// Spearman rank correlation.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

/// Hill estimate of the tail index from the `k` largest values.
pub fn hill(sample: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k >= sample.len() {
        return Err(Error::InsufficientData(format!("Hill needs 0 < k < n, got k={k}, n={}", sample.len())));
    }
    let mut s = sorted(sample);
    s.reverse();
    let threshold = s[k];
    if !(threshold > 0.0) {
        return Err(Error::InsufficientData("Hill threshold must be positive".into()));
    }
    let mean_log = s[..k].iter().map(|x| (x / threshold).ln()).sum::<f64>() / k as f64;
    Ok(1.0 / mean_log)
}

/// Energy distance between two samples in `R^d` (rows of `dim` values) after
/// mapping each coordinate through `x / (1 + |x|)`. The bounded transform keeps
/// the statistic finite for laws without a first moment. At most `max_points`
/// leading rows of each sample are used.
pub fn energy_distance_bounded(a: &[f64], b: &[f64], dim: usize, max_points: usize) -> f64 {
    let prep = |s: &[f64]| -> Vec<f64> { s.iter().take(max_points * dim).map(|x| x / (1.0 + x.abs())).collect() };
    let (a, b) = (prep(a), prep(b));
    let mean_dist = |p: &[f64], q: &[f64]| {
        let mut total = 0.0;
        for x in p.chunks_exact(dim) {
            for y in q.chunks_exact(dim) {
                total += x.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
            }
        }
        total / ((p.len() / dim) * (q.len() / dim)) as f64
    };
    2.0 * mean_dist(&a, &b) - mean_dist(&a, &a) - mean_dist(&b, &b)
}

/// Standard error of a Bernoulli proportion.
pub fn proportion_stderr(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
