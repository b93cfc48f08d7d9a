//! Empirical counterparts of the limit constants.

use serde::Serialize;

use super::ClusterMarkSample;
use crate::error::{Error, Result};
use crate::models::{norming, MovingMaximaModel, NormingMode};
use crate::par::map_replicas;
use crate::rng::replica_rng;

/// Normalised clusters from blocks of length `block_len` whose largest
/// absolute value exceeds `u a_n` (marginal norming), pooled over `reps`
/// independent sequences of length `n`. Each cluster is divided by its largest
/// absolute value, giving `(sum, max ∨ 0)` of the normalised block.
pub fn empirical_cluster_marks(
    model: &MovingMaximaModel,
    n: usize,
    block_len: usize,
    u: f64,
    reps: usize,
    seed: u64,
) -> Result<Vec<ClusterMarkSample>> {
    if block_len == 0 || block_len > n {
        return Err(Error::domain(format!("block length {block_len} must lie in 1..={n}")));
    }
    if !(u > 0.0) {
        return Err(Error::domain(format!("threshold must be positive, got {u}")));
    }
    let level = u * norming(model, n, NormingMode::ByMarginal)?;
    let per_rep = map_replicas(reps, |rep| {
        let mut rng = replica_rng(seed, rep as u64);
        let (mut z, mut x) = (Vec::new(), Vec::new());
        model.sample_into(&mut rng, n, &mut z, &mut x);
        x.chunks(block_len)
            .filter_map(|block| {
                let scale = block.iter().map(|v| v.abs()).fold(0.0, f64::max);
                (scale > level).then(|| ClusterMarkSample {
                    sum: block.iter().sum::<f64>() / scale,
                    max: block.iter().cloned().fold(0.0, f64::max) / scale,
                })
            })
            .collect::<Vec<_>>()
    });
    let marks: Vec<ClusterMarkSample> = per_rep.into_iter().flatten().collect();
    if marks.is_empty() {
        return Err(Error::InsufficientData("no block exceeded the threshold; lower it or add replicas".into()));
    }
    Ok(marks)
}

/// Blocks estimator of the extremal index with the logarithmic correction,
/// `ln(1 - K/k) / (r ln(1 - N/n))`, where `k` blocks of length `r` contain
/// `K` blocks with an exceedance of `threshold` and `N` exceedances overall.
/// The estimate is capped at 1.
pub fn blocks_extremal_index_estimator(sample: &[f64], threshold: f64, block_len: usize) -> Result<f64> {
    if block_len == 0 || block_len > sample.len() {
        return Err(Error::domain(format!("block length {block_len} must lie in 1..={}", sample.len())));
    }
    let blocks = sample.len() / block_len;
    let used = &sample[..blocks * block_len];
    let exceedances = used.iter().filter(|&&x| x > threshold).count();
    let hit_blocks = used.chunks_exact(block_len).filter(|b| b.iter().any(|&x| x > threshold)).count();
    if exceedances == 0 {
        return Err(Error::InsufficientData("no exceedances of the threshold".into()));
    }
    if hit_blocks == blocks {
        return Err(Error::InsufficientData("every block exceeds the threshold; raise it".into()));
    }
    let numerator = (-(hit_blocks as f64) / blocks as f64).ln_1p();
    let denominator = block_len as f64 * (-(exceedances as f64) / used.len() as f64).ln_1p();
    Ok((numerator / denominator).min(1.0))
}

/// Conditional samples of `(X_0, .., X_L)` given `X_0 > threshold`.
#[derive(Debug, Clone, Serialize)]
pub struct TailProcessSample {
    pub threshold: f64,
    pub events: usize,
    pub reps: usize,
    /// `scaled[l]` holds `X_l / threshold` for every conditioning event.
    pub scaled: Vec<Vec<f64>>,
    /// `ratios[l]` holds `X_l / X_0`.
    pub ratios: Vec<Vec<f64>>,
}

impl TailProcessSample {
    /// Fraction of events with `X_lag / X_0` in `(lo, hi]`.
    pub fn ratio_fraction(&self, lag: usize, lo: f64, hi: f64) -> f64 {
        let r = &self.ratios[lag];
        r.iter().filter(|&&v| v > lo && v <= hi).count() as f64 / r.len() as f64
    }
}

/// Empirical tail process at lags `0..=max_lag` from `reps` independent stretches.
pub fn empirical_tail_process(
    model: &MovingMaximaModel,
    threshold: f64,
    max_lag: usize,
    reps: usize,
    seed: u64,
) -> Result<TailProcessSample> {
    if !(threshold > 0.0) {
        return Err(Error::domain(format!("threshold must be positive, got {threshold}")));
    }
    let hits: Vec<Vec<f64>> = map_replicas(reps, |rep| {
        let mut rng = replica_rng(seed, rep as u64);
        let (mut z, mut x) = (Vec::new(), Vec::new());
        model.sample_into(&mut rng, max_lag + 1, &mut z, &mut x);
        (x[0] > threshold).then_some(x)
    })
    .into_iter()
    .flatten()
    .collect();
    if hits.is_empty() {
        return Err(Error::InsufficientData("no conditioning events; lower the threshold".into()));
    }
    let per_lag = |f: &dyn Fn(&[f64], usize) -> f64| -> Vec<Vec<f64>> {
        (0..=max_lag).map(|l| hits.iter().map(|x| f(x, l)).collect()).collect()
    };
    Ok(TailProcessSample {
        threshold,
        events: hits.len(),
        reps,
        scaled: per_lag(&|x, l| x[l] / threshold),
        ratios: per_lag(&|x, l| x[l] / x[0]),
    })
}
