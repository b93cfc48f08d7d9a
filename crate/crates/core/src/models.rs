//! Fréchet innovations, finite-order moving maxima and the coupled
//! sum/maximum processes built from them.

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cadlag::{grid_times, CadlagPath, CompensatedSum, SampleRule};
use crate::error::{Error, Result};
use crate::rng::{replica_rng, ReplicaRng};

/// `X_k = max_i c_i Z_{k-i}` with i.i.d. standard Fréchet(`alpha`) innovations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelJson", into = "ModelJson")]
pub struct MovingMaximaModel {
    alpha: f64,
    coefficients: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    alpha: f64,
    coefficients: Vec<f64>,
}

impl TryFrom<ModelJson> for MovingMaximaModel {
    type Error = Error;
    fn try_from(j: ModelJson) -> Result<Self> {
        Self::new(j.alpha, j.coefficients)
    }
}

impl From<MovingMaximaModel> for ModelJson {
    fn from(m: MovingMaximaModel) -> Self {
        ModelJson { alpha: m.alpha, coefficients: m.coefficients }
    }
}

impl MovingMaximaModel {
    /// `coefficients` are `c_0..c_m`; the first and last must be positive.
    pub fn new(alpha: f64, coefficients: Vec<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!("tail index must lie in (0, 1), got {alpha}")));
        }
        let (first, last) = match (coefficients.first(), coefficients.last()) {
            (Some(&f), Some(&l)) => (f, l),
            _ => return Err(Error::domain("at least one coefficient is required")),
        };
        if coefficients.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::domain("coefficients must be finite and nonnegative"));
        }
        if !(first > 0.0 && last > 0.0) {
            return Err(Error::domain("the first and last coefficients must be positive"));
        }
        Ok(Self { alpha, coefficients })
    }

    /// The i.i.d. model `X_k = Z_k`.
    pub fn iid(alpha: f64) -> Result<Self> {
        Self::new(alpha, vec![1.0])
    }

    /// `X_k = Z_k ∨ Z_{k-1}`.
    pub fn mm11(alpha: f64) -> Result<Self> {
        Self::new(alpha, vec![1.0, 1.0])
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `sum_i c_i^alpha`, the tail weight of the marginal: `P(X_1 > x) ~ weight * x^-alpha`.
    pub fn tail_weight(&self) -> f64 {
        self.coefficients.iter().map(|c| c.powf(self.alpha)).sum()
    }

    /// Fills `out` with `X_1..X_n`, drawing `Z_{1-m}..Z_n` into `innovations`.
    pub fn sample_into(&self, rng: &mut impl Rng, n: usize, innovations: &mut Vec<f64>, out: &mut Vec<f64>) {
        let m = self.order();
        let sampler = FrechetSampler::new(self.alpha);
        innovations.clear();
        innovations.extend((0..n + m).map(|_| sampler.sample(rng)));
        out.clear();
        if m == 0 {
            let c = self.coefficients[0];
            out.extend(innovations.iter().map(|z| c * z));
            return;
        }
        // innovations[k + m - i] holds Z_{k+1-i} for output index k
        out.extend((0..n).map(|k| {
            self.coefficients.iter().enumerate().map(|(i, c)| c * innovations[k + m - i]).fold(0.0, f64::max)
        }));
    }
}

/// Inverse-CDF sampler for the standard Fréchet law `P(Z <= x) = exp(-x^-alpha)`.
#[derive(Debug, Clone, Copy)]
pub struct FrechetSampler {
    neg_inv_alpha: f64,
    // `-1/alpha` when it is an integer, which allows `powi`
    integer_power: Option<i32>,
}

impl FrechetSampler {
    pub fn new(alpha: f64) -> Self {
        let p = -1.0 / alpha;
        let rounded = p.round();
        let integer_power = ((p - rounded).abs() < 1e-12 && rounded.abs() <= 64.0).then_some(rounded as i32);
        Self { neg_inv_alpha: p, integer_power }
    }

    /// `(-ln U)^(-1/alpha)`.
    pub fn transform(&self, uniform: f64) -> f64 {
        let e = -uniform.ln();
        match self.integer_power {
            Some(k) => e.powi(k),
            None => e.powf(self.neg_inv_alpha),
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        self.transform(rng.sample::<f64, _>(Open01))
    }
}

/// `count` i.i.d. standard Fréchet(`alpha`) draws from the stream seeded by `seed`.
pub fn frechet_sample(alpha: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("Fréchet shape must be positive, got {alpha}")));
    }
    let sampler = FrechetSampler::new(alpha);
    let mut rng = replica_rng(seed, 0);
    Ok((0..count).map(|_| sampler.sample(&mut rng)).collect())
}

pub fn moving_maxima_sequence(model: &MovingMaximaModel, n: usize, seed: u64) -> Vec<f64> {
    let mut rng: ReplicaRng = replica_rng(seed, 0);
    let (mut z, mut x) = (Vec::new(), Vec::new());
    model.sample_into(&mut rng, n, &mut z, &mut x);
    x
}

/// `P(X_1 > x) = 1 - exp(-(sum_i c_i^alpha) x^-alpha)`.
pub fn marginal_tail(model: &MovingMaximaModel, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("tail argument must be positive, got {x}")));
    }
    Ok(-(-model.tail_weight() * x.powf(-model.alpha)).exp_m1())
}

/// Which tail the norming constants are matched to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormingMode {
    /// `n P(X_1 > a_n) = 1`.
    #[default]
    #[serde(rename = "marginal")]
    ByMarginal,
    /// `n P(Z_1 > a_n) = 1`.
    #[serde(rename = "innovation")]
    ByInnovation,
}

impl NormingMode {
    /// Multiplier of `x^-alpha` in the limiting tail of `X_1 / a_n`:
    /// `1` for marginal norming, `sum_i c_i^alpha` for innovation norming.
    pub fn tail_scale(self, model: &MovingMaximaModel) -> f64 {
        match self {
            NormingMode::ByMarginal => 1.0,
            NormingMode::ByInnovation => model.tail_weight(),
        }
    }

    /// Factor by which limit marks are stretched under this norming, `tail_scale^(1/alpha)`.
    pub fn mark_scale(self, model: &MovingMaximaModel) -> f64 {
        self.tail_scale(model).powf(1.0 / model.alpha)
    }
}

/// Norming constant `a_n`, solving the defining tail equation exactly.
pub fn norming(model: &MovingMaximaModel, n: usize, mode: NormingMode) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("norming needs n >= 2"));
    }
    let weight = match mode {
        NormingMode::ByMarginal => model.tail_weight(),
        NormingMode::ByInnovation => 1.0,
    };
    let log_keep = (-1.0 / n as f64).ln_1p();
    Ok((-weight / log_keep).powf(1.0 / model.alpha))
}

fn check_norming(a_n: f64) -> Result<()> {
    if !(a_n > 0.0) || !a_n.is_finite() {
        return Err(Error::domain(format!("norming constant must be positive, got {a_n}")));
    }
    Ok(())
}

/// `L_n = (V_n, W_n)`: normalised partial sums and partial maxima floored at 0.
pub fn partial_processes(sample: &[f64], a_n: f64) -> Result<CadlagPath> {
    truncated_process(sample, a_n, 0.0)
}

/// `L_n^(u)`: as [`partial_processes`] but the sum keeps only terms with `|X_i|/a_n > u`.
/// `u = 0` disables truncation.
pub fn truncated_process(sample: &[f64], a_n: f64, u: f64) -> Result<CadlagPath> {
    check_norming(a_n)?;
    if !(u >= 0.0) {
        return Err(Error::domain(format!("truncation level must be nonnegative, got {u}")));
    }
    let mut rows = Vec::with_capacity(2 * sample.len());
    for &x in sample {
        let scaled = x / a_n;
        rows.push(if scaled.abs() > u { scaled } else { 0.0 });
        rows.push(scaled);
    }
    let sums = CadlagPath::from_samples(2, &rows, SampleRule::CumulativeSum)?;
    let maxima = CadlagPath::from_samples(2, &rows, SampleRule::RunningMax)?;
    CadlagPath::stack(&[&sums.component(0)?, &maxima.component(1)?])
}

/// `G_n = V_n - 2 W_n`, built in one pass.
pub fn gn_path(sample: &[f64], a_n: f64) -> Result<CadlagPath> {
    check_norming(a_n)?;
    if sample.is_empty() {
        return Err(Error::domain("cannot build a path from an empty sample"));
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("samples must be finite"));
    }
    let mut sum = CompensatedSum::default();
    let mut max = 0.0f64;
    let values = sample
        .iter()
        .map(|&x| {
            let s = x / a_n;
            sum.add(s);
            max = max.max(s);
            sum.value() - 2.0 * max
        })
        .collect();
    Ok(CadlagPath::from_parts_unchecked(1, vec![0.0], grid_times(sample.len()), values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_validation() {
        assert!(MovingMaximaModel::new(1.0, vec![1.0]).is_err());
        assert!(MovingMaximaModel::new(0.5, vec![]).is_err());
        assert!(MovingMaximaModel::new(0.5, vec![1.0, 0.0]).is_err());
        assert!(MovingMaximaModel::new(0.5, vec![0.0, 1.0]).is_err());
        assert!(MovingMaximaModel::new(0.5, vec![1.0, -1.0, 1.0]).is_err());
        let m = MovingMaximaModel::new(0.5, vec![1.0, 0.0, 2.0]).unwrap();
        assert_eq!(m.order(), 2);
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<MovingMaximaModel>(&json).unwrap(), m);
        assert!(serde_json::from_str::<MovingMaximaModel>(r#"{"alpha":1.5,"coefficients":[1]}"#).is_err());
    }

    #[test]
    fn inverse_cdf_fixed_point() {
        let u = (-1.0f64).exp();
        for alpha in [0.3, 0.5, 0.8, 1.0, 1.7] {
            assert!((FrechetSampler::new(alpha).transform(u) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn integer_power_fast_path_agrees() {
        let fast = FrechetSampler::new(0.5);
        assert_eq!(fast.integer_power, Some(-2));
        for u in [0.01, 0.3, 0.77, 0.999] {
            let slow = (-f64::ln(u)).powf(-2.0);
            assert!((fast.transform(u) - slow).abs() <= 1e-12 * slow);
        }
        assert_eq!(FrechetSampler::new(0.3).integer_power, None);
    }

    #[test]
    fn frechet_cdf_at_one() {
        let z = frechet_sample(0.5, 1_000_000, 11).unwrap();
        assert!(z.iter().all(|&v| v > 0.0));
        let p = z.iter().filter(|&&v| v <= 1.0).count() as f64 / z.len() as f64;
        assert!((p - (-1.0f64).exp()).abs() < 0.002, "{p}");
    }

    #[test]
    fn iid_and_mm11_structure() {
        let iid = MovingMaximaModel::iid(0.5).unwrap();
        let mut rng = replica_rng(5, 0);
        let (mut z, mut x) = (Vec::new(), Vec::new());
        iid.sample_into(&mut rng, 100, &mut z, &mut x);
        assert_eq!(x, z);

        let mm = MovingMaximaModel::mm11(0.5).unwrap();
        let mut rng = replica_rng(5, 1);
        mm.sample_into(&mut rng, 1000, &mut z, &mut x);
        assert_eq!(z.len(), 1001);
        for k in 0..1000 {
            assert_eq!(x[k], z[k + 1].max(z[k]));
        }
        assert!(x.windows(2).any(|w| w[0] == w[1]));
    }

    #[test]
    fn marginal_tail_closed_form() {
        let mm = MovingMaximaModel::mm11(0.5).unwrap();
        assert!((marginal_tail(&mm, 4.0).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!(marginal_tail(&mm, 1e300).unwrap() < 1e-149);
        let iid = MovingMaximaModel::iid(0.7).unwrap();
        let x = 3.0f64;
        assert!((marginal_tail(&iid, x).unwrap() - (1.0 - (-x.powf(-0.7)).exp())).abs() < 1e-15);
        assert!(marginal_tail(&mm, 0.0).is_err());
    }

    #[test]
    fn marginal_frequencies_match_closed_form() {
        let mm = MovingMaximaModel::mm11(0.5).unwrap();
        let reps = 1_000_000;
        let x1: Vec<f64> = (0..reps)
            .map(|r| {
                let mut rng = replica_rng(99, r as u64);
                let (mut z, mut x) = (Vec::new(), Vec::new());
                mm.sample_into(&mut rng, 1, &mut z, &mut x);
                x[0]
            })
            .collect();
        for level in [1.0, 4.0, 10.0] {
            let p = marginal_tail(&mm, level).unwrap();
            let hat = x1.iter().filter(|&&v| v > level).count() as f64 / reps as f64;
            let se = (p * (1.0 - p) / reps as f64).sqrt();
            assert!((hat - p).abs() <= 3.0 * se, "x={level}: {hat} vs {p}");
        }
        let p10 = marginal_tail(&mm, 10.0).unwrap();
        // 1 - exp(-2 / sqrt(10)), frozen from an independent evaluation
        assert!((p10 - 0.468_714_390_867_032).abs() < 1e-12);
    }

    #[test]
    fn norming_constants() {
        let mm = MovingMaximaModel::mm11(0.5).unwrap();
        let n = 10_000;
        let inn = norming(&mm, n, NormingMode::ByInnovation).unwrap();
        let expected = (1.0 / -(1.0f64 - 1e-4).ln()).powi(2);
        assert!((inn / expected - 1.0).abs() < 1e-12);
        assert!((inn / 9.999e7 - 1.0).abs() < 1e-4);
        let mar = norming(&mm, n, NormingMode::ByMarginal).unwrap();
        assert!((mar / inn - 4.0).abs() < 1e-12);
        for model in [mm.clone(), MovingMaximaModel::new(0.3, vec![0.5, 2.0, 1.0]).unwrap()] {
            for n in [2usize, 10, 1000, 1_000_000] {
                let a = norming(&model, n, NormingMode::ByMarginal).unwrap();
                let lhs = n as f64 * marginal_tail(&model, a).unwrap();
                assert!((lhs - 1.0).abs() < 1e-12, "{lhs}");
            }
        }
        assert!(norming(&mm, 1, NormingMode::ByMarginal).is_err());
    }

    #[test]
    fn mark_scale_matches_norming_ratio() {
        let m = MovingMaximaModel::new(0.4, vec![1.0, 0.3, 2.0]).unwrap();
        let ratio =
            norming(&m, 5000, NormingMode::ByMarginal).unwrap() / norming(&m, 5000, NormingMode::ByInnovation).unwrap();
        assert!((ratio / NormingMode::ByInnovation.mark_scale(&m) - 1.0).abs() < 1e-12);
        assert_eq!(NormingMode::ByMarginal.mark_scale(&m), 1.0);
    }

    #[test]
    fn partial_process_examples() {
        let l = partial_processes(&[1.0, 2.0, 3.0], 1.0).unwrap();
        assert_eq!(l.final_value(), &[6.0, 3.0]);
        let neg = partial_processes(&[-1.0], 1.0).unwrap();
        assert_eq!(neg.component(1).unwrap(), CadlagPath::from_scalar_samples(&[0.0], SampleRule::Raw).unwrap());
        assert_eq!(neg.final_value(), &[-1.0, 0.0]);
        assert!(partial_processes(&[], 1.0).is_err());
        assert!(partial_processes(&[1.0], -1.0).is_err());
    }

    #[test]
    fn partial_sum_at_one_is_plain_sum() {
        let sample = moving_maxima_sequence(&MovingMaximaModel::mm11(0.5).unwrap(), 1000, 3);
        let a = 7.5;
        let l = partial_processes(&sample, a).unwrap();
        let direct: f64 = sample.iter().map(|x| x / a).sum();
        assert!((l.eval(1.0).unwrap()[0] / direct - 1.0).abs() < 1e-12);
        assert!(l.component(0).unwrap().is_nondecreasing());
    }

    #[test]
    fn truncated_process_examples() {
        let l = truncated_process(&[3.0, 0.1, 5.0], 1.0, 1.0).unwrap();
        let v = l.component(0).unwrap();
        assert_eq!(v.eval_scalar(1.0 / 3.0).unwrap(), 3.0);
        assert_eq!(v.eval_scalar(2.0 / 3.0).unwrap(), 3.0);
        assert_eq!(v.eval_scalar(1.0).unwrap(), 8.0);
        let high = truncated_process(&[3.0, 0.1, 5.0], 1.0, 10.0).unwrap();
        assert!(high.component(0).unwrap().compress().num_jumps() == 0);
        let none = truncated_process(&[3.0, 0.1, 5.0], 1.0, 0.0).unwrap();
        assert_eq!(none, partial_processes(&[3.0, 0.1, 5.0], 1.0).unwrap());
    }

    #[test]
    fn gn_matches_linear_combination() {
        let g = gn_path(&[1.0, 2.0], 1.0).unwrap();
        assert_eq!(g.eval_scalar(0.0).unwrap(), 0.0);
        assert_eq!(g.eval_scalar(0.5).unwrap(), -1.0);
        assert_eq!(g.eval_scalar(1.0).unwrap(), -1.0);

        let sample = moving_maxima_sequence(&MovingMaximaModel::mm11(0.5).unwrap(), 500, 8);
        let l = partial_processes(&sample, 3.0).unwrap();
        let combined =
            CadlagPath::linear_combination(&[&l.component(0).unwrap(), &l.component(1).unwrap()], &[1.0, -2.0])
                .unwrap();
        assert!(gn_path(&sample, 3.0).unwrap().uniform_distance(&combined).unwrap() < 1e-9);
    }

    #[test]
    fn stationarity_smoke() {
        let model = MovingMaximaModel::new(0.5, vec![1.0, 0.5, 2.0]).unwrap();
        let reps = 100_000;
        let (first, later): (Vec<f64>, Vec<f64>) = (0..reps)
            .map(|r| {
                let mut rng = replica_rng(1234, r as u64);
                let (mut z, mut x) = (Vec::new(), Vec::new());
                model.sample_into(&mut rng, 6, &mut z, &mut x);
                (x[0], x[5])
            })
            .unzip();
        let ks = crate::stats::ks_two_sample(&first, &later);
        assert!(ks <= 0.01, "{ks}");
    }

    #[test]
    fn lag_beyond_order_is_tail_independent() {
        let model = MovingMaximaModel::mm11(0.5).unwrap();
        let reps = 1_000_000;
        let lag = model.order() + 1;
        let pairs: Vec<(f64, f64)> = (0..reps)
            .map(|r| {
                let mut rng = replica_rng(77, r as u64);
                let (mut z, mut x) = (Vec::new(), Vec::new());
                model.sample_into(&mut rng, lag + 1, &mut z, &mut x);
                (x[0], x[lag])
            })
            .collect();
        // 90th percentile of the marginal, from the closed form
        let q = (-model.tail_weight() / (0.9f64).ln()).powf(1.0 / model.alpha());
        let p = pairs.iter().filter(|(a, _)| *a > q).count() as f64 / reps as f64;
        let joint = pairs.iter().filter(|(a, b)| *a > q && *b > q).count() as f64 / reps as f64;
        let ratio = joint / (p * p);
        assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
    }
}
