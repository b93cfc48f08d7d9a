use serde::{Deserialize, Serialize};

use super::{Experiment, MIN_REPS};
use crate::error::{Error, Result};
use crate::models::{MovingMaximaModel, NormingMode};

/// Settings for one experiment. Not every field is read by every experiment;
/// [`ExperimentConfig::defaults`] documents which ones matter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub alpha: f64,
    /// Moving maxima coefficients `c_0..c_m`.
    pub coefficients: Vec<f64>,
    /// Sample length (e1–e3; e4 uses it for the truncation Monte Carlo).
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub norming: NormingMode,
    /// Block length `r_n` for block-based estimators; must satisfy `r_n <= sqrt(n)`.
    pub block_len: usize,
    /// Series terms in the limit simulation (e2, e3).
    pub truncation: usize,
    /// Limit draws compared against (e2, e3).
    pub limit_reps: usize,
    /// Comparison times (e3).
    pub t_grid: Vec<f64>,
    /// Truncation levels (e4).
    pub u_levels: Vec<f64>,
    /// Tail indices for the quadrature sweep (e4).
    pub alphas: Vec<f64>,
    /// Sample lengths: quadrature sweep (e4) or oscillation ladder (e5).
    pub n_ladder: Vec<usize>,
    /// Exceedance level (e4) or oscillation level (e5).
    pub eps: f64,
    /// Truncation level of the discontinuity example (e6).
    pub u: f64,
}

/// Partial configuration from a file, the environment or flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub alpha: Option<f64>,
    pub coefficients: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub norming: Option<NormingMode>,
    pub block_len: Option<usize>,
    pub truncation: Option<usize>,
    pub limit_reps: Option<usize>,
    pub t_grid: Option<Vec<f64>>,
    pub u_levels: Option<Vec<f64>>,
    pub alphas: Option<Vec<f64>>,
    pub n_ladder: Option<Vec<usize>>,
    pub eps: Option<f64>,
    pub u: Option<f64>,
}

impl ConfigOverrides {
    /// Fields set in `other` replace those set here.
    pub fn merge(self, other: ConfigOverrides) -> Self {
        macro_rules! pick {
            ($($f:ident),*) => { ConfigOverrides { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            alpha,
            coefficients,
            n,
            reps,
            seed,
            norming,
            block_len,
            truncation,
            limit_reps,
            t_grid,
            u_levels,
            alphas,
            n_ladder,
            eps,
            u
        )
    }
}

impl ExperimentConfig {
    /// Defaults matching the reference runs of each experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let base = ExperimentConfig {
            alpha: 0.5,
            coefficients: vec![1.0, 1.0],
            n: 10_000,
            reps: 10_000,
            seed: 42,
            norming: NormingMode::ByMarginal,
            block_len: 100,
            truncation: 10_000,
            limit_reps: 100_000,
            t_grid: vec![0.5, 1.0],
            u_levels: vec![0.1, 0.25, 0.5, 1.0],
            alphas: vec![0.3, 0.5, 0.8],
            n_ladder: vec![10_000, 1_000_000],
            eps: 1.0,
            u: 1.0,
        };
        match experiment {
            Experiment::E1 | Experiment::E2 | Experiment::E3 | Experiment::E6 => base,
            Experiment::E4 => ExperimentConfig { n: 100_000, reps: 1_000, block_len: 300, ..base },
            Experiment::E5 => ExperimentConfig {
                n: 100_000,
                reps: 100_000,
                norming: NormingMode::ByInnovation,
                block_len: 300,
                n_ladder: vec![1_000, 10_000, 100_000],
                eps: 100.0,
                ..base
            },
        }
    }

    pub fn with_overrides(mut self, o: ConfigOverrides) -> Self {
        macro_rules! apply {
            ($($f:ident),*) => { $(if let Some(v) = o.$f { self.$f = v; })* };
        }
        apply!(
            alpha,
            coefficients,
            n,
            reps,
            seed,
            norming,
            block_len,
            truncation,
            limit_reps,
            t_grid,
            u_levels,
            alphas,
            n_ladder,
            eps,
            u
        );
        self
    }

    pub fn model(&self) -> Result<MovingMaximaModel> {
        MovingMaximaModel::new(self.alpha, self.coefficients.clone()).map_err(|e| Error::Config(e.to_string()))
    }

    /// `true` when a distributional comparison would rest on too few replicas.
    pub fn insufficient_sample(&self) -> bool {
        self.reps < MIN_REPS
    }

    pub fn validate(&self, experiment: Experiment) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.model()?;
        if experiment == Experiment::E6 {
            return if self.u > 0.0 { Ok(()) } else { bad(format!("u must be positive, got {}", self.u)) };
        }
        if self.reps == 0 {
            return bad("reps must be at least 1".into());
        }
        if self.n < 1_000 {
            return bad(format!("n must be at least 1000, got {}", self.n));
        }
        if self.block_len == 0 || (self.block_len as f64) > (self.n as f64).sqrt() {
            return bad(format!("block length {} must lie in 1..=sqrt(n)", self.block_len));
        }
        match experiment {
            Experiment::E2 | Experiment::E3 => {
                if self.truncation == 0 || self.limit_reps == 0 {
                    return bad("truncation and limit_reps must be positive".into());
                }
                if self.t_grid.is_empty() || self.t_grid.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
                    return bad("t_grid entries must lie in (0, 1]".into());
                }
            }
            Experiment::E4 => {
                if self.norming != NormingMode::ByMarginal {
                    return bad("e4 is defined for marginal norming".into());
                }
                if self.u_levels.is_empty() || self.u_levels.iter().any(|u| !(*u > 0.0)) {
                    return bad("u_levels must be positive".into());
                }
                if self.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
                    return bad("alphas must lie in (0, 1)".into());
                }
                if self.n_ladder.is_empty() || self.n_ladder.iter().any(|&n| n < 2) {
                    return bad("n_ladder entries must be at least 2".into());
                }
                if !(self.eps > 0.0) {
                    return bad("eps must be positive".into());
                }
            }
            Experiment::E5 => {
                if self.norming != NormingMode::ByInnovation {
                    return bad("e5 uses innovation norming, under which its lower bound is stated".into());
                }
                if self.n_ladder.is_empty() || self.n_ladder.iter().any(|&n| n < 1_000) {
                    return bad("n_ladder entries must be at least 1000".into());
                }
                if !(self.eps > 0.0) {
                    return bad("eps must be positive".into());
                }
            }
            Experiment::E1 | Experiment::E6 => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_take_precedence() {
        let file = ConfigOverrides { seed: Some(1), n: Some(5000), ..Default::default() };
        let flags = ConfigOverrides { seed: Some(2), ..Default::default() };
        let merged = file.merge(flags);
        let c = ExperimentConfig::defaults(Experiment::E1).with_overrides(merged);
        assert_eq!((c.seed, c.n, c.reps), (2, 5000, 10_000));
    }

    #[test]
    fn validation() {
        let ok = ExperimentConfig::defaults(Experiment::E1);
        assert!(ok.validate(Experiment::E1).is_ok());
        let small = ExperimentConfig { n: 500, ..ok.clone() };
        assert!(matches!(small.validate(Experiment::E1), Err(Error::Config(_))));
        let wide = ExperimentConfig { block_len: 101, ..ok.clone() };
        assert!(wide.validate(Experiment::E1).is_err());
        let alpha = ExperimentConfig { alpha: 1.2, ..ok.clone() };
        assert!(alpha.validate(Experiment::E1).is_err());
        let e5 = ExperimentConfig { norming: NormingMode::ByMarginal, ..ExperimentConfig::defaults(Experiment::E5) };
        assert!(e5.validate(Experiment::E5).is_err());
        assert!(ExperimentConfig::defaults(Experiment::E5).validate(Experiment::E5).is_ok());
        assert!(ExperimentConfig { reps: 1, ..ok }.insufficient_sample());
    }
}
