use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sklab::experiments::ConfigOverrides;
use sklab::models::NormingMode;

#[derive(Parser)]
#[command(name = "sklab", version, about = "Heavy-tailed partial sums and maxima in the Skorokhod M1 topologies")]
pub struct Cli {
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

// parsed once per process, so the size of the largest variant is irrelevant
#[allow(clippy::large_enum_variant)]
#[derive(Subcommand)]
pub enum Command {
    /// Simulate a moving maxima sequence and print one of its normalised paths as JSON.
    Simulate(SimulateArgs),
    /// Distances and oscillation between paths stored as JSON.
    #[command(subcommand)]
    Dist(DistCommand),
    /// Draw from the joint limit of partial sums and maxima.
    Limit(LimitArgs),
    /// Run experiment e1..e6 and print its report.
    Exp(ExpArgs),
    /// Combine reports.
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum NormingArg {
    Marginal,
    Innovation,
}

impl From<NormingArg> for NormingMode {
    fn from(n: NormingArg) -> Self {
        match n {
            NormingArg::Marginal => NormingMode::ByMarginal,
            NormingArg::Innovation => NormingMode::ByInnovation,
        }
    }
}

#[derive(Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Comma-separated moving maxima coefficients.
    #[arg(long, value_delimiter = ',', default_value = "1,1")]
    pub coefficients: Vec<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Process {
    /// `(V_n, W_n)`.
    Pair,
    /// `(V_n^(u), W_n)`.
    Truncated,
    /// `V_n - 2 W_n`.
    Difference,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "marginal")]
    pub norming: NormingArg,
    #[arg(long, value_enum, default_value = "pair")]
    pub process: Process,
    /// Truncation level for `--process truncated`.
    #[arg(long, default_value_t = 1.0)]
    pub u: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum DistCommand {
    /// Strong M1 distance (paths of equal dimension).
    M1 {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = sklab::skorokhod::DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// Weak M1 distance (2-dimensional paths).
    Wm1 {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = sklab::skorokhod::DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// M1 oscillation of a scalar path over windows of width `delta`.
    Omega {
        x: PathBuf,
        #[arg(long)]
        delta: f64,
    },
}

#[derive(Args)]
pub struct LimitArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1")]
    pub t_grid: Vec<f64>,
    /// Series terms.
    #[arg(long, default_value_t = 10_000)]
    pub truncation: usize,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "marginal")]
    pub norming: NormingArg,
    /// Also write every draw as CSV.
    #[arg(long)]
    pub samples_csv: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ExpArgs {
    /// e1..e6
    pub experiment: String,
    /// TOML (or `.json`) file of settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub coefficients: Option<Vec<f64>>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub norming: Option<NormingArg>,
    #[arg(long)]
    pub block_len: Option<usize>,
    #[arg(long)]
    pub truncation: Option<usize>,
    #[arg(long)]
    pub limit_reps: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub t_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub u_levels: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub n_ladder: Option<Vec<usize>>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub u: Option<f64>,
    /// Report destination (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for the report's curves as CSV.
    #[arg(long)]
    pub csv_dir: Option<PathBuf>,
}

impl ExpArgs {
    pub fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            alpha: self.alpha,
            coefficients: self.coefficients.clone(),
            n: self.n,
            reps: self.reps,
            seed: self.seed,
            norming: self.norming.map(Into::into),
            block_len: self.block_len,
            truncation: self.truncation,
            limit_reps: self.limit_reps,
            t_grid: self.t_grid.clone(),
            u_levels: self.u_levels.clone(),
            alphas: self.alphas.clone(),
            n_ladder: self.n_ladder.clone(),
            eps: self.eps,
            u: self.u,
        }
    }
}

#[derive(Subcommand)]
pub enum ReportCommand {
    /// Concatenate reports into one JSON array; exits 1 unless every report passed.
    Merge {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}
