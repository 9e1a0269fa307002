use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "fracdim",
    version,
    about = "Curve-length fractal dimension of time series"
)]
pub struct Cli {
    /// Worker threads for window and trial parallelism (default: all cores).
    #[arg(long, global = true, env = "FRACDIM_THREADS")]
    pub threads: Option<usize>,

    /// Re-run a previous invocation from its `.manifest.json` sidecar.
    #[arg(long, value_name = "PATH")]
    pub from_manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Generate a fractional Brownian motion path.
    Fbm(FbmArgs),
    /// Generate the regime-switching series (reversed FBM, 0, FBM).
    Switch(SwitchArgs),
    /// Estimate the fractal dimension of a series.
    Estimate(EstimateArgs),
    /// Slide a window over a series and estimate the dimension per step.
    Track(TrackArgs),
    /// Run a Monte-Carlo experiment.
    Experiment(ExperimentArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fbm(_) => "fbm",
            Command::Switch(_) => "switch",
            Command::Estimate(_) => "estimate",
            Command::Track(_) => "track",
            Command::Experiment(_) => "experiment",
        }
    }

    pub fn base_seed(&self) -> Option<u64> {
        match self {
            Command::Fbm(a) => Some(a.seed),
            Command::Switch(a) => Some(a.seed),
            Command::Experiment(a) => Some(a.seed),
            Command::Estimate(_) | Command::Track(_) => None,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FbmArgs {
    /// Hurst exponent in (0, 1); the path has dimension 2 - H.
    #[arg(long)]
    pub hurst: f64,
    /// Number of samples, including the initial 0.
    #[arg(long = "n")]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SwitchArgs {
    #[arg(long, default_value_t = 0.7)]
    pub hurst_first: f64,
    #[arg(long, default_value_t = 0.5)]
    pub hurst_second: f64,
    /// Samples per half; the output has 2 * half_length - 1 samples.
    #[arg(long, default_value_t = 8192)]
    pub half_length: usize,
    /// Halves use seeds `seed` and `seed + 1`.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// unit_interval or unit_increments.
    #[arg(long, default_value = "unit_interval")]
    pub scaling: String,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EstimatorArgs {
    #[arg(long, value_parser = ["higuchi", "bk", "pursuit"])]
    pub method: String,
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Forgetting factor for the pursuit method, in [0, 1).
    #[arg(long, conflicts_with = "alpha_inv")]
    pub alpha: Option<f64>,
    /// Reciprocal of alpha: `n`, `0.5n`, `0.3n`, `0.25n` (n = series or window
    /// length) or a plain number.
    #[arg(long)]
    pub alpha_inv: Option<String>,
    /// subsequence (alpha rescaled by N / M per subsequence) or window.
    #[arg(long, default_value = "subsequence")]
    pub alpha_scope: String,
    /// all_integers or powers_of_two.
    #[arg(long, default_value = "all_integers")]
    pub schedule: String,
    /// Use the pursuit length normalization exactly as typeset (audit only).
    #[arg(long)]
    pub as_printed: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EstimateArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// Also print the (k, <L(k)>) profile as CSV.
    #[arg(long)]
    pub profile: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TrackArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 4096)]
    pub window: usize,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// start, end or center.
    #[arg(long, default_value = "start")]
    pub alignment: String,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentName {
    Table1,
    Figure1,
}

impl ExperimentName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentName::Table1 => "table1",
            ExperimentName::Figure1 => "figure1",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub name: ExperimentName,
    #[arg(long, default_value = "results")]
    pub out_dir: PathBuf,
    /// Trials per cell (default 100).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Ten trials unless --trials is given.
    #[arg(long)]
    pub fast: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, default_value = "subsequence")]
    pub alpha_scope: String,

    /// table1: comma-separated series lengths.
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<usize>>,
    /// table1: Hurst exponent of the paths.
    #[arg(long)]
    pub hurst: Option<f64>,
    /// table1: pursuit alpha = 1 / (fraction * N).
    #[arg(long)]
    pub alpha_inv_fraction: Option<f64>,

    /// figure1: samples per half of the switching series.
    #[arg(long)]
    pub half_length: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub stride: Option<usize>,
    /// figure1: comma-separated fractions f, alpha = 1 / (f * window).
    #[arg(long, value_delimiter = ',')]
    pub alpha_inv_fractions: Option<Vec<f64>>,
    #[arg(long)]
    pub band: Option<f64>,
    /// figure1: convergence hold in samples.
    #[arg(long)]
    pub hold: Option<usize>,
    #[arg(long)]
    pub alignment: Option<String>,
    #[arg(long)]
    pub scaling: Option<String>,
    /// figure1: also write long-format `step,series_label,value` CSV.
    #[arg(long)]
    pub plot_data: bool,
}
