use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "cavity-gbs",
    version,
    about = "Generate and detect two-photon generalized binomial states in a cavity"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// JSON run configuration ({"generation": {...}, "error_model": {...}}).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory for report files and the run manifest.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Overrides the Monte Carlo seed from the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Units::Gt)]
    pub units: Units,

    /// Coupling constant in rad/s (SI units only).
    #[arg(long, global = true)]
    pub g: Option<f64>,

    /// Cavity frequency in rad/s (SI units only).
    #[arg(long, global = true)]
    pub omega: Option<f64>,

    /// What to print on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    /// Dimensionless: g = 1, times are interaction angles gT.
    Gt,
    /// g and omega in rad/s, times in seconds.
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the two-atom generation sequence.
    Generate(GenerateArgs),
    /// Probe a cavity state with the single-shot read-out.
    Measure(MeasureArgs),
    /// Scan the second interaction time over the admissible m2 window.
    OptimizeTiming(TimingArgs),
    /// Compare the analytic jitter estimate with Monte Carlo runs.
    ErrorSweep(SweepArgs),
    /// Check the eigenvalue equations of J3 on the 2GBS triple.
    VerifyBasis(BasisArgs),
    /// Print the spectrum of J3 with eigen-residuals.
    J3Spectrum(BasisArgs),
    /// Compare interaction times with atomic and cavity lifetimes.
    Feasibility(FeasibilityArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub phi1: Option<f64>,
    #[arg(long)]
    pub m2: Option<u32>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Gap between the atoms (seconds in SI units, 1/g otherwise).
    #[arg(long)]
    pub dt_gap: Option<f64>,
    /// Manual first interaction angle gT1.
    #[arg(long)]
    pub gt1: Option<f64>,
    /// Manual second interaction angle gT2.
    #[arg(long)]
    pub gt2: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MeasureArgs {
    /// GBS triple "N,p,phi" to place in the cavity.
    #[arg(long, conflicts_with = "state_file", required_unless_present = "state_file")]
    pub state: Option<String>,
    /// Serialized field state (JSON).
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    /// Decoding probability p.
    #[arg(long)]
    pub p: f64,
    /// Decoding phase phi.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TimingArgs {
    #[arg(long, requires = "gt_max")]
    pub gt_min: Option<f64>,
    #[arg(long, requires = "gt_min")]
    pub gt_max: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// Relative timing jitters ΔT/T.
    #[arg(long, value_delimiter = ',', default_value = "0,0.001,0.003,0.01,0.03")]
    pub jitters: Vec<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Also write one per-sample CSV per jitter value.
    #[arg(long)]
    pub write_samples: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BasisArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    /// Adds this value to the (0,0) element of J3 before checking.
    #[arg(long, hide = true)]
    pub perturb: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FeasibilityArgs {
    #[arg(long)]
    pub tau_at: f64,
    #[arg(long)]
    pub tau_cav: f64,
    /// Interaction times in seconds; derived from --g when omitted.
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    /// Total sequence length in seconds; defaults to the sum of the times
    /// plus the configured gap.
    #[arg(long)]
    pub sequence_duration: Option<f64>,
}
