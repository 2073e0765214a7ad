use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zoneshare::simulator::{DEFAULT_SEED, DEFAULT_TRIALS};

/// Protection-zone spectrum sharing between a LEO satellite network and a
/// terrestrial network: coverage, area data rate and operating-point search.
#[derive(Debug, Parser)]
#[command(name = "zoneshare", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coverage probability against SINR threshold for the three user classes.
    Coverage(CoverageArgs),
    /// Per-class and weighted-sum ADR at one operating point.
    Adr(AdrArgs),
    /// ADR over a grid of protection radii and shared fractions.
    Sweep(SweepArgs),
    /// Constrained best operating point and its near-optimal set.
    Optimize(OptimizeArgs),
    /// Print the reference scenario as a config file.
    Defaults(DefaultsArgs),
    /// Dump the nodes of one simulated network realization.
    SimulateScene(SceneArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineChoice {
    Analytic,
    Simulated,
    /// Both engines (coverage only).
    Both,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario file (TOML). Without it the reference scenario is used.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override the BS sampling region half-width, km.
    #[arg(long, value_name = "KM")]
    pub sim_half_width_km: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OperatingPointArgs {
    /// Override the protection radius R_p, km.
    #[arg(long, value_name = "KM")]
    pub rp_km: Option<f64>,
    /// Override the shared bandwidth fraction ω_s.
    #[arg(long, value_name = "FRACTION")]
    pub omega: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Generator seed. The default is 0x5347494E ("SGIN").
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Monte Carlo trials (network realizations).
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    /// Run on the calling thread only.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted or "-".
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Whitespace-separated blocks for gnuplot instead of CSV.
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub point: OperatingPointArgs,
    #[arg(long, value_enum, default_value_t = EngineChoice::Both)]
    pub engine: EngineChoice,
    #[command(flatten)]
    pub sim: SimArgs,
    /// First threshold, dB.
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    pub start_db: f64,
    /// Last threshold, dB (inclusive).
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    pub stop_db: f64,
    #[arg(long, default_value_t = 2.0)]
    pub step_db: f64,
    /// Explicit comma-separated thresholds in dB; replaces the range flags.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub thresholds_db: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AdrArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub point: OperatingPointArgs,
    #[arg(long, value_enum, default_value_t = EngineChoice::Analytic)]
    pub engine: EngineChoice,
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Protection radii in km: "start:stop:step" or a comma list.
    #[arg(long = "rp-km", value_name = "AXIS", default_value = "0:20:1")]
    pub rp_km: String,
    /// Shared fractions: "start:stop:step" or a comma list.
    #[arg(long, value_name = "AXIS", default_value = "0:1:0.05")]
    pub omega: String,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = EngineChoice::Analytic)]
    pub engine: EngineChoice,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Relative band for the near-optimal set in the summary.
    #[arg(long, default_value_t = 0.01)]
    pub near_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Args)]
pub struct DefaultsArgs {
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub point: OperatingPointArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Which trial's realization to dump.
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
}
