use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussqkd::symplectic::CorrelationForm;

#[derive(Debug, Parser)]
#[command(name = "gaussqkd", version, about = "Key rates, discord and security thresholds for Gaussian CV-QKD")]
pub struct Cli {
    /// Worker threads for grid evaluation [default: all cores]
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: Option<u32>,

    /// File of `key = value` lines supplying flags absent from the command line
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Seed for the random state generators
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every rate and entropic quantity at one parameter point
    Rates(RatesArgs),
    /// Evaluate key rates over a (tau, omega) grid and write CSV
    Sweep(SweepArgs),
    /// Find the minimum transmissivity giving a positive key
    Threshold(ThresholdArgs),
    /// Render the sign of a key rate over a (tau, omega) grid as a PGM image
    Region(RegionArgs),
    /// Run the seeded self-verification suites
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    /// Separable two-mode input under an entangling-cloner attack
    Separable,
    /// EPR state over a pure-loss channel
    EprLoss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GRule {
    /// Use the value of --g
    Fixed,
    /// g = mu - 1
    MaxSeparable,
    /// g = sqrt(mu^2 - 1), Z form only
    Pure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dir {
    /// Direct reconciliation
    Dr,
    /// Reverse reconciliation
    Rr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Finite,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is not in [0, 1]"))
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{s} is not a finite number"))
    }
}

fn form(s: &str) -> Result<CorrelationForm, String> {
    s.parse().map_err(|e| format!("{e}"))
}

/// Alice's input state.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Modulation variance (>= 1)
    #[arg(long, value_parser = finite)]
    pub mu: Option<f64>,

    /// Correlation strength; implies --g-rule fixed
    #[arg(long, allow_hyphen_values = true, value_parser = finite)]
    pub g: Option<f64>,

    /// How g is derived from mu when --g is absent [default: max-separable]
    #[arg(long, value_enum)]
    pub g_rule: Option<GRule>,

    /// Correlation block shape: I (gI) or Z (gZ)
    #[arg(long, default_value = "Z", value_parser = form)]
    pub form: CorrelationForm,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[arg(long, value_enum, default_value_t = Protocol::Separable)]
    pub protocol: Protocol,

    #[command(flatten)]
    pub input: InputArgs,

    /// Channel transmissivity
    #[arg(long, value_parser = unit_interval)]
    pub tau: f64,

    /// Thermal variance of Eve's EPR ancilla (1 = pure loss)
    #[arg(long, default_value_t = 1.0, value_parser = finite)]
    pub omega: f64,

    /// Also report Gaussian discord
    #[arg(long)]
    pub discord: bool,

    /// Also report the trusted-noise bound chain (separable protocol)
    #[arg(long)]
    pub bounds: bool,

    /// Emit JSON instead of `key = value` lines
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.01, value_parser = unit_interval)]
    pub tau_min: f64,
    #[arg(long, default_value_t = 0.99, value_parser = unit_interval)]
    pub tau_max: f64,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    pub tau_steps: u32,
    #[arg(long, default_value_t = 1.0, value_parser = finite)]
    pub omega_min: f64,
    #[arg(long, default_value_t = 2.0, value_parser = finite)]
    pub omega_max: f64,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub omega_steps: u32,

    #[command(flatten)]
    pub input: InputArgs,

    /// Finite modulation (needs --mu) or the large-mu limit with g = mu - 1
    #[arg(long, value_enum, default_value_t = Mode::Finite)]
    pub mode: Mode,

    /// Output path; `-` writes to standard output
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub grid: GridArgs,

    /// Which key rate to map
    #[arg(long, value_enum, default_value_t = Dir::Rr)]
    pub dir: Dir,

    /// Gray levels proportional to the clamped rate instead of black/white
    #[arg(long)]
    pub shade: bool,

    /// Rate (bits) mapped to white with --shade
    #[arg(long, default_value_t = 1.0, value_parser = finite)]
    pub shade_max: f64,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, default_value_t = 1.0, value_parser = finite)]
    pub omega: f64,

    #[arg(long, value_enum)]
    pub dir: Dir,

    #[arg(long, value_enum, default_value_t = Mode::Asymptotic)]
    pub mode: Mode,

    /// Modulation variance for --mode finite (g = mu - 1)
    #[arg(long, value_parser = finite)]
    pub mu: Option<f64>,

    /// Emit JSON instead of `key = value` lines
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// quick: 100 random states per suite; full: 1000
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    pub level: Level,

    /// Replace the oracle entropy function with a wrong one (negative control)
    #[arg(long, hide = true)]
    pub corrupt_entropy: bool,
}
