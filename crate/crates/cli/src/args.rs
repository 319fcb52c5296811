use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use heaviest_urn::Recurrence;

#[derive(Debug, Parser)]
#[command(name = "heaviest-urn", version, about = "Heaviest-bin moments of the critical Polya urn")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the limiting moment M(m, d) for d = 1..=d-max, one `d value` line each.
    Moments(MomentsArgs),
    /// Simulate the urn over a range of bin counts and write plot data files.
    Simulate(SimulateArgs),
    /// Exact finite-n moment E[(H_d(n)/n)^m].
    Oracle(OracleArgs),
    /// Run the consistency checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RecurrenceArg {
    MultiTerm,
    TwoTerm,
    IteratedSum,
}

impl From<RecurrenceArg> for Recurrence {
    fn from(r: RecurrenceArg) -> Self {
        match r {
            RecurrenceArg::MultiTerm => Recurrence::MultiTerm,
            RecurrenceArg::TwoTerm => Recurrence::TwoTerm,
            RecurrenceArg::IteratedSum => Recurrence::IteratedSum,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Exact,
    Decimal,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long = "d-max")]
    pub d_max: u32,
    #[arg(long, value_enum, default_value = "two-term")]
    pub recurrence: RecurrenceArg,
    #[arg(long, value_enum, default_value = "decimal")]
    pub format: OutputFormat,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long = "d-min", default_value_t = 1)]
    pub d_min: u32,
    #[arg(long = "d-max", default_value_t = 25)]
    pub d_max: u32,
    #[arg(long, default_value_t = 1000)]
    pub n: u64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated quantile levels in (0, 1).
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.2,0.8,0.95")]
    pub quantiles: Vec<f64>,
    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
    /// File name prefix for every emitted file.
    #[arg(long, default_value = "herding")]
    pub prefix: String,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Enumerate,
    Partition,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub m: u32,
    #[arg(long, value_enum, default_value = "enumerate")]
    pub method: Method,
    /// Maximum number of simplex states to enumerate.
    #[arg(long, default_value_t = heaviest_urn::DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "quick")]
    pub level: LevelArg,
    #[arg(long, default_value_t = 20_250_101)]
    pub seed: u64,
    /// Corrupt the moment table before checking (exercises the failure path).
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}
