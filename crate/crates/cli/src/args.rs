use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ils_core::Width;

#[derive(Debug, Parser)]
#[command(
    name = "ils",
    version,
    about = "Exact nearest-integer scaling of i*D/A on fixed-width integers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute round(i*D/A) with one algorithm
    Solve(SolveArgs),
    /// Evaluate the overflow conditions of an algorithm without running it
    Check(CheckArgs),
    /// Differential checks on random instances
    Fuzz(FuzzArgs),
    /// Run a compensation-error experiment and write CSV
    Bench(BenchArgs),
    /// Run a zeroed-carry sweep and write CSV
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LaneWidth {
    #[value(name = "32")]
    W32,
    #[value(name = "64")]
    W64,
}

impl From<LaneWidth> for Width {
    fn from(w: LaneWidth) -> Width {
        match w {
            LaneWidth::W32 => Width::W32,
            LaneWidth::W64 => Width::W64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveAlgo {
    Div,
    Mdid,
    Ds,
    Adds,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckAlgo {
    Div,
    Mdid,
    Ds,
    Adds,
}

#[derive(Debug, Args)]
pub struct Instance {
    /// Input value (magnitude)
    #[arg(long)]
    pub i: u64,
    /// Numerator D
    #[arg(long)]
    pub d: u64,
    /// Denominator A (positive)
    #[arg(long)]
    pub a: u64,
    #[arg(long, value_enum, default_value = "64")]
    pub width: LaneWidth,
    /// Initial guess for ds (defaults to i)
    #[arg(long)]
    pub kappa: Option<u64>,
    /// Chunk count for adds (equal split); planned automatically if omitted
    #[arg(long)]
    pub chunks: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub algo: SolveAlgo,
    #[command(flatten)]
    pub instance: Instance,
    /// Scale -i instead of i
    #[arg(long)]
    pub negative: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub algo: CheckAlgo,
    #[command(flatten)]
    pub instance: Instance,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    #[arg(long, value_enum, default_value = "64")]
    pub width: LaneWidth,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, env = "ILS_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Named preset; explicit fields below override or replace it
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long, value_enum)]
    pub width: Option<LaneWidth>,
    #[arg(long)]
    pub d: Option<u64>,
    /// Comma-separated hardware clock values
    #[arg(long, value_delimiter = ',')]
    pub i: Vec<u64>,
    /// Comma-separated chunk counts for adds, one per i
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u64>,
    /// Comma-separated subset of binary64,binary32,mdid,adds
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Vec<String>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub skew_ppm: Option<u64>,
    /// Plan adds chunks automatically instead of using preset chunk counts
    #[arg(long)]
    pub auto_n: bool,
    #[arg(long, env = "ILS_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "32")]
    pub width: LaneWidth,
    /// Value used for both i and D
    #[arg(long, default_value_t = 1_000_000)]
    pub i_equals_d: u64,
    /// A = D + u with u uniform in [1, u_range]
    #[arg(long, default_value_t = 1_000)]
    pub u_range: u64,
    /// Comma-separated chunk counts
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20"
    )]
    pub n: Vec<u64>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, env = "ILS_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}
