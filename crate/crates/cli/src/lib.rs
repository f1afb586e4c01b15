//! Command-line front end for `maxsketch`.

pub mod commands;
pub mod input;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable consulted for `--seed` when the flag is absent.
pub const SEED_ENV: &str = "MAXSKETCH_SEED";

#[derive(Debug, Parser)]
#[command(name = "maxsketch", version, about = "Max-stable sketches of non-negative streams")]
pub struct Cli {
    /// Emit one JSON object per result instead of plain text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a sketch from a stream of `index,value` records.
    Build(BuildArgs),
    /// Merge sketch files by component-wise maximum.
    Merge(MergeArgs),
    /// Estimate the norm of one sketch, or the dominance norm of several.
    Estimate(EstimateArgs),
    /// Estimate the rho_alpha distance between two sketched signals.
    Distance(DistanceArgs),
    /// Recover a single entry f(i0) and report the certification criterion.
    Point(PointArgs),
    /// Compute the sketch width K for an accuracy target.
    Size(SizeArgs),
    /// Fit the norm-sizing constant C by Monte Carlo.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Input stream; `-` or absent reads standard input.
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub k: usize,
    #[arg(long, env = SEED_ENV)]
    pub seed: u64,
    /// Output sketch file; `-` writes to standard output.
    #[arg(long)]
    pub out: PathBuf,
    /// Shard parsed records across this many worker threads.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Count repeated indices (needs memory proportional to distinct indices).
    #[arg(long)]
    pub check_duplicates: bool,
}

#[derive(Debug, Args)]
pub struct MergeArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum What {
    Norm,
    Dominance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Estimator {
    Median,
    Moment,
}

#[derive(Debug, Args)]
pub struct EstimatorArgs {
    #[arg(long, value_enum, default_value_t = Estimator::Median)]
    pub estimator: Estimator,
    /// Moment order; defaults to alpha/4.
    #[arg(long)]
    pub r: Option<f64>,
    /// Allow alpha/2 <= r < alpha (no accuracy guarantee).
    #[arg(long)]
    pub extended_r: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(required = true)]
    pub sketches: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = What::Norm)]
    pub what: What,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    pub sketch: PathBuf,
    #[arg(long)]
    pub index: u64,
    #[arg(long, default_value_t = maxsketch::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Goal {
    Norm,
    Point,
    Criterion,
}

#[derive(Debug, Args)]
pub struct SizeArgs {
    #[arg(long, value_enum)]
    pub goal: Goal,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub delta: f64,
    /// Needed for the point and criterion goals.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Defaults to alpha for the criterion goal.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Norm-sizing constant C.
    #[arg(long, default_value_t = maxsketch::SizingParams::DEFAULT_C)]
    pub c: f64,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = Estimator::Median)]
    pub estimator: Estimator,
    /// Moment order; defaults to alpha/4.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 64)]
    pub signal_len: usize,
    /// Seed of the RNG stream drawing synthetic signals and sketch seeds.
    #[arg(long, default_value_t = 0x5EED)]
    pub rng_seed: u64,
    #[arg(long, default_value_t = 1 << 16)]
    pub k_max: usize,
}
