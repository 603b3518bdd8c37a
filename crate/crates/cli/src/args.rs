use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sandpile", version, about = "Abelian sandpiles, burning bijections and Wilson sampling on Z^d")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a wired uniform spanning tree with Wilson's algorithm (JSON).
    SampleTree(SampleArgs),
    /// Sample a uniform recurrent configuration (JSON or CSV).
    SampleSandpile(SandpileArgs),
    /// Anchored burning schedule of a configuration (CSV).
    Burn(BurnArgs),
    /// Apply the anchored bijection or check its round trip.
    Bijection(BijectionArgs),
    /// Count recurrent configurations, spanning trees and det Δ.
    Enumerate(EnumerateArgs),
    /// Monte Carlo convergence experiments (CSV + manifest).
    Experiment(ExperimentArgs),
}

/// Region of Z^d: exactly one of `--ball` and `--box`, or a region read from
/// an input document.
#[derive(Debug, Args, Clone)]
pub struct RegionArgs {
    /// Lattice dimension.
    #[arg(long = "d", default_value_t = 2)]
    pub d: usize,
    /// Euclidean ball of this radius.
    #[arg(long, conflicts_with = "box_side")]
    pub ball: Option<u32>,
    /// Cube with this many sites per side.
    #[arg(long = "box")]
    pub box_side: Option<u32>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub region: RegionArgs,
    #[arg(long)]
    pub seed: u64,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SandpileArgs {
    #[command(flatten)]
    pub region: RegionArgs,
    /// Anchor depth: D_1..D_k are Euclidean balls (0 = classic bijection).
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BurnArgs {
    #[command(flatten)]
    pub region: RegionArgs,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Configuration document as written by `sample-sandpile`.
    #[arg(long, required_unless_present = "seed")]
    pub input: Option<PathBuf>,
    /// Burn an exact sample drawn with this seed instead of an input file.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["forward", "inverse", "roundtrip"])))]
pub struct BijectionArgs {
    #[command(flatten)]
    pub region: RegionArgs,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Configuration → tree.
    #[arg(long)]
    pub forward: bool,
    /// Tree → configuration.
    #[arg(long)]
    pub inverse: bool,
    /// Check forward(inverse(t)) = t and inverse(forward(η)) = η on samples.
    #[arg(long)]
    pub roundtrip: bool,
    /// Input document (configuration for --forward, tree for --inverse).
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub region: RegionArgs,
    /// Largest number of candidate arrow or height choices to scan.
    #[arg(long, default_value_t = 100_000_000)]
    pub budget: u128,
    /// Print the recurrent configurations as CSV rows after the counts.
    #[arg(long)]
    pub list: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExperimentKind {
    Coupling,
    Tv,
    Offsets,
    Fit,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    pub kind: ExperimentKind,
    #[arg(long = "d", default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Volume radii N_1 < N_2 < ….
    #[arg(long, value_delimiter = ',', default_values_t = [8u32, 16, 32])]
    pub radii: Vec<u32>,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    /// Worker threads (0 = all cores); results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Coupled outer volume radius is this factor times N.
    #[arg(long, default_value_t = 4)]
    pub outer_factor: u32,
    /// Reference radius standing in for infinite volume (default 4·max N).
    #[arg(long)]
    pub reference_radius: Option<u32>,
    /// Cylinder event as JSON (tv); default: origin height 2d−1.
    #[arg(long)]
    pub event: Option<String>,
    /// Site x of D_k for burning-time offsets (default e_1).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<i32>>,
    /// Directory for the CSV and manifest.json.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
