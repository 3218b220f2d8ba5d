//! `surfnodes` — generate node sets on parametric surfaces and evaluate
//! their spacing quality from the command line.
//!
//! Subcommands write their results into an output directory as CSV and
//! JSON, plus a `manifest.json` recording every parameter of the run;
//! `replay` re-executes a manifest and byte-compares the outputs.

mod commands;
mod manifest;
mod reports;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "surfnodes", version, about = "Surface node generation and quality evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one node set; writes nodes.csv and manifest.json.
    Generate(RunArgs),
    /// Run several samplers on the same setup; writes compare.json plus
    /// per-sampler histogram and per-node series CSVs.
    Compare(RunArgs),
    /// Time generation across an --h sweep; writes bench.json (timings)
    /// and bench.csv (deterministic node counts).
    Bench(RunArgs),
    /// Evaluate spacing-error bounds across an --h sweep; writes
    /// bounds.json and conformance.csv.
    Bounds(RunArgs),
    /// Re-run a manifest and byte-compare outputs against the original.
    Replay(ReplayArgs),
}

/// Shared run parameters. Not every command reads every flag; unused flags
/// are recorded in the manifest and otherwise ignored.
#[derive(Args, Clone)]
pub struct RunArgs {
    /// Gallery surface name (see README for the list).
    #[arg(long)]
    pub surface: String,

    /// Sampler: pa (advancing front), sd (supersampled), na (lattice).
    /// Comma list where the command accepts several (compare).
    #[arg(long, default_value = "pa")]
    pub alg: String,

    /// Target spacing h. Comma list for sweep commands (bench, bounds).
    #[arg(long, value_delimiter = ',')]
    pub h: Vec<f64>,

    /// Altitude grid CSV driving a variable spacing field (pa only).
    #[arg(long)]
    pub h_grid: Option<PathBuf>,

    /// Spacing at the lowest grid altitude when --h-grid is used.
    #[arg(long, default_value_t = 0.005)]
    pub h_min: f64,

    /// Spacing at the highest grid altitude when --h-grid is used.
    #[arg(long, default_value_t = 0.02)]
    pub h_max: f64,

    /// Candidate directions per expansion (default: 2 on curves, 15 else).
    #[arg(long)]
    pub n: Option<usize>,

    /// Supersampling quality factor τ.
    #[arg(long, default_value_t = 5.0)]
    pub tau: f64,

    /// RNG seed (single stream; reruns with the same seed are bit-equal).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Probe spacing factor for hole-radius estimation, in (0, 1).
    #[arg(long, default_value_t = 0.2)]
    pub refinement: f64,

    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// Timing repetitions per bench point (median is reported).
    #[arg(long, default_value_t = 9)]
    pub reps: usize,

    /// Proximity index: kdtree | grid.
    #[arg(long, default_value = "kdtree")]
    pub index: String,

    /// Start parameter for the advancing front (comma-separated floats);
    /// drawn at random inside the domain when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub start: Option<Vec<f64>>,

    /// Safety cap on generated nodes.
    #[arg(long, default_value_t = 10_000_000)]
    pub max_nodes: usize,
}

#[derive(Args)]
pub struct ReplayArgs {
    /// Path to a manifest.json written by a previous run.
    pub manifest: PathBuf,

    /// Directory for the replayed outputs (a temporary directory when
    /// omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => commands::generate(&args).map(|_| ()),
        Command::Compare(args) => commands::compare(&args).map(|_| ()),
        Command::Bench(args) => commands::bench(&args).map(|_| ()),
        Command::Bounds(args) => commands::bounds(&args).map(|_| ()),
        Command::Replay(args) => commands::replay(&args),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
