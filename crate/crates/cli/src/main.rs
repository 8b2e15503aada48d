//! `ghcut`: Gomory-Hu trees, approximate trees and expander decompositions
//! from text graph files.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ghcut_core::ratio::Ratio;

#[derive(Parser)]
#[command(name = "ghcut", version, about = "Deterministic Gomory-Hu trees from maxflow and expander decomposition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact Steiner Gomory-Hu tree (forest when disconnected).
    Tree(TreeArgs),
    /// (1 + eps)-approximate tree for weighted graphs.
    Approx {
        #[command(flatten)]
        common: TreeArgs,
        /// Accuracy, as a decimal or a fraction such as 1/10.
        #[arg(long)]
        epsilon: Ratio,
    },
    /// Expander decomposition with respect to a demand vector.
    Ed(EdArgs),
    /// Checks a tree file against a graph.
    Verify(VerifyArgs),
    /// Runs a generated family and prints one row per size.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyMode {
    /// Compare with a classic Gomory-Hu tree built from n - 1 maxflows.
    Oracle,
    /// Compare with cut enumeration (small graphs only).
    Brute,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Full,
    Desk,
}

#[derive(Args)]
pub struct RunArgs {
    /// Append a JSON metrics record to this file.
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Worker threads; output does not depend on it.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = ProfileArg::Full)]
    profile: ProfileArg,
}

#[derive(Args)]
pub struct TreeArgs {
    /// Graph file.
    input: PathBuf,
    /// Terminal file (`t` lines); overrides terminals in the graph file.
    #[arg(long)]
    terminals: Option<PathBuf>,
    /// Tree file to write; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = VerifyMode::Oracle)]
    verify: VerifyMode,
    /// Pairs checked per component when verifying; all pairs when absent.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
pub struct EdArgs {
    input: PathBuf,
    #[arg(long)]
    phi: Ratio,
    /// `degree`, `uniform` or a file of `d <vertex> <value>` lines.
    #[arg(long, default_value = "degree")]
    demand: String,
    /// Also enforce the boundary-linked property.
    #[arg(long)]
    trim: bool,
    /// Re-certify every cluster and the intercluster bound.
    #[arg(long)]
    check: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
pub struct VerifyArgs {
    graph: PathBuf,
    tree: PathBuf,
    #[arg(long)]
    terminals: Option<PathBuf>,
    /// Allowed slack; 0 checks an exact tree.
    #[arg(long, default_value = "0")]
    epsilon: Ratio,
    #[arg(long, value_enum, default_value_t = VerifyMode::Oracle)]
    mode: VerifyMode,
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Random,
    Bridged,
    Expander,
    Tree,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Vertex counts, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Run the approximate tree at this accuracy instead of the exact one.
    #[arg(long)]
    epsilon: Option<Ratio>,
    #[command(flatten)]
    run: RunArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Tree(a) => commands::tree(&a, None),
        Command::Approx { common, epsilon } => commands::tree(&common, Some(epsilon)),
        Command::Ed(a) => commands::ed(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Bench(a) => commands::bench(&a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("ghcut: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
