//! `memevo` command-line harness.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "memevo",
    version,
    about = "Evolve semantic networks toward an analogy with a base network"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an evolution and write its artifacts to --out.
    Run(RunArgs),
    /// Score the analogy between two networks and print the winning mapping.
    Score(ScoreArgs),
    /// Print one random network grown from a knowledge base.
    Gen(GenArgs),
    /// Print knowledge base counts after score filtering.
    KbStats(KbArgs),
    /// Apply one mutation to a network (debugging aid).
    Mutate(MutateArgs),
    /// Cross two networks and print both children (debugging aid).
    Crossover(CrossoverArgs),
}

#[derive(Args)]
pub struct RunArgs {
    /// Knowledge base TSV (overrides `kb` in --config).
    #[arg(long)]
    pub kb: Option<PathBuf>,
    /// Base network to evolve analogies of (overrides `base` in --config).
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// `key = value` settings file; a run manifest also works.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub pop_size: Option<usize>,
    #[arg(long)]
    pub pc: Option<f64>,
    #[arg(long)]
    pub pm: Option<f64>,
    #[arg(long)]
    pub cmax: Option<usize>,
    #[arg(long)]
    pub rmin: Option<f64>,
    #[arg(long)]
    pub timeout: Option<usize>,
    #[arg(long)]
    pub tournament_size: Option<usize>,
    #[arg(long)]
    pub win_prob: Option<f64>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub target_fitness: Option<f64>,
    #[arg(long)]
    pub no_elitism: bool,
    /// Evaluate fitness on a single thread.
    #[arg(long)]
    pub serial: bool,
}

#[derive(Args)]
pub struct ScoreArgs {
    pub base: PathBuf,
    pub target: PathBuf,
    #[arg(long, default_value_t = 0.3)]
    pub w_base: f64,
    #[arg(long, default_value_t = 0.1)]
    pub w_conn: f64,
}

#[derive(Args)]
pub struct KbArgs {
    #[arg(long)]
    pub kb: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub rmin: f64,
}

#[derive(Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub kb: KbArgs,
    #[arg(long, default_value_t = 5)]
    pub cmax: usize,
    #[arg(long, default_value_t = 10)]
    pub timeout: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args)]
pub struct MutateArgs {
    #[command(flatten)]
    pub kb: KbArgs,
    pub net: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub timeout: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args)]
pub struct CrossoverArgs {
    #[command(flatten)]
    pub kb: KbArgs,
    pub parent_a: PathBuf,
    pub parent_b: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => commands::run(args),
        Command::Score(args) => commands::score(args),
        Command::Gen(args) => commands::gen(args),
        Command::KbStats(args) => commands::kb_stats(args),
        Command::Mutate(args) => commands::mutate(args),
        Command::Crossover(args) => commands::crossover(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
