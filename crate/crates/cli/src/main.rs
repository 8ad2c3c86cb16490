//! `reflectron` command-line driver. See `config.rs` for the file schema.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use reflectron::Error;

#[derive(Debug, Parser)]
#[command(name = "reflectron", version, about = "Classical and quantum reflecting PS experiments")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; without it results go to stdout (bench writes to
    /// the current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Chain JSON file (`{"n", "columns", "convention"}`).
    #[arg(long, conflicts_with_all = ["bundled", "random"])]
    chain: Option<PathBuf>,
    /// `six-state` or `rank-one`.
    #[arg(long, conflicts_with = "random")]
    bundled: Option<String>,
    /// Random reversible chain on this many nodes.
    #[arg(long)]
    random: Option<usize>,
    /// Target spectral gap of the random chain.
    #[arg(long, requires = "random")]
    gap: Option<f64>,
    /// Flagged nodes, comma separated.
    #[arg(long, value_delimiter = ',')]
    flags: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AgentArg {
    Classical,
    Quantum,
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Ideal,
    Approximate,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of the chain and of its walk operator, gaps and the
    /// phase-gap bound.
    Spectra(ChainArgs),
    /// Repeated deliberations of one agent: action frequencies and mean costs.
    Deliberate {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, value_enum, default_value_t = AgentArg::Classical)]
        agent: AgentArg,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Scaling ensemble and behavior comparison; CSV records plus a JSON fit
    /// summary.
    Bench {
        #[arg(long)]
        trials: Option<u64>,
        /// Also run the active-scenario episode sweep.
        #[arg(long)]
        episodes: bool,
    },
    /// One episode per agent in the configured policy-switching environment.
    Episodes {
        #[arg(long, value_enum, default_value_t = AgentArg::Quantum)]
        agent: AgentArg,
        #[arg(long)]
        steps: Option<usize>,
        /// Internal-operation budget per step; 0 waits forever.
        #[arg(long, default_value_t = 0)]
        budget: u64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoConvergence(_)
        | Error::NumericalFailure(_)
        | Error::RetryCapExceeded(_)
        | Error::ActionNotFlagged { .. }
        | Error::AncillaNotClean
        | Error::DegenerateBranch(_)
        | Error::Csv(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
