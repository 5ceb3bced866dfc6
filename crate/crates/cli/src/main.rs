//! `hurwitz`: censuses, connectivity certificates and cross-checks for
//! Hurwitz systems.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Outcome;
use config::{CommonArgs, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "hurwitz", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that full-monodromy systems with w >= 2d form one orbit
    Verify,
    /// Census with per-orbit invariants and no pass/fail judgment
    Explore,
    /// Orbit census as JSON lines, or one orbit from a seed system
    Census {
        /// Explore only the orbit of the system in this file
        #[arg(long)]
        from: Option<PathBuf>,
        /// Write the breadth-first predecessor log here (needs --from)
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Search for a move word between two systems and write a certificate
    Connect { source: PathBuf, target: PathBuf },
    /// Re-check a certificate or predecessor log independently
    Replay {
        file: PathBuf,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Compare the character-sum count with exhaustive enumeration
    Count,
    /// Check the move catalog symbolically and on random systems
    ValidateMoves {
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Bring a system to canonical form and write the certificate
    Canonicalize { input: PathBuf },
    /// Regenerate the move catalog by search
    GenerateCatalog,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<hurwitz::Error>() {
        Some(hurwitz::Error::Budget(_)) => 3,
        Some(hurwitz::Error::OrbitMismatch(_) | hurwitz::Error::Catalog(_) | hurwitz::Error::Replay(_)) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let cfg = RunConfig::resolve(cli.common)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Verify => commands::verify(&cfg),
        Command::Explore => commands::explore(&cfg),
        Command::Census { from, log } => commands::census(&cfg, from.as_deref(), log.as_deref()),
        Command::Connect { source, target } => commands::connect_files(&cfg, source, target),
        Command::Replay { file, catalog } => commands::replay_file(file, catalog.as_deref()),
        Command::Count => commands::count(&cfg),
        Command::ValidateMoves { catalog } => commands::validate_moves(&cfg, catalog.as_deref()),
        Command::Canonicalize { input } => commands::canonicalize_file(&cfg, input),
        Command::GenerateCatalog => commands::generate_catalog(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
