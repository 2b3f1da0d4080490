//! `lcsk`: Gram matrices, cross-validated classification and representation
//! statistics for the LCS graph kernel.
//!
//! Settings are resolved as defaults, then the `--config` JSON file, then
//! command-line flags. Exit codes: 0 ok, 2 I/O, 3 configuration, 4 internal.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 2,
            CliError::Config(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(name = "lcsk", version, about = "LCS graph kernel toolkit")]
struct Cli {
    /// JSON file with any of the run settings (keys as the long flags, with
    /// underscores).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one Gram matrix and write it as CSV.
    Gram(RunConfig),
    /// Nested 10x10-fold cross-validation over the C, lambda (and rho, s)
    /// grids; writes a JSON report.
    Classify(RunConfig),
    /// Representation statistics of one graph.
    Inspect {
        #[command(flatten)]
        run: RunConfig,
        /// Graph index (0-based).
        #[arg(long)]
        graph: usize,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Gram(flags) => commands::gram(&file.overlay(flags)),
        Command::Classify(flags) => commands::classify(&file.overlay(flags)),
        Command::Inspect { run, graph } => commands::inspect(&file.overlay(run), graph),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
