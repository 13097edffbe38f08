// SPDX-License-Identifier: Apache-2.0

//! Batch experiment runner for the zoned-ledger simulator.

mod commands;
mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::commands::Scenario;
use crate::config::ExperimentConfig;
use crate::output::Report;

pub const THREADS_ENV: &str = "ZONED_LEDGER_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("experiment failed: {0}")]
    Run(String),
    #[error("output: {0}")]
    Output(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "zoned-ledger",
    version,
    about = "Zone-coded ledger experiments"
)]
struct Cli {
    /// JSON file with experiment parameters; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: ExperimentConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Commit random blocks and recover every slot.
    Simulate {
        /// Also write the ledger snapshot (JSON lines) here.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Adversary experiments.
    Attack {
        #[arg(long, value_enum, default_value = "all")]
        scenario: Scenario,
    },
    /// Recovery under random peer inactivity.
    Availability,
    /// Proof-of-work cost against the urn law and the zone-coded ledger.
    Mining,
    /// Per-peer storage formulas, with a measured row where possible.
    StorageCost,
    /// Audit the cyclic zone schedule.
    Coverage,
}

fn configure_threads() -> Result<(), CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a count, got {v:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Run(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let base = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let cfg = cli.params.over(base);
    let mut report = Report::default();
    match &cli.command {
        Command::Simulate { snapshot } => {
            commands::simulate(&cfg, snapshot.as_deref(), &mut report)?
        }
        Command::Attack { scenario } => commands::attack(&cfg, *scenario, &mut report)?,
        Command::Availability => commands::availability(&cfg, &mut report)?,
        Command::Mining => commands::mining(&cfg, &mut report)?,
        Command::StorageCost => commands::storage_cost(&cfg, &mut report)?,
        Command::Coverage => commands::coverage(&cfg, &mut report)?,
    }
    match &cfg.out {
        Some(path) => {
            report.write_records(BufWriter::new(File::create(path)?))?;
            report.write_tables(io::stdout().lock())?;
        }
        None => {
            report.write_records(io::stdout().lock())?;
            report.write_tables(io::stderr().lock())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Config(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
