//! `mxr`: drives the periodic solver, the limiting absorption solver, the
//! invariant suites and the resolvent-region tools from an INI job file.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use maxwell_lap::{LapError, RegionError, SpectralError, SymbolError};
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod fieldfile;
pub mod ini;
pub mod report;
pub mod tolerances;

use config::{ConfigError, JobConfig};

#[derive(Debug, Parser)]
#[command(name = "mxr", version, about = "Resolvents of anisotropic Maxwell systems")]
pub struct Cli {
    /// INI job file; every key has a default.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Overrides `[problem] seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Solve at non-real frequency on the periodic grid.
    Solve,
    /// Randomized symbol suites and an optional stored-solution round trip.
    Verify,
    /// Limiting solutions at real frequency by both routes.
    Lap,
    /// Exponent map, region boundary, memberships and the eigenvalue enclosure.
    Region,
    /// Norm-scaling probe against the predicted exponent.
    Probe,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    FieldFile(#[from] fieldfile::FieldFileError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Lap(#[from] LapError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Result of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Passed,
    /// A check against a tolerance failed; outputs were still written.
    Failed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lap(LapError::MethodsDisagree { .. }) => 2,
            _ => 1,
        }
    }
}

pub fn run(cli: &Cli) -> Result<Status, CliError> {
    if let Some(threads) = cli.threads {
        // A pool may already exist when called twice in one process; keep it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    let mut job = match &cli.config {
        Some(path) => JobConfig::load(path)?,
        None => JobConfig::from_text("")?,
    };
    if let Some(seed) = cli.seed {
        job.seed = seed;
    }
    std::fs::create_dir_all(&cli.out)?;
    match cli.command {
        Command::Solve => commands::solve::run(&job, &cli.out),
        Command::Verify => commands::verify::run(&job, &cli.out),
        Command::Lap => commands::lap::run(&job, &cli.out),
        Command::Region => commands::region::run(&job, &cli.out),
        Command::Probe => commands::probe::run(&job, &cli.out),
    }
}

/// Runs the command and maps the outcome to the process exit code.
pub fn main_with(cli: &Cli) -> i32 {
    match run(cli) {
        Ok(Status::Passed) => 0,
        Ok(Status::Failed) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
