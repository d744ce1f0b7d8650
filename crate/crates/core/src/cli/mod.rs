//! Command-line experiment runner.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 numerical
//! failure, 4 non-convergence.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::chem::ChemError;
use crate::engine::EngineError;
use crate::oracle::OracleError;
use crate::stats::StatsError;

pub use config::{ExperimentConfig, Mode, Omega, SystemSource, TrialSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("not converged: {0}")]
    NotConverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::NotConverged(_) => 4,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::NotConverged { .. } => CliError::NotConverged(e.to_string()),
            EngineError::NonPositivePopulation { .. } | EngineError::Numerical(_) => CliError::Numerical(e.to_string()),
            EngineError::Chem(c) => c.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<ChemError> for CliError {
    fn from(e: ChemError) -> Self {
        match e {
            ChemError::ScfNotConverged { .. } => CliError::NotConverged(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "mcpqe", version, about = "Monte Carlo projective quantum eigensolver experiments")]
pub struct Cli {
    /// Experiment file (`key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the seed in the experiment file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Extra `key=value` settings applied after the experiment file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the mode named in the experiment file (ground by default).
    Run,
    /// Warm-started scan over the configured geometries.
    Scan,
    /// Folded-spectrum run around `omega`.
    Fs {
        /// Folding point in Hartree; overrides the experiment file.
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
    },
    /// Deterministic PQE with quasi-Newton updates.
    Pqe,
    /// Commuting-group census of the Hamiltonian.
    Groups,
    /// Exact eigenvalues of the reference sector.
    Fci {
        /// Number of states to report.
        #[arg(long)]
        states: Option<usize>,
    },
    /// Reblocking analysis of one CSV column.
    Reblock {
        file: PathBuf,
        #[arg(long, default_value = "shift")]
        column: String,
        /// Leading rows to drop.
        #[arg(long, default_value_t = 0)]
        discard: usize,
    },
    /// Compare spawn-target distributions on a converged state.
    Spawn,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mcpqe: {e}");
            e.exit_code()
        }
    }
}
