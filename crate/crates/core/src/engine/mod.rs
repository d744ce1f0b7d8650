//! Imaginary-time propagation of UCC amplitudes driven by measured
//! residuals, plus the deterministic quasi-Newton baseline and the
//! folded-spectrum driver.

mod config;
mod folded;
mod measure;
mod output;
mod pqe;
mod propagate;
mod spawn;
mod system;

pub use config::{PropagationConfig, ShotPlan};
pub use folded::{folded_scan, run_folded_spectrum, FoldedResult, ScanPoint};
pub use measure::{estimate_residuals, measure, GroupSelection, Measurement, Residuals};
pub use output::{mcpqe_total_shots, trajectory_csv, vqe_spsa_total_shots, Restart};
pub use pqe::{deterministic_pqe, linked_residuals, linked_residuals_direct, PqeResult};
pub use propagate::{
    projected_energy, run_ground, run_ground_from, step, trial_projected_energy, update_shift, RunResult,
    TrajectoryRecord, TrialWavefunction, WalkerPopulation, FLAG_DIVERGENT, FLAG_SHIFT_UPDATED,
};
pub use spawn::{analytic_spawn_distribution, generation_distribution, kl_divergence, sample_spawn_targets};
pub use system::System;

use crate::ansatz::AnsatzError;
use crate::chem::ChemError;
use crate::oracle::OracleError;
use crate::qubit::QubitError;
use crate::sim::SimError;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Qubit(#[from] QubitError),
    #[error(transparent)]
    Chem(#[from] ChemError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Ansatz(#[from] AnsatzError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("population {population} is not positive at step {step}")]
    NonPositivePopulation { step: usize, population: f64 },
    #[error("no convergence after {iterations} iterations (max residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("{0}")]
    Numerical(String),
}
