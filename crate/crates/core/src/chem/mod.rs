//! Molecular integrals: FCIDUMP exchange, built-in hydrogen chains and the
//! second-quantised Hamiltonian.

pub mod fcidump;
pub mod fermion;
pub mod hchain;
pub mod integrals;

pub use fcidump::{parse_fcidump, read_fcidump, write_fcidump};
pub use fermion::{to_fermion_operator, FermionOperator, FermionTerm};
pub use hchain::{hydrogen_chain_integrals, hydrogen_chain_scf, Length, ScfOptions, ScfSolution};
pub use integrals::SpinOrbitalIntegrals;

#[derive(Debug, thiserror::Error)]
pub enum ChemError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid integrals: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("SCF did not converge in {iterations} iterations")]
    ScfNotConverged { iterations: usize },
}
