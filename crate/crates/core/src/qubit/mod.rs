//! Pauli-string algebra, the Jordan–Wigner map and measurement grouping.

pub mod grouping;
pub mod jw;
pub mod operator;
pub mod pauli;

pub use grouping::{group_qubitwise, group_with, sample_groups, CommutingGroup, GroupDraw, GroupSampling, GroupingStrategy};
pub use jw::jordan_wigner;
pub use operator::{QubitOperator, DEFAULT_PRUNE_TOL};
pub use pauli::{Pauli, PauliString, PauliTerm, MAX_QUBITS};

#[derive(Debug, thiserror::Error)]
pub enum QubitError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("index {index} does not fit in {n_qubits} qubits")]
    IndexOverflow { index: usize, n_qubits: usize },
    #[error("no groups to sample from")]
    EmptyGroups,
    #[error("at least one group draw is required")]
    ZeroDraws,
}
