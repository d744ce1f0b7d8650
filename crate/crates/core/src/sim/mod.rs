//! Statevector simulation of the circuits the eigensolver needs.

pub mod gates;
pub mod hadamard;
pub mod noise;
pub mod statevector;

pub use gates::{apply_pauli_gadget, apply_pauli_rotation, gadget_two_qubit_count, GateCount};
pub use hadamard::{apply_circuit, check_sector, hadamard_test, prepare_state, Gadget, HadamardEstimate, HadamardOptions};
pub use noise::NoiseModel;
pub use statevector::Statevector;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SimError {
    #[error("{n_qubits} qubits exceeds the simulator limit of {max}")]
    TooManyQubits { n_qubits: usize, max: usize },
    #[error("mask {mask:#b} does not fit in {n_qubits} qubits")]
    MaskOutOfRange { mask: u64, n_qubits: usize },
    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("control qubit {control} lies in the gadget support")]
    ControlInSupport { control: usize },
    #[error("gadget on the identity string")]
    TrivialGadget,
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
    #[error("target {target:#b} is not in the particle/spin sector of {reference:#b}")]
    SectorMismatch { reference: u64, target: u64 },
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("invalid Gaussian sigma {0}")]
    BadSigma(f64),
}
