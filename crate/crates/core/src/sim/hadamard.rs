//! One-ancilla overlap and residual circuit.
//!
//! On `n` system qubits plus an ancilla (qubit `n`):
//!
//! ```text
//! anc : H ──●──────●────── (0)X-string ── H ── measure Z or Y
//! sys : X_ref ─ G_1 ── G_2 ... ── X-string(ref ^ target)
//! ```
//!
//! Each gadget `G_k` is controlled by the ancilla; the X-string maps the
//! reference to the target determinant on the ancilla-0 branch. After the
//! final `H`, `<Z_anc P> = Re <target|P|U ref>` and
//! `<Y_anc P> = -Im <target|P|U ref>`.

use num_complex::Complex64;
use rand::Rng;

use super::gates::{apply_pauli_gadget, apply_pauli_rotation, GateCount};
use super::{NoiseModel, SimError, Statevector};
use crate::qubit::{CommutingGroup, Pauli, PauliString};

/// One factor `exp(-i angle P / 2)` of a product circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gadget {
    pub string: PauliString,
    pub angle: f64,
}

/// Applies `circuit` (first element first) without control.
pub fn apply_circuit(s: &mut Statevector, circuit: &[Gadget]) -> Result<(), SimError> {
    for g in circuit {
        if g.angle != 0.0 {
            apply_pauli_rotation(s, &g.string, g.angle, None)?;
        }
    }
    Ok(())
}

/// `U|reference>` on `n_qubits` qubits.
pub fn prepare_state(n_qubits: usize, reference: u64, circuit: &[Gadget]) -> Result<Statevector, SimError> {
    let mut s = Statevector::prepare_reference(reference, n_qubits)?;
    apply_circuit(&mut s, circuit)?;
    Ok(s)
}

fn spin_counts(mask: u64) -> (u32, u32) {
    const EVEN: u64 = 0x5555_5555_5555_5555;
    ((mask & EVEN).count_ones(), (mask & !EVEN).count_ones())
}

/// Checks that `target` lies in the particle and spin sector of `reference`.
pub fn check_sector(reference: u64, target: u64) -> Result<(), SimError> {
    if spin_counts(reference) != spin_counts(target) {
        return Err(SimError::SectorMismatch { reference, target });
    }
    Ok(())
}

/// Estimate and circuit cost from one Hadamard-test evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HadamardEstimate {
    pub value: Complex64,
    pub gates: GateCount,
}

/// Options that do not change the estimator target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HadamardOptions {
    /// Build the controlled gadgets gate by gate instead of as direct
    /// rotations.
    pub gate_level: bool,
    /// Also measure the ancilla in the Y basis for the imaginary part.
    pub imaginary: bool,
}

/// Runs the circuit and returns `<target|U|reference>` when `observable`
/// is `None`, or `sum_j h_j <target|P_j|U reference>` over the group.
#[allow(clippy::too_many_arguments)]
pub fn hadamard_test<R: Rng + ?Sized>(
    circuit: &[Gadget],
    n_qubits: usize,
    reference: u64,
    target: u64,
    observable: Option<&CommutingGroup>,
    noise: &NoiseModel,
    opts: HadamardOptions,
    rng: &mut R,
) -> Result<HadamardEstimate, SimError> {
    noise.validate()?;
    check_sector(reference, target)?;
    let anc = n_qubits;
    let mut s = Statevector::prepare_reference(reference, n_qubits + 1)?;
    let mut gates = GateCount::default();
    s.h(anc)?;
    gates.single_qubit += 1;
    for g in circuit {
        if opts.gate_level {
            gates.add(apply_pauli_gadget(&mut s, &g.string, g.angle, Some(anc))?);
        } else {
            apply_pauli_rotation(&mut s, &g.string, g.angle, Some(anc))?;
        }
    }
    let flip = reference ^ target;
    if flip != 0 {
        s.anti_controlled_x_string(anc, flip)?;
        gates.two_qubit += flip.count_ones() as usize;
    }
    s.h(anc)?;
    gates.single_qubit += 1;

    let identity = [crate::qubit::PauliTerm::identity(1.0)];
    let terms = observable.map(|g| g.members.as_slice()).unwrap_or(&identity);
    let za = PauliString::from_letters(&[(anc, Pauli::Z)]);
    let ya = PauliString::from_letters(&[(anc, Pauli::Y)]);
    let mut value = Complex64::default();
    for t in terms {
        let with = |a: &PauliString| PauliString::new(t.string.x | a.x, t.string.z | a.z);
        let re = noise.estimate(s.expectation_pauli(&with(&za)).re, rng);
        let im = if opts.imaginary { -noise.estimate(s.expectation_pauli(&with(&ya)).re, rng) } else { 0.0 };
        value += t.coeff * Complex64::new(re, im);
    }
    Ok(HadamardEstimate { value, gates })
}
