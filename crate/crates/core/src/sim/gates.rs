//! Pauli gadgets `exp(-i theta P / 2)`.
//!
//! The circuit form rotates each support qubit into the Z basis (`H` for
//! `X`, `Rx(pi/2)` for `Y`), accumulates the parity on the highest support
//! qubit with an ascending CNOT ladder, applies `Rz(theta)` there and undoes
//! the ladder and basis change. A control qubit only conditions the central
//! rotation, since everything around it cancels when the rotation is
//! skipped.

use num_complex::Complex64;

use super::{SimError, Statevector};
use crate::qubit::{Pauli, PauliString};

/// Gate tallies for circuit-cost reporting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateCount {
    pub single_qubit: usize,
    pub two_qubit: usize,
}

impl GateCount {
    pub fn add(&mut self, other: GateCount) {
        self.single_qubit += other.single_qubit;
        self.two_qubit += other.two_qubit;
    }
}

/// Two-qubit gates in the circuit for a weight-`w` gadget.
pub fn gadget_two_qubit_count(weight: usize, controlled: bool) -> usize {
    2 * weight.saturating_sub(1) + usize::from(controlled)
}

fn support_qubits(p: &PauliString) -> Vec<usize> {
    let mut s = p.support();
    let mut out = Vec::new();
    while s != 0 {
        out.push(s.trailing_zeros() as usize);
        s &= s - 1;
    }
    out
}

fn check(s: &Statevector, p: &PauliString, control: Option<usize>) -> Result<(), SimError> {
    if p.is_identity() {
        return Err(SimError::TrivialGadget);
    }
    let n = s.n_qubits();
    if n < 64 && p.support() >> n != 0 {
        return Err(SimError::MaskOutOfRange { mask: p.support(), n_qubits: n });
    }
    if let Some(c) = control {
        if c >= n {
            return Err(SimError::QubitOutOfRange { qubit: c, n_qubits: n });
        }
        if p.support() >> c & 1 == 1 {
            return Err(SimError::ControlInSupport { control: c });
        }
    }
    Ok(())
}

/// Gate-level gadget. Returns the gates used.
pub fn apply_pauli_gadget(
    s: &mut Statevector,
    p: &PauliString,
    theta: f64,
    control: Option<usize>,
) -> Result<GateCount, SimError> {
    check(s, p, control)?;
    let qs = support_qubits(p);
    let mut count = GateCount::default();
    let basis_in = |s: &mut Statevector, count: &mut GateCount, forward: bool| -> Result<(), SimError> {
        for &q in &qs {
            match p.letter(q) {
                Pauli::X => s.h(q)?,
                Pauli::Y => s.rx(q, if forward { std::f64::consts::FRAC_PI_2 } else { -std::f64::consts::FRAC_PI_2 })?,
                _ => continue,
            }
            count.single_qubit += 1;
        }
        Ok(())
    };
    basis_in(s, &mut count, true)?;
    for w in qs.windows(2) {
        s.cnot(w[0], w[1])?;
        count.two_qubit += 1;
    }
    let last = *qs.last().unwrap();
    match control {
        Some(c) => {
            s.crz(c, last, theta)?;
            count.two_qubit += 1;
        }
        None => {
            s.rz(last, theta)?;
            count.single_qubit += 1;
        }
    }
    for w in qs.windows(2).rev() {
        s.cnot(w[0], w[1])?;
        count.two_qubit += 1;
    }
    basis_in(s, &mut count, false)?;
    Ok(count)
}

/// Same operation applied directly as a 2x2 rotation between `|b>` and
/// `|b ^ x>`: `cos(theta/2) psi - i sin(theta/2) P psi`.
pub fn apply_pauli_rotation(
    s: &mut Statevector,
    p: &PauliString,
    theta: f64,
    control: Option<usize>,
) -> Result<(), SimError> {
    check(s, p, control)?;
    rotate_amplitudes(s.amplitudes_mut(), p, theta, control.map(|c| 1u64 << c).unwrap_or(0));
    Ok(())
}

/// Raw kernel of [`apply_pauli_rotation`] on amplitudes, restricted to
/// indices containing all bits of `ctrl_mask`.
pub fn rotate_amplitudes(amps: &mut [Complex64], p: &PauliString, theta: f64, ctrl_mask: u64) {
    let (c, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mis = Complex64::new(0.0, -sn);
    let x = p.x;
    if x == 0 {
        // diagonal: each amplitude picks up exp(-i theta/2 * (+-1))
        for (b, a) in amps.iter_mut().enumerate() {
            if b as u64 & ctrl_mask != ctrl_mask {
                continue;
            }
            let (ph, _) = p.apply_to_basis(b as u64);
            *a *= c + mis * ph;
        }
        return;
    }
    // visit each pair {b, b^x} once, from the member with the lowest set bit of x clear
    let low = x & x.wrapping_neg();
    for b in 0..amps.len() as u64 {
        if b & low != 0 || b & ctrl_mask != ctrl_mask {
            continue;
        }
        let bx = b ^ x;
        let (ph_b, _) = p.apply_to_basis(b); // P|b> = ph_b |bx>
        let (ph_bx, _) = p.apply_to_basis(bx); // P|bx> = ph_bx |b>
        let (ab, abx) = (amps[b as usize], amps[bx as usize]);
        amps[b as usize] = c * ab + mis * ph_bx * abx;
        amps[bx as usize] = c * abx + mis * ph_b * ab;
    }
}
