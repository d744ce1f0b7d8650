//! Dense statevector.
//!
//! Conventions used throughout the crate:
//!
//! * Amplitude index bit `q` is qubit `q`, so the index of a computational
//!   basis state equals the occupation bitmask of the determinant it encodes.
//!   When written as a ket, qubit 0 is the leftmost symbol: mask `0b0011` on
//!   four qubits is `|1100>`.
//! * Gates carry no hidden global phase: `Rz(t) = exp(-i t Z / 2)`,
//!   `Rx(t) = exp(-i t X / 2)`, and a Pauli gadget is exactly
//!   `exp(-i t P / 2)`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;

use super::SimError;
use crate::qubit::{PauliString, QubitOperator, MAX_QUBITS};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Largest register the simulator will allocate.
pub const MAX_SIM_QUBITS: usize = 26;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// Computational basis state `|mask>`.
    pub fn basis(n_qubits: usize, mask: u64) -> Result<Self, SimError> {
        if n_qubits > MAX_SIM_QUBITS || n_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits { n_qubits, max: MAX_SIM_QUBITS });
        }
        if n_qubits < 64 && mask >> n_qubits != 0 {
            return Err(SimError::MaskOutOfRange { mask, n_qubits });
        }
        let mut amps = vec![Complex64::default(); 1 << n_qubits];
        amps[mask as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Reference determinant preparation: `X` on every occupied orbital.
    pub fn prepare_reference(occupied: u64, n_qubits: usize) -> Result<Self, SimError> {
        Self::basis(n_qubits, occupied)
    }

    /// Wraps raw amplitudes; the caller guarantees normalisation.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let n = amps.len();
        if !n.is_power_of_two() {
            return Err(SimError::BadLength(n));
        }
        Ok(Self { n_qubits: n.trailing_zeros() as usize, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amplitude(&self, b: u64) -> Complex64 {
        self.amps[b as usize]
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<(), SimError> {
        if q >= self.n_qubits {
            Err(SimError::QubitOutOfRange { qubit: q, n_qubits: self.n_qubits })
        } else {
            Ok(())
        }
    }

    /// Applies a 2x2 unitary `[[a, b], [c, d]]` to qubit `q` on the
    /// subspace where all bits of `ctrl_on` are 1 and all bits of `ctrl_off`
    /// are 0.
    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2], ctrl_on: u64, ctrl_off: u64) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit != 0 || (i as u64 & ctrl_on) != ctrl_on || (i as u64 & ctrl_off) != 0 {
                continue;
            }
            let (a0, a1) = (self.amps[i], self.amps[i | bit]);
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    pub fn h(&mut self, q: usize) -> Result<(), SimError> {
        self.check_qubit(q)?;
        let s = Complex64::new(SQRT_HALF, 0.0);
        self.apply_1q(q, [[s, s], [s, -s]], 0, 0);
        Ok(())
    }

    pub fn x(&mut self, q: usize) -> Result<(), SimError> {
        self.check_qubit(q)?;
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::default());
        self.apply_1q(q, [[z, o], [o, z]], 0, 0);
        Ok(())
    }

    pub fn rx(&mut self, q: usize, theta: f64) -> Result<(), SimError> {
        self.check_qubit(q)?;
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let m = [[Complex64::new(c, 0.0), Complex64::new(0.0, -s)], [Complex64::new(0.0, -s), Complex64::new(c, 0.0)]];
        self.apply_1q(q, m, 0, 0);
        Ok(())
    }

    fn rz_matrix(theta: f64) -> [[Complex64; 2]; 2] {
        let half = theta / 2.0;
        [
            [Complex64::from_polar(1.0, -half), Complex64::default()],
            [Complex64::default(), Complex64::from_polar(1.0, half)],
        ]
    }

    pub fn rz(&mut self, q: usize, theta: f64) -> Result<(), SimError> {
        self.check_qubit(q)?;
        self.apply_1q(q, Self::rz_matrix(theta), 0, 0);
        Ok(())
    }

    /// `Rz` on `target` conditioned on `control` being `|1>`.
    pub fn crz(&mut self, control: usize, target: usize, theta: f64) -> Result<(), SimError> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(SimError::ControlInSupport { control });
        }
        self.apply_1q(target, Self::rz_matrix(theta), 1 << control, 0);
        Ok(())
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<(), SimError> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(SimError::ControlInSupport { control });
        }
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::default());
        self.apply_1q(target, [[z, o], [o, z]], 1 << control, 0);
        Ok(())
    }

    /// Flips every qubit in `mask`, only where `control` is `|0>`.
    pub fn anti_controlled_x_string(&mut self, control: usize, mask: u64) -> Result<(), SimError> {
        self.check_qubit(control)?;
        if mask >> control & 1 == 1 {
            return Err(SimError::ControlInSupport { control });
        }
        let cbit = 1usize << control;
        let m = mask as usize;
        let mut out = self.amps.clone();
        for (i, a) in self.amps.iter().enumerate() {
            if i & cbit == 0 {
                out[i ^ m] = *a;
            }
        }
        self.amps = out;
        Ok(())
    }

    /// `P|psi>` for a bare Pauli string.
    pub fn apply_pauli(&mut self, p: &PauliString) {
        let mut out = vec![Complex64::default(); self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let (ph, c) = p.apply_to_basis(b as u64);
            out[c as usize] = ph * a;
        }
        self.amps = out;
    }

    /// `<psi|P|psi>`.
    pub fn expectation_pauli(&self, p: &PauliString) -> Complex64 {
        let mut acc = Complex64::default();
        for (b, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let (ph, c) = p.apply_to_basis(b as u64);
            acc += self.amps[c as usize].conj() * ph * a;
        }
        acc
    }

    pub fn expectation(&self, op: &QubitOperator) -> Complex64 {
        op.expectation(&self.amps)
    }

    /// Samples a basis state with Born probabilities.
    pub fn measure_register<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let r: f64 = rng.random();
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (b, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = b;
            }
            acc += p;
            if r < acc {
                return b as u64;
            }
        }
        last_nonzero as u64
    }

    /// Amplitudes above `tol` in magnitude, one per line.
    pub fn dump(&self, tol: f64) -> String {
        let mut out = String::new();
        for (b, a) in self.amps.iter().enumerate() {
            if a.norm() > tol {
                let word: String = (0..self.n_qubits).map(|q| if b >> q & 1 == 1 { '1' } else { '0' }).collect();
                writeln!(out, "|{word}> {:+.12e} {:+.12e}", a.re, a.im).unwrap();
            }
        }
        out
    }
}
