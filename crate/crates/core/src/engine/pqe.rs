//! Deterministic PQE with quasi-Newton updates `theta_i += r_i / Delta_i`.

use num_complex::Complex64;

use crate::ansatz::AnsatzState;
use crate::qubit::QubitOperator;
use crate::sim::{apply_circuit, prepare_state, Gadget, Statevector};

use super::{EngineError, System};

#[derive(Debug, Clone)]
pub struct PqeResult {
    pub ansatz: AnsatzState,
    /// `<Psi|H|Psi>` relative to the reference energy.
    pub energy: f64,
    pub iterations: usize,
    /// Final `max_i |r_i|`.
    pub residual: f64,
    pub history: Vec<(f64, f64)>,
}

fn expectation(op: &QubitOperator, s: &Statevector) -> f64 {
    op.expectation(s.amplitudes()).re
}

fn evolve(n_qubits: usize, amps: Vec<Complex64>, circuit: &[Gadget]) -> Result<Statevector, EngineError> {
    let mut s = Statevector::from_amplitudes(amps)?;
    debug_assert_eq!(s.n_qubits(), n_qubits);
    apply_circuit(&mut s, circuit)?;
    Ok(s)
}

/// Linked residuals `<phi_i|U^dag H U|phi_0>` from three expectation
/// values each: `<Omega_i|U^dag H U|Omega_i> - E_00/2 - E_ii/2` with
/// `Omega_i = (|phi_0> + |phi_i>)/sqrt 2`.
pub fn linked_residuals(state: &AnsatzState, op: &QubitOperator) -> Result<Vec<f64>, EngineError> {
    let n = state.n_qubits;
    let circuit = state.build_circuit();
    let e00 = expectation(op, &prepare_state(n, state.reference, &circuit)?);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(state.len());
    for t in state.targets() {
        let eii = expectation(op, &prepare_state(n, t, &circuit)?);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[state.reference as usize] = Complex64::new(h, 0.0);
        amps[t as usize] = Complex64::new(h, 0.0);
        let omega = evolve(n, amps, &circuit)?;
        out.push(expectation(op, &omega) - 0.5 * e00 - 0.5 * eii);
    }
    Ok(out)
}

/// Same quantity evaluated directly as `<U phi_i| H |U phi_0>`.
pub fn linked_residuals_direct(state: &AnsatzState, op: &QubitOperator) -> Result<Vec<f64>, EngineError> {
    let n = state.n_qubits;
    let circuit = state.build_circuit();
    let psi = prepare_state(n, state.reference, &circuit)?;
    let h_psi = op.apply(psi.amplitudes());
    state
        .targets()
        .map(|t| {
            let u_t = prepare_state(n, t, &circuit)?;
            Ok(u_t.amplitudes().iter().zip(&h_psi).map(|(a, b)| a.conj() * b).sum::<Complex64>().re)
        })
        .collect()
}

/// Iterates until `max |r_i| < tol`, starting from the amplitudes in `state`.
pub fn deterministic_pqe(
    state: &AnsatzState,
    system: &System,
    tol: f64,
    max_iterations: usize,
) -> Result<PqeResult, EngineError> {
    let mut a = state.clone();
    if a.excitations.iter().any(|e| e.denominator == 0.0) {
        return Err(EngineError::Numerical("zero quasi-Newton denominator".into()));
    }
    let mut history = Vec::new();
    for it in 0..=max_iterations {
        let r = linked_residuals(&a, &system.operator)?;
        let norm = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let psi = prepare_state(a.n_qubits, a.reference, &a.build_circuit())?;
        let energy = expectation(&system.operator, &psi);
        history.push((energy, norm));
        if norm < tol {
            return Ok(PqeResult { ansatz: a, energy, iterations: it, residual: norm, history });
        }
        if !norm.is_finite() {
            break;
        }
        let theta: Vec<f64> = a.excitations.iter().zip(&r).map(|(e, r)| e.amplitude + r / e.denominator).collect();
        a.set_amplitudes(&theta);
    }
    Err(EngineError::NotConverged {
        iterations: max_iterations,
        residual: history.last().map(|h| h.1).unwrap_or(f64::NAN),
    })
}
