//! Folded-spectrum propagation: the same loop driven by `(H - omega)^2`.

use crate::ansatz::AnsatzState;
use crate::sim::prepare_state;

use super::output::Restart;
use super::propagate::run_ground_from;
use super::{EngineError, PropagationConfig, RunResult, System};

#[derive(Debug, Clone)]
pub struct FoldedResult {
    pub omega: f64,
    pub run: RunResult,
    /// Folded eigenvalue estimate `(E - omega)^2` from the projected energy.
    pub e_folded: f64,
    /// Same from the shift.
    pub e_folded_shift: f64,
    /// `omega +/- sqrt(e_folded)`.
    pub energy: f64,
    pub energy_shift: f64,
    /// Reblocked projected energy of `H` itself, measured at the reference.
    pub energy_projected: f64,
    /// `<H>` and `<H^2> - <H>^2` of the final ansatz state.
    pub expectation: f64,
    pub variance: f64,
}

fn recover(omega: f64, e_folded: f64, sign: f64) -> f64 {
    omega + sign * e_folded.max(0.0).sqrt()
}

/// Runs on `(H - omega)^2` for `system`'s reference. `warm_start` supplies
/// initial amplitudes (same reference and excitation list).
pub fn run_folded_spectrum(
    system: &System,
    omega: f64,
    cfg: &PropagationConfig,
    warm_start: Option<&AnsatzState>,
) -> Result<FoldedResult, EngineError> {
    let fs = system.folded(omega);
    let ansatz = match warm_start {
        Some(a) => {
            let mut fresh = fs.ansatz();
            if a.len() != fresh.len() || a.reference != fresh.reference {
                return Err(EngineError::Config("warm start does not match the system ansatz".into()));
            }
            fresh.set_amplitudes(&a.amplitudes());
            fresh
        }
        None => fs.ansatz(),
    };
    let run = run_ground_from(&fs, cfg, Restart::fresh(ansatz, cfg), None)?;
    let pick = |stats: &Option<crate::stats::ReblockResult>, last: f64| stats.as_ref().map(|s| s.mean).unwrap_or(last);
    let e_folded = fs.offset + pick(&run.energy_stats, run.final_energy());
    let e_folded_shift = fs.offset + pick(&run.shift_stats, run.final_shift());

    let energy_projected = match &fs.physical {
        Some((_, e_ref)) => {
            let last = run.records.iter().rev().find_map(|r| r.e_physical).unwrap_or(f64::NAN);
            e_ref + pick(&run.physical_stats, last)
        }
        None => f64::NAN,
    };
    let psi = prepare_state(system.n_qubits, system.reference, &run.ansatz.build_circuit())?;
    let h_psi = system.hamiltonian.apply(psi.amplitudes());
    let expectation = psi.amplitudes().iter().zip(&h_psi).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
    let h2 = h_psi.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let sign = if expectation >= omega { 1.0 } else { -1.0 };
    Ok(FoldedResult {
        omega,
        energy: recover(omega, e_folded, sign),
        energy_shift: recover(omega, e_folded_shift, sign),
        energy_projected,
        e_folded,
        e_folded_shift,
        expectation,
        variance: (h2 - expectation * expectation).max(0.0),
        run,
    })
}

/// One geometry of a folded-spectrum scan.
#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub index: usize,
    pub omega: f64,
    pub result: Result<FoldedResult, String>,
    /// `<H>` moved further than the window from `omega`.
    pub switched: bool,
}

/// Follows one state across `systems` (same reference, successive
/// geometries). Each point starts from the previous point's amplitudes and
/// uses its energy as `omega`. A failed point is recorded and the next one
/// starts cold from the last good `omega`.
pub fn folded_scan(systems: &[System], omega0: f64, cfg: &PropagationConfig, window: f64) -> Vec<ScanPoint> {
    let mut omega = omega0;
    let mut warm: Option<AnsatzState> = None;
    let mut out = Vec::with_capacity(systems.len());
    for (index, sys) in systems.iter().enumerate() {
        match run_folded_spectrum(sys, omega, cfg, warm.as_ref()) {
            Ok(r) => {
                let switched = (r.expectation - omega).abs() > window;
                let next = r.energy;
                warm = Some(r.run.ansatz.clone());
                out.push(ScanPoint { index, omega, result: Ok(r), switched });
                omega = next;
            }
            Err(e) => {
                warm = None;
                out.push(ScanPoint { index, omega, result: Err(e.to_string()), switched: false });
            }
        }
    }
    out
}
