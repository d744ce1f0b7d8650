//! Residual and overlap estimation.
//!
//! For a target determinant `t` and string `P` with `P|t> = ph |t ^ x>`,
//! `<t|P|Psi> = conj(ph) Psi[t ^ x]`. Its real part is the exact mean of the
//! ancilla-`Z` outcome of the Hadamard-test circuit (see
//! [`crate::sim::hadamard_test`]), so noisy estimates are drawn around it
//! one string at a time. The identity string shares the overlap estimate
//! `s_t`, which the same circuit measures.

use num_complex::Complex64;
use rand::Rng;

use crate::ansatz::AnsatzState;
use crate::qubit::{sample_groups, CommutingGroup, GroupDraw};
use crate::sim::{prepare_state, NoiseModel};

use super::{EngineError, PropagationConfig, ShotPlan, System};

/// Groups evaluated in one step.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupSelection {
    Full,
    Sampled(Vec<GroupDraw>),
}

impl GroupSelection {
    pub fn draws(&self, groups: &[CommutingGroup]) -> Vec<GroupDraw> {
        match self {
            GroupSelection::Full => (0..groups.len()).map(|index| GroupDraw { index, weight: 1.0 }).collect(),
            GroupSelection::Sampled(d) => d.clone(),
        }
    }

    pub fn choose<R: Rng + ?Sized>(system: &System, cfg: &PropagationConfig, rng: &mut R) -> Result<Self, EngineError> {
        if cfg.n_hamil == 0 {
            return Ok(GroupSelection::Full);
        }
        Ok(GroupSelection::Sampled(sample_groups(&system.groups, cfg.n_hamil, cfg.group_sampling, rng)?))
    }
}

/// Raw estimates per target: `h_t ~ <t|O|Psi>` and `s_t ~ <t|Psi>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub targets: Vec<u64>,
    pub h: Vec<f64>,
    pub s: Vec<f64>,
    /// Circuit repetitions spent (0 unless in shot mode).
    pub shots: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    /// `r_t = h_t - S s_t`.
    pub r: Vec<f64>,
    pub h: Vec<f64>,
    pub s: Vec<f64>,
    pub shift: f64,
}

fn shots_of(noise: &NoiseModel) -> u64 {
    match noise {
        NoiseModel::Shots(n) => *n,
        _ => 0,
    }
}

/// `sum_draws w_k sum_{j in G_k} h_j <t|P_j|Psi>` with noisy estimates;
/// returns the value and the number of strings measured.
fn group_sum<R: Rng + ?Sized>(
    psi: &[Complex64],
    t: u64,
    groups: &[CommutingGroup],
    draws: &[GroupDraw],
    s_hat: f64,
    noise: &NoiseModel,
    rng: &mut R,
) -> (f64, u64) {
    let mut acc = 0.0;
    let mut strings = 0;
    for d in draws {
        for m in &groups[d.index].members {
            if m.string.is_identity() {
                acc += d.weight * m.coeff.re * s_hat;
                continue;
            }
            let (ph, idx) = m.string.apply_to_basis(t);
            let exact = (ph.conj() * psi[idx as usize]).re;
            acc += d.weight * m.coeff.re * noise.estimate(exact, rng);
            strings += 1;
        }
    }
    (acc, strings)
}

/// Estimates `h_t` and `s_t` for every target. Target 0 is the reference;
/// it uses `reference_draws` when given (for a full-operator projected
/// energy under group sampling).
pub fn measure<R: Rng + ?Sized>(
    psi: &[Complex64],
    targets: &[u64],
    groups: &[CommutingGroup],
    draws: &[GroupDraw],
    reference_draws: Option<&[GroupDraw]>,
    plan: ShotPlan,
    rng: &mut R,
) -> Measurement {
    let mut h = Vec::with_capacity(targets.len());
    let mut s = Vec::with_capacity(targets.len());
    let mut shots = 0;
    for (i, &t) in targets.iter().enumerate() {
        let overlap_noise = if i == 0 { plan.reference_overlap } else { plan.residual };
        let s_hat = overlap_noise.estimate(psi[t as usize].re, rng);
        shots += shots_of(&overlap_noise);
        let d = match (i, reference_draws) {
            (0, Some(r)) => r,
            _ => draws,
        };
        let (v, n) = group_sum(psi, t, groups, d, s_hat, &plan.residual, rng);
        shots += n * shots_of(&plan.residual);
        h.push(v);
        s.push(s_hat);
    }
    Measurement { targets: targets.to_vec(), h, s, shots }
}

/// Residuals of the encoded state at a fixed shift, with the group
/// selection and noise taken from `cfg`.
pub fn estimate_residuals<R: Rng + ?Sized>(
    state: &AnsatzState,
    system: &System,
    shift: f64,
    cfg: &PropagationConfig,
    rng: &mut R,
) -> Result<Residuals, EngineError> {
    let psi = prepare_state(state.n_qubits, state.reference, &state.active_circuit())?;
    let targets: Vec<u64> = std::iter::once(state.reference).chain(state.targets()).collect();
    let sel = GroupSelection::choose(system, cfg, rng)?;
    let draws = sel.draws(&system.groups);
    let full = GroupSelection::Full.draws(&system.groups);
    let reference_draws = (cfg.full_reference_residual && cfg.n_hamil > 0).then_some(full.as_slice());
    let m = measure(psi.amplitudes(), &targets, &system.groups, &draws, reference_draws, cfg.shot_plan(), rng);
    let r = m.h.iter().zip(&m.s).map(|(h, s)| h - shift * s).collect();
    Ok(Residuals { r, h: m.h, s: m.s, shift })
}
