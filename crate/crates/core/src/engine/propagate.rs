use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ansatz::AnsatzState;
use crate::sim::prepare_state;
use crate::stats::{reblock, ReblockResult};

use super::measure::{measure, GroupSelection};
use super::output::Restart;
use super::{EngineError, PropagationConfig, System};

pub const FLAG_DIVERGENT: u8 = 1;
pub const FLAG_SHIFT_UPDATED: u8 = 2;

/// Reference population and one signed population per excitation.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerPopulation {
    pub n_ref: f64,
    pub populations: Vec<f64>,
}

impl WalkerPopulation {
    pub fn from_amplitudes(n_ref: f64, theta: &[f64]) -> Self {
        Self { n_ref, populations: theta.iter().map(|t| t * n_ref).collect() }
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.populations.iter().map(|n| n / self.n_ref).collect()
    }

    /// `N_tot = |N_0| + sum_i |N_i|`.
    pub fn total(&self) -> f64 {
        self.n_ref.abs() + self.populations.iter().map(|n| n.abs()).sum::<f64>()
    }
}

/// `N_i -= N_0 dbeta r_i` for every excitation, and likewise for `N_0`
/// with `r_0` unless `freeze_n0`. `residuals[0]` is `r_0`.
pub fn step(pop: &WalkerPopulation, residuals: &[f64], delta_beta: f64, freeze_n0: bool) -> WalkerPopulation {
    assert_eq!(residuals.len(), pop.populations.len() + 1, "residual count");
    let n0 = pop.n_ref;
    let populations = pop.populations.iter().zip(&residuals[1..]).map(|(n, r)| n - n0 * delta_beta * r).collect();
    let n_ref = if freeze_n0 { n0 } else { n0 - n0 * delta_beta * residuals[0] };
    WalkerPopulation { n_ref, populations }
}

/// `S - zeta / (A dbeta) ln(N_now / N_prev)`.
pub fn update_shift(s_prev: f64, n_tot_now: f64, n_tot_prev: f64, cfg: &PropagationConfig) -> Result<f64, EngineError> {
    if !(n_tot_now > 0.0 && n_tot_prev > 0.0) {
        return Err(EngineError::Numerical(format!(
            "shift update with non-positive populations {n_tot_now} / {n_tot_prev}"
        )));
    }
    Ok(s_prev - cfg.zeta / (cfg.shift_interval as f64 * cfg.delta_beta) * (n_tot_now / n_tot_prev).ln())
}

/// `(r_0 + S s_0) / s_0`, or `None` when `|s_0|` is below the floor.
pub fn projected_energy(r0: f64, s0: f64, shift: f64, floor: f64) -> Option<f64> {
    (s0.abs() >= floor && s0 != 0.0).then(|| (r0 + shift * s0) / s0)
}

/// Multi-determinant trial state for the projected energy.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialWavefunction {
    pub determinants: Vec<u64>,
    pub coefficients: Vec<f64>,
}

impl TrialWavefunction {
    pub fn new(determinants: Vec<u64>, coefficients: Vec<f64>) -> Result<Self, EngineError> {
        if determinants.len() != coefficients.len() || determinants.is_empty() {
            return Err(EngineError::Config("trial needs one coefficient per determinant".into()));
        }
        let norm = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(EngineError::Config("trial coefficients are all zero".into()));
        }
        Ok(Self { determinants, coefficients: coefficients.iter().map(|c| c / norm).collect() })
    }
}

/// `sum_i c_i h_i / sum_i c_i s_i` over the trial determinants, using the
/// values measured for `targets`.
pub fn trial_projected_energy(
    targets: &[u64],
    h: &[f64],
    s: &[f64],
    trial: &TrialWavefunction,
    floor: f64,
) -> Result<Option<f64>, EngineError> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (&d, &c) in trial.determinants.iter().zip(&trial.coefficients) {
        let i = targets.iter().position(|&t| t == d).ok_or_else(|| {
            EngineError::Config(format!("trial determinant {d:#b} is neither the reference nor an excitation target"))
        })?;
        num += c * h[i];
        den += c * s[i];
    }
    Ok((den.abs() >= floor && den != 0.0).then(|| num / den))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub beta: f64,
    pub shift: f64,
    /// `NaN` when flagged divergent.
    pub e_proj: f64,
    /// Undivided `r_0 + S s_0`.
    pub e_proj_numerator: f64,
    pub n_tot: f64,
    pub s0: f64,
    pub flags: u8,
    pub groups_drawn: usize,
    /// Excitations left after rounding (all of them when not rounding).
    pub kept: usize,
    pub e_trial: Option<f64>,
    /// Projected energy of the physical Hamiltonian (folded runs only),
    /// relative to its reference energy.
    pub e_physical: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub records: Vec<TrajectoryRecord>,
    /// Reference-energy offset added back to obtain absolute energies.
    pub offset: f64,
    pub shift_stats: Option<ReblockResult>,
    pub energy_stats: Option<ReblockResult>,
    pub trial_stats: Option<ReblockResult>,
    pub physical_stats: Option<ReblockResult>,
    pub ansatz: AnsatzState,
    pub population: WalkerPopulation,
    pub divergent: usize,
    pub shots: u64,
    /// First step with a varying shift.
    pub shift_started: Option<usize>,
    pub restart: Restart,
}

impl RunResult {
    pub fn shift_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.shift).collect()
    }

    pub fn energy_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.e_proj).collect()
    }

    pub fn final_shift(&self) -> f64 {
        self.records.last().map(|r| r.shift).unwrap_or(0.0)
    }

    pub fn final_energy(&self) -> f64 {
        self.records.iter().rev().map(|r| r.e_proj).find(|e| e.is_finite()).unwrap_or(f64::NAN)
    }
}

fn stats_of(values: impl Iterator<Item = f64>) -> Option<ReblockResult> {
    let v: Vec<f64> = values.filter(|x| x.is_finite()).collect();
    reblock(&v, 0).ok()
}

/// Propagates from the zero-amplitude ansatz of `system`.
pub fn run_ground(
    system: &System,
    cfg: &PropagationConfig,
    trial: Option<&TrialWavefunction>,
) -> Result<RunResult, EngineError> {
    let start = Restart::fresh(system.ansatz(), cfg);
    run_ground_from(system, cfg, start, trial)
}

/// Propagates from a warm start or restart point for `cfg.n_steps` steps.
pub fn run_ground_from(
    system: &System,
    cfg: &PropagationConfig,
    start: Restart,
    trial: Option<&TrialWavefunction>,
) -> Result<RunResult, EngineError> {
    cfg.validate()?;
    if start.ansatz.reference != system.reference || start.ansatz.n_qubits != system.n_qubits {
        return Err(EngineError::Config("ansatz does not match the system".into()));
    }
    let mut rng: ChaCha8Rng = start.rng.clone();
    let mut state = start.ansatz.clone();
    let mut pop = WalkerPopulation::from_amplitudes(start.n_ref, &state.amplitudes());
    let mut shift = start.shift;
    let mut varying = start.varying;
    let mut n_tot_ref = start.n_tot_ref;
    let mut since_update = start.since_update;
    let targets: Vec<u64> = std::iter::once(state.reference).chain(state.targets()).collect();
    let full = GroupSelection::Full.draws(&system.groups);
    let plan = cfg.shot_plan();

    let mut records = Vec::with_capacity(cfg.n_steps);
    let mut divergent = 0;
    let mut shots = 0;
    let mut shift_started = None;
    for k in 0..cfg.n_steps {
        let step_index = start.step + k + 1;
        state.set_amplitudes(&pop.amplitudes());
        let (encoded, kept) = if cfg.rounding {
            let r = state.stochastic_round(cfg.rounding_inclusive, &mut rng);
            (r.state, r.kept)
        } else {
            let kept = state.excitations.iter().filter(|e| e.amplitude != 0.0).count();
            (state.clone(), kept)
        };
        let psi = prepare_state(encoded.n_qubits, encoded.reference, &encoded.active_circuit())?;
        let sel = GroupSelection::choose(system, cfg, &mut rng)?;
        let draws = sel.draws(&system.groups);
        let reference_draws = (cfg.full_reference_residual && cfg.n_hamil > 0).then_some(full.as_slice());
        let m = measure(psi.amplitudes(), &targets, &system.groups, &draws, reference_draws, plan, &mut rng);
        shots += m.shots;

        let mut flags = 0;
        let e = projected_energy(m.h[0], m.s[0], 0.0, cfg.s0_floor);
        if e.is_none() {
            flags |= FLAG_DIVERGENT;
            divergent += 1;
        }
        if !varying {
            if let Some(e) = e {
                shift = e;
            }
        }
        let residuals: Vec<f64> = m.h.iter().zip(&m.s).map(|(h, s)| h - shift * s).collect();
        let e_trial = match trial {
            Some(t) => trial_projected_energy(&targets, &m.h, &m.s, t, cfg.s0_floor)?,
            None => None,
        };
        let e_physical = match &system.physical {
            Some((groups, _)) => {
                let all = GroupSelection::Full.draws(groups);
                let p = measure(psi.amplitudes(), &targets[..1], groups, &all, None, plan, &mut rng);
                shots += p.shots;
                projected_energy(p.h[0], p.s[0], 0.0, cfg.s0_floor)
            }
            None => None,
        };
        let record_shift = shift;

        pop = step(&pop, &residuals, cfg.delta_beta, cfg.freeze_n0);
        let n_tot = pop.total();
        if pop.n_ref <= 0.0 {
            return Err(EngineError::NonPositivePopulation { step: step_index, population: pop.n_ref });
        }
        if !n_tot.is_finite() {
            return Err(EngineError::Numerical(format!("population diverged at step {step_index}")));
        }
        if !varying {
            if n_tot >= start.growth_target {
                varying = true;
                n_tot_ref = n_tot;
                since_update = 0;
                shift_started = Some(step_index);
            }
        } else {
            since_update += 1;
            if since_update == cfg.shift_interval {
                shift = update_shift(shift, n_tot, n_tot_ref, cfg)?;
                n_tot_ref = n_tot;
                since_update = 0;
                flags |= FLAG_SHIFT_UPDATED;
            }
        }
        records.push(TrajectoryRecord {
            step: step_index,
            beta: step_index as f64 * cfg.delta_beta,
            shift: record_shift,
            e_proj: e.unwrap_or(f64::NAN),
            e_proj_numerator: m.h[0],
            n_tot,
            s0: m.s[0],
            flags,
            groups_drawn: draws.len(),
            kept,
            e_trial,
            e_physical,
        });
    }
    state.set_amplitudes(&pop.amplitudes());
    let discard = cfg.discard(records.len());
    let tail = &records[discard..];
    let restart = Restart {
        ansatz: state.clone(),
        shift,
        n_ref: pop.n_ref,
        varying,
        n_tot_ref,
        since_update,
        growth_target: start.growth_target,
        step: start.step + cfg.n_steps,
        rng,
    };
    Ok(RunResult {
        shift_stats: stats_of(tail.iter().map(|r| r.shift)),
        energy_stats: stats_of(tail.iter().map(|r| r.e_proj)),
        trial_stats: if trial.is_some() { stats_of(tail.iter().filter_map(|r| r.e_trial)) } else { None },
        physical_stats: if system.physical.is_some() { stats_of(tail.iter().filter_map(|r| r.e_physical)) } else { None },
        records,
        offset: system.offset,
        ansatz: state,
        population: pop,
        divergent,
        shots,
        shift_started,
        restart,
    })
}

impl Restart {
    /// Start of a run: zero populations except `N_0`, zero shift, RNG from
    /// the configured seed.
    pub fn fresh(ansatz: AnsatzState, cfg: &PropagationConfig) -> Self {
        // a warm-started ansatz must still grow by the same factor
        let start = 1.0 + ansatz.amplitudes().iter().map(|t| t.abs()).sum::<f64>();
        Self {
            growth_target: cfg.target_population() * start,
            ansatz,
            shift: 0.0,
            n_ref: cfg.n0,
            varying: false,
            n_tot_ref: 0.0,
            since_update: 0,
            step: 0,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        }
    }
}
