use crate::qubit::GroupSampling;
use crate::sim::NoiseModel;

use super::EngineError;

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationConfig {
    /// Imaginary-time step, 1/Hartree.
    pub delta_beta: f64,
    pub n_steps: usize,
    /// Initial reference population `N_0`.
    pub n0: f64,
    /// `N_tot` at which the shift starts to vary; `None` means `1.1 * n0`.
    pub target_population: Option<f64>,
    /// Shift damping.
    pub zeta: f64,
    /// Steps between shift updates.
    pub shift_interval: usize,
    /// Fidelity of every residual and overlap estimate.
    pub noise: NoiseModel,
    /// Separate shot count for the reference overlap `s_0` in shot mode.
    pub n_shots_reference: Option<u64>,
    /// Off-diagonal groups drawn per step; 0 measures the full operator.
    pub n_hamil: usize,
    pub group_sampling: GroupSampling,
    /// Evaluate the reference residual with the full operator even when
    /// the others use a sampled one.
    pub full_reference_residual: bool,
    pub rounding: bool,
    pub rounding_inclusive: bool,
    /// Hold `N_0` fixed instead of updating it with `r_0`.
    pub freeze_n0: bool,
    /// Projected-energy samples with `|s_0|` below this are flagged.
    pub s0_floor: f64,
    /// Fraction of steps dropped before reblocking.
    pub discard_fraction: f64,
    pub seed: u64,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            delta_beta: 0.2,
            n_steps: 2000,
            n0: 100.0,
            target_population: None,
            zeta: 1.0,
            shift_interval: 1,
            noise: NoiseModel::Exact,
            n_shots_reference: None,
            n_hamil: 0,
            group_sampling: GroupSampling::DiagonalAlways,
            full_reference_residual: true,
            rounding: false,
            rounding_inclusive: false,
            freeze_n0: false,
            s0_floor: 1e-6,
            discard_fraction: 0.25,
            seed: 0,
        }
    }
}

/// Noise applied to each kind of estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotPlan {
    pub residual: NoiseModel,
    pub reference_overlap: NoiseModel,
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |m: &str| Err(EngineError::Config(m.to_string()));
        if !(self.delta_beta > 0.0 && self.delta_beta.is_finite()) {
            return bad("delta_beta must be positive");
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return bad("zeta must lie in (0, 1]");
        }
        if self.shift_interval == 0 {
            return bad("shift_interval must be at least 1");
        }
        if !(self.n0 > 0.0 && self.n0.is_finite()) {
            return bad("n0 must be positive");
        }
        if let Some(t) = self.target_population {
            if !(t > 0.0) {
                return bad("target_population must be positive");
            }
        }
        if !(0.0..1.0).contains(&self.discard_fraction) {
            return bad("discard_fraction must lie in [0, 1)");
        }
        if !(self.s0_floor >= 0.0) {
            return bad("s0_floor must be non-negative");
        }
        if self.n_shots_reference == Some(0) {
            return bad("n_shots_reference must be at least 1");
        }
        self.noise.validate().map_err(|e| EngineError::Config(e.to_string()))
    }

    pub fn target_population(&self) -> f64 {
        self.target_population.unwrap_or(1.1 * self.n0)
    }

    pub fn shot_plan(&self) -> ShotPlan {
        let reference_overlap = match (self.noise, self.n_shots_reference) {
            (NoiseModel::Shots(_), Some(n)) => NoiseModel::Shots(n),
            (m, _) => m,
        };
        ShotPlan { residual: self.noise, reference_overlap }
    }

    pub fn discard(&self, len: usize) -> usize {
        (self.discard_fraction * len as f64).floor() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = PropagationConfig::default();
        c.validate().unwrap();
        assert_eq!(c.target_population(), 110.00000000000001);
        assert_eq!(c.discard(2000), 500);
    }

    #[test]
    fn rejects_bad_values() {
        for c in [
            PropagationConfig { zeta: 0.0, ..Default::default() },
            PropagationConfig { zeta: 1.5, ..Default::default() },
            PropagationConfig { delta_beta: -0.1, ..Default::default() },
            PropagationConfig { shift_interval: 0, ..Default::default() },
            PropagationConfig { noise: NoiseModel::Shots(0), ..Default::default() },
        ] {
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn reference_shots_only_apply_in_shot_mode() {
        let c = PropagationConfig { noise: NoiseModel::Shots(10), n_shots_reference: Some(1000), ..Default::default() };
        assert_eq!(c.shot_plan().reference_overlap, NoiseModel::Shots(1000));
        let g = PropagationConfig { noise: NoiseModel::Gaussian(0.1), n_shots_reference: Some(1000), ..Default::default() };
        assert_eq!(g.shot_plan().reference_overlap, NoiseModel::Gaussian(0.1));
    }
}
