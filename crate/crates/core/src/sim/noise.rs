//! Measurement fidelity models for expectation values of ±1-valued
//! observables.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Normal};

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum NoiseModel {
    /// The exact expectation value.
    #[default]
    Exact,
    /// Mean of this many ±1 outcomes drawn from the exact distribution.
    Shots(u64),
    /// Exact value plus a normal deviate with this standard deviation.
    Gaussian(f64),
}

impl NoiseModel {
    pub fn validate(&self) -> Result<(), SimError> {
        match *self {
            NoiseModel::Shots(0) => Err(SimError::ZeroShots),
            NoiseModel::Gaussian(s) if !(s >= 0.0 && s.is_finite()) => Err(SimError::BadSigma(s)),
            _ => Ok(()),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, NoiseModel::Exact)
    }

    /// Estimate of `<O>` for an observable with eigenvalues ±1 whose exact
    /// expectation is `exact`.
    pub fn estimate<R: Rng + ?Sized>(&self, exact: f64, rng: &mut R) -> f64 {
        match *self {
            NoiseModel::Exact => exact,
            NoiseModel::Shots(n) => {
                let p = (0.5 * (1.0 + exact)).clamp(0.0, 1.0);
                let k = Binomial::new(n, p).expect("probability in [0, 1]").sample(rng);
                2.0 * k as f64 / n as f64 - 1.0
            }
            NoiseModel::Gaussian(sigma) => {
                if sigma == 0.0 {
                    exact
                } else {
                    exact + Normal::new(0.0, sigma).expect("finite sigma").sample(rng)
                }
            }
        }
    }

    /// Standard deviation of one estimate at the given exact value.
    pub fn std_dev(&self, exact: f64) -> f64 {
        match *self {
            NoiseModel::Exact => 0.0,
            NoiseModel::Shots(n) => ((1.0 - exact * exact).max(0.0) / n as f64).sqrt(),
            NoiseModel::Gaussian(s) => s,
        }
    }
}
