//! Importance sampling of spawn targets from the fermionic Hamiltonian.
//!
//! One sample picks a term `k` with probability `|h_k| / sum |h_k|`,
//! measures the register to get a determinant `j`, and keeps `F_k|j>` when
//! it is nonzero (otherwise the sample is repeated). Targets therefore
//! follow `p(i) ~ sum_j |c_j|^2 sum_k |h_k| [F_k|j> ~ |i>]`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{weighted::WeightedIndex, Distribution};

use crate::chem::{FermionOperator, FermionTerm};
use crate::oracle::apply_string;
use crate::qubit::QubitOperator;
use crate::sim::Statevector;

use super::EngineError;

fn spawning_terms(h: &FermionOperator) -> Vec<&FermionTerm> {
    h.terms().filter(|t| !t.is_constant() && t.coeff.norm() > 0.0).collect()
}

/// `n_samples` accepted targets drawn from `psi`.
pub fn sample_spawn_targets<R: Rng + ?Sized>(
    psi: &Statevector,
    h: &FermionOperator,
    n_samples: usize,
    rng: &mut R,
) -> Result<Vec<u64>, EngineError> {
    let terms = spawning_terms(h);
    let weights = WeightedIndex::new(terms.iter().map(|t| t.coeff.norm()))
        .map_err(|e| EngineError::Numerical(format!("spawn weights: {e}")))?;
    // guards against a state no term can act on
    let max_attempts = 1000 * n_samples.max(1) + 100_000;
    let mut out = Vec::with_capacity(n_samples);
    let mut attempts = 0;
    while out.len() < n_samples {
        attempts += 1;
        if attempts > max_attempts {
            return Err(EngineError::Numerical("spawn sampler acceptance is vanishingly small".into()));
        }
        let t = terms[weights.sample(rng)];
        let j = psi.measure_register(rng);
        if let Some((_, i)) = apply_string(j, &t.creators, &t.annihilators) {
            out.push(i);
        }
    }
    Ok(out)
}

/// Exact distribution of [`sample_spawn_targets`] over `basis` (ascending).
pub fn analytic_spawn_distribution(psi: &[Complex64], h: &FermionOperator, basis: &[u64]) -> Vec<f64> {
    let terms = spawning_terms(h);
    let mut p = vec![0.0; basis.len()];
    for &j in basis {
        let w = psi[j as usize].norm_sqr();
        if w == 0.0 {
            continue;
        }
        for t in &terms {
            if let Some((_, i)) = apply_string(j, &t.creators, &t.annihilators) {
                if let Ok(idx) = basis.binary_search(&i) {
                    p[idx] += w * t.coeff.norm();
                }
            }
        }
    }
    normalise(p)
}

/// `p_gen(i) ~ |<phi_i|H|psi>|` over `basis`.
pub fn generation_distribution(psi: &[Complex64], h: &QubitOperator, basis: &[u64]) -> Vec<f64> {
    let h_psi = h.apply(psi);
    normalise(basis.iter().map(|&i| h_psi[i as usize].norm()).collect())
}

fn normalise(mut p: Vec<f64>) -> Vec<f64> {
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        p.iter_mut().for_each(|x| *x /= total);
    }
    p
}

/// `sum_i p_i ln(p_i / q_i)`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64, EngineError> {
    if p.len() != q.len() {
        return Err(EngineError::Numerical("distributions differ in length".into()));
    }
    let mut d = 0.0;
    for (i, (&a, &b)) in p.iter().zip(q).enumerate() {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Err(EngineError::Numerical(format!("q vanishes at {i} where p does not")));
        }
        d += a * (a / b).ln();
    }
    Ok(d.max(0.0))
}
