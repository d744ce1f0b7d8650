//! Second-quantised operators over spin orbitals.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{ChemError, SpinOrbitalIntegrals};

/// `coeff * a^dag_{c1} a^dag_{c2} ... a_{a1} a_{a2} ...`.
///
/// In canonical form the creators are strictly ascending and the
/// annihilators strictly descending, so a term and its adjoint are both
/// canonical.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionTerm {
    pub coeff: Complex64,
    pub creators: Vec<usize>,
    pub annihilators: Vec<usize>,
}

impl FermionTerm {
    pub fn new(coeff: f64, creators: Vec<usize>, annihilators: Vec<usize>) -> Self {
        Self { coeff: Complex64::new(coeff, 0.0), creators, annihilators }
    }

    pub fn complex(coeff: Complex64, creators: Vec<usize>, annihilators: Vec<usize>) -> Self {
        Self { coeff, creators, annihilators }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            coeff: self.coeff.conj(),
            creators: self.annihilators.iter().rev().copied().collect(),
            annihilators: self.creators.iter().rev().copied().collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.creators.is_empty() && self.annihilators.is_empty()
    }

    /// Bitmask of orbitals whose occupation the term flips.
    pub fn flip_mask(&self) -> u64 {
        let c = self.creators.iter().fold(0u64, |m, &p| m ^ (1 << p));
        self.annihilators.iter().fold(c, |m, &p| m ^ (1 << p))
    }
}

/// Sorts `idx` in the given direction; returns the permutation sign, or
/// `None` when an index repeats (the product vanishes).
fn sort_with_sign(idx: &mut [usize], descending: bool) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 {
            let out_of_order = if descending { idx[j - 1] < idx[j] } else { idx[j - 1] > idx[j] };
            if idx[j - 1] == idx[j] {
                return None;
            }
            if !out_of_order {
                break;
            }
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

/// Sum of canonical fermion terms. Equal index patterns are merged and
/// zero coefficients dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FermionOperator {
    terms: Vec<FermionTerm>,
}

impl FermionOperator {
    pub fn from_terms<I: IntoIterator<Item = FermionTerm>>(terms: I) -> Self {
        let mut acc: BTreeMap<(Vec<usize>, Vec<usize>), Complex64> = BTreeMap::new();
        for mut t in terms {
            let Some(s1) = sort_with_sign(&mut t.creators, false) else { continue };
            let Some(s2) = sort_with_sign(&mut t.annihilators, true) else { continue };
            *acc.entry((t.creators, t.annihilators)).or_default() += t.coeff * (s1 * s2);
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm() > 1e-14)
            .map(|((creators, annihilators), coeff)| FermionTerm { coeff, creators, annihilators })
            .collect();
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = &FermionTerm> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the constant (index-free) term.
    pub fn constant(&self) -> Complex64 {
        self.terms.iter().find(|t| t.is_constant()).map(|t| t.coeff).unwrap_or_default()
    }

    pub fn coefficient(&self, creators: &[usize], annihilators: &[usize]) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.creators == creators && t.annihilators == annihilators)
            .map(|t| t.coeff)
            .unwrap_or_default()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.terms.iter().map(FermionTerm::adjoint))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let adj = self.adjoint();
        adj.len() == self.len()
            && adj
                .terms
                .iter()
                .zip(&self.terms)
                .all(|(a, b)| a.creators == b.creators && a.annihilators == b.annihilators && (a.coeff - b.coeff).norm() <= tol)
    }

    pub fn is_particle_conserving(&self) -> bool {
        self.terms.iter().all(|t| t.creators.len() == t.annihilators.len())
    }

    pub fn max_index(&self) -> Option<usize> {
        self.terms.iter().flat_map(|t| t.creators.iter().chain(&t.annihilators)).copied().max()
    }
}

/// Builds the electronic Hamiltonian over interleaved spin orbitals
/// (`2p` alpha, `2p + 1` beta):
///
/// ```text
/// H = E_core + sum_{pq,s} h_pq a^dag_ps a_qs
///   + 1/2 sum_{pqrs,s,t} (pq|rs) a^dag_ps a^dag_rt a_st a_qs
/// ```
///
/// The lowest `frozen_core` spatial orbitals are folded into `E_core` and
/// the one-body part first.
pub fn to_fermion_operator(ints: &SpinOrbitalIntegrals, frozen_core: usize) -> Result<FermionOperator, ChemError> {
    let ints = ints.freeze_core(frozen_core)?;
    let n = ints.n_spatial;
    let so = |p: usize, spin: usize| 2 * p + spin;
    let mut terms = Vec::new();
    terms.push(FermionTerm::new(ints.core_energy, vec![], vec![]));
    for p in 0..n {
        for q in 0..n {
            let v = ints.h(p, q);
            if v == 0.0 {
                continue;
            }
            for s in 0..2 {
                terms.push(FermionTerm::new(v, vec![so(p, s)], vec![so(q, s)]));
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = ints.g(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    for sg in 0..2 {
                        for tau in 0..2 {
                            let (cp, cr, as_, aq) = (so(p, sg), so(r, tau), so(s, tau), so(q, sg));
                            if cp == cr || as_ == aq {
                                continue;
                            }
                            terms.push(FermionTerm::new(0.5 * v, vec![cp, cr], vec![as_, aq]));
                        }
                    }
                }
            }
        }
    }
    Ok(FermionOperator::from_terms(terms))
}
