//! Exact full configuration interaction in a fixed particle/spin sector.
//!
//! Determinants are bitmasks over interleaved spin orbitals and are read as
//! `a^dag_{p1} a^dag_{p2} ... |vac>` with `p1 < p2 < ...`; a ladder operator
//! on orbital `p` picks up `(-1)^(occupied orbitals below p)`. This is the
//! same phase convention as the Jordan–Wigner map.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::ansatz::AnsatzState;
use crate::chem::SpinOrbitalIntegrals;
use crate::sim::{prepare_state, SimError};

/// Largest sector handled by the dense eigensolver unless overridden.
pub const DEFAULT_DIM_CAP: usize = 4096;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("sector dimension {dim} exceeds cap {cap}")]
    CapExceeded { dim: usize, cap: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

/// Sign of `a_p` or `a^dag_p` acting on `mask`.
#[inline]
fn parity_below(mask: u64, p: usize) -> f64 {
    if (mask & ((1u64 << p) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `a_p |mask>` as `(sign, mask')`, or `None` if `p` is empty.
pub fn annihilate(mask: u64, p: usize) -> Option<(f64, u64)> {
    (mask >> p & 1 == 1).then(|| (parity_below(mask, p), mask & !(1 << p)))
}

/// `a^dag_p |mask>` as `(sign, mask')`, or `None` if `p` is occupied.
pub fn create(mask: u64, p: usize) -> Option<(f64, u64)> {
    (mask >> p & 1 == 0).then(|| (parity_below(mask, p), mask | (1 << p)))
}

/// Applies `a^dag_{c1} ... a^dag_{ck} a_{a1} ... a_{al}` (rightmost first).
pub fn apply_string(mask: u64, creators: &[usize], annihilators: &[usize]) -> Option<(f64, u64)> {
    let mut sign = 1.0;
    let mut m = mask;
    for &p in annihilators.iter().rev() {
        let (s, next) = annihilate(m, p)?;
        sign *= s;
        m = next;
    }
    for &p in creators.iter().rev() {
        let (s, next) = create(m, p)?;
        sign *= s;
        m = next;
    }
    Some((sign, m))
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let p = m.trailing_zeros() as usize;
            m &= m - 1;
            p
        })
    })
}

/// All determinants with fixed alpha and beta counts, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterminantBasis {
    pub n_spin_orbitals: usize,
    pub n_electrons: usize,
    pub ms2: i32,
    pub determinants: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl DeterminantBasis {
    pub fn new(n_spatial: usize, n_alpha: usize, n_beta: usize) -> Self {
        let n_so = 2 * n_spatial;
        let alpha_mask: u64 = (0..n_spatial).fold(0, |m, p| m | 1 << (2 * p));
        let beta_mask = alpha_mask << 1;
        let determinants: Vec<u64> = (0u64..1 << n_so)
            .filter(|&d| (d & alpha_mask).count_ones() as usize == n_alpha && (d & beta_mask).count_ones() as usize == n_beta)
            .collect();
        let index = determinants.iter().enumerate().map(|(i, &d)| (d, i)).collect();
        Self { n_spin_orbitals: n_so, n_electrons: n_alpha + n_beta, ms2: n_alpha as i32 - n_beta as i32, determinants, index }
    }

    pub fn for_integrals(ints: &SpinOrbitalIntegrals) -> Self {
        Self::new(ints.n_spatial, ints.n_alpha(), ints.n_beta())
    }

    pub fn len(&self) -> usize {
        self.determinants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.determinants.is_empty()
    }

    pub fn index_of(&self, det: u64) -> Option<usize> {
        self.index.get(&det).copied()
    }
}

/// Spin-orbital integrals derived from the spatial ones.
struct SpinIntegrals<'a> {
    ints: &'a SpinOrbitalIntegrals,
}

impl SpinIntegrals<'_> {
    fn h(&self, p: usize, q: usize) -> f64 {
        if p % 2 != q % 2 {
            0.0
        } else {
            self.ints.h(p / 2, q / 2)
        }
    }

    /// Physicists' `<pq|rs>` = `(pr|qs)` with spin deltas.
    fn phys(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        if p % 2 != r % 2 || q % 2 != s % 2 {
            0.0
        } else {
            self.ints.g(p / 2, r / 2, q / 2, s / 2)
        }
    }

    /// `<pq||rs>`.
    fn anti(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.phys(p, q, r, s) - self.phys(p, q, s, r)
    }
}

/// `<bra|H|ket>` by the Slater–Condon rules, core energy included.
pub fn slater_condon(ints: &SpinOrbitalIntegrals, bra: u64, ket: u64) -> f64 {
    let si = SpinIntegrals { ints };
    let diff = bra ^ ket;
    match diff.count_ones() {
        0 => {
            let occ: Vec<usize> = bits(ket).collect();
            let mut e = ints.core_energy;
            for (n, &i) in occ.iter().enumerate() {
                e += si.h(i, i);
                for &j in &occ[..n] {
                    e += si.anti(i, j, i, j);
                }
            }
            e
        }
        2 => {
            let i = (ket & diff).trailing_zeros() as usize;
            let a = (bra & diff).trailing_zeros() as usize;
            let Some((sign, _)) = apply_string(ket, &[a], &[i]) else { return 0.0 };
            let mut v = si.h(a, i);
            for j in bits(ket & !(1 << i)) {
                v += si.anti(a, j, i, j);
            }
            sign * v
        }
        4 => {
            let mut from = bits(ket & diff);
            let (i, j) = (from.next().unwrap(), from.next().unwrap());
            let mut to = bits(bra & diff);
            let (a, b) = (to.next().unwrap(), to.next().unwrap());
            match apply_string(ket, &[a, b], &[j, i]) {
                Some((sign, _)) => sign * si.anti(a, b, i, j),
                None => 0.0,
            }
        }
        _ => 0.0,
    }
}

/// Dense sector Hamiltonian.
pub fn build_sector_hamiltonian(ints: &SpinOrbitalIntegrals, basis: &DeterminantBasis) -> DMatrix<f64> {
    let n = basis.len();
    let mut m = DMatrix::zeros(n, n);
    for (i, &bi) in basis.determinants.iter().enumerate() {
        for (j, &bj) in basis.determinants.iter().enumerate().take(i + 1) {
            let v = slater_condon(ints, bi, bj);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Eigenpairs in ascending eigenvalue order; eigenvector `k` is column `k`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.values[0]
    }

    pub fn vector(&self, k: usize) -> DVector<f64> {
        self.vectors.column(k).into_owned()
    }
}

pub fn fci_spectrum(matrix: &DMatrix<f64>) -> Result<Spectrum, OracleError> {
    fci_spectrum_capped(matrix, DEFAULT_DIM_CAP)
}

pub fn fci_spectrum_capped(matrix: &DMatrix<f64>, cap: usize) -> Result<Spectrum, OracleError> {
    let (rows, cols) = matrix.shape();
    if rows != cols {
        return Err(OracleError::NotSquare { rows, cols });
    }
    if rows > cap {
        return Err(OracleError::CapExceeded { dim: rows, cap });
    }
    let eig = SymmetricEigen::new(matrix.clone());
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(rows, rows);
    for (col, &k) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(k).into_owned();
        if v[v.iamax()] < 0.0 {
            v = -v;
        }
        vectors.set_column(col, &v);
    }
    Ok(Spectrum { values, vectors })
}

/// Ground-state FCI energy (total, core included) of the reference sector.
pub fn fci_ground_energy(ints: &SpinOrbitalIntegrals) -> Result<f64, OracleError> {
    let basis = DeterminantBasis::for_integrals(ints);
    Ok(fci_spectrum(&build_sector_hamiltonian(ints, &basis))?.ground_energy())
}

/// Coefficients of `U(theta)|ref>` on the determinants of `basis`, and the
/// probability weight left outside the basis.
pub fn exact_state(ansatz: &AnsatzState, basis: &DeterminantBasis) -> Result<(DVector<f64>, f64), SimError> {
    let psi = prepare_state(ansatz.n_qubits, ansatz.reference, &ansatz.build_circuit())?;
    let v = DVector::from_iterator(basis.len(), basis.determinants.iter().map(|&d| psi.amplitude(d).re));
    let inside: f64 = basis.determinants.iter().map(|&d| psi.amplitude(d).norm_sqr()).sum();
    Ok((v, (1.0 - inside).max(0.0)))
}
