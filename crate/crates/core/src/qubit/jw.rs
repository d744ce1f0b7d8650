//! Jordan–Wigner mapping.
//!
//! Occupied spin-orbital `p` is qubit `p` in state `|1>`. The ladder
//! operators map as
//!
//! ```text
//! a_p^dag = (X_p - i Y_p)/2 * Z_0 ... Z_{p-1}
//! a_p     = (X_p + i Y_p)/2 * Z_0 ... Z_{p-1}
//! ```
//!
//! which matches determinants written as `a_{p1}^dag a_{p2}^dag ... |vac>`
//! with `p1 < p2 < ...`. The oracle's Slater–Condon phases use the same
//! ordering.

use std::collections::HashMap;

use num_complex::Complex64;

use super::pauli::{PauliString, PauliTerm, MAX_QUBITS};
use super::{QubitError, QubitOperator};
use crate::chem::FermionOperator;

fn ladder(p: usize, creation: bool) -> [PauliTerm; 2] {
    let below = (1u64 << p) - 1;
    let bit = 1u64 << p;
    let y_sign = if creation { -0.5 } else { 0.5 };
    [
        PauliTerm::new(PauliString::new(bit, below), Complex64::new(0.5, 0.0)),
        PauliTerm::new(PauliString::new(bit, below | bit), Complex64::new(0.0, y_sign)),
    ]
}

/// Maps a product `coeff * a^dag_{c1} ... a^dag_{ck} a_{a1} ... a_{al}` to Pauli
/// terms (not yet merged).
pub fn map_product(coeff: Complex64, creators: &[usize], annihilators: &[usize]) -> Vec<PauliTerm> {
    let mut acc = vec![PauliTerm::new(PauliString::IDENTITY, coeff)];
    let ops = creators.iter().map(|&p| (p, true)).chain(annihilators.iter().map(|&p| (p, false)));
    for (p, creation) in ops {
        let pair = ladder(p, creation);
        let mut next = Vec::with_capacity(acc.len() * 2);
        for t in &acc {
            for l in &pair {
                next.push(t.multiply(l));
            }
        }
        acc = next;
    }
    acc
}

/// Maps a fermionic operator onto `n_qubits` qubits.
pub fn jordan_wigner(f: &FermionOperator, n_qubits: usize) -> Result<QubitOperator, QubitError> {
    if n_qubits > MAX_QUBITS {
        return Err(QubitError::IndexOverflow { index: n_qubits - 1, n_qubits: MAX_QUBITS });
    }
    let mut acc: HashMap<PauliString, Complex64> = HashMap::new();
    for term in f.terms() {
        if let Some(&bad) = term.creators.iter().chain(&term.annihilators).find(|&&p| p >= n_qubits) {
            return Err(QubitError::IndexOverflow { index: bad, n_qubits });
        }
        for t in map_product(term.coeff, &term.creators, &term.annihilators) {
            *acc.entry(t.string).or_default() += t.coeff;
        }
    }
    let mut op = QubitOperator::from_terms(n_qubits, acc.into_iter().map(|(s, c)| PauliTerm::new(s, c)));
    if f.is_hermitian(1e-12) {
        op.clean_hermitian(1e-12);
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::FermionTerm;
    use crate::qubit::pauli::Pauli;

    type Mat = Vec<Vec<Complex64>>;

    fn kron(a: &Mat, b: &Mat) -> Mat {
        let (na, nb) = (a.len(), b.len());
        let mut out = vec![vec![Complex64::default(); na * nb]; na * nb];
        for i in 0..na {
            for j in 0..na {
                for k in 0..nb {
                    for l in 0..nb {
                        out[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        out
    }

    fn matmul(a: &Mat, b: &Mat) -> Mat {
        let n = a.len();
        let mut out = vec![vec![Complex64::default(); n]; n];
        for i in 0..n {
            for k in 0..n {
                if a[i][k].norm() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    /// Dense annihilation operator built from 2x2 blocks. Qubit `q` is bit `q`
    /// of the basis index, so the tensor product runs from qubit n-1 down to 0.
    fn dense_annihilator(p: usize, n: usize) -> Mat {
        let c = |re: f64| Complex64::new(re, 0.0);
        let id = vec![vec![c(1.0), c(0.0)], vec![c(0.0), c(1.0)]];
        let z = vec![vec![c(1.0), c(0.0)], vec![c(0.0), c(-1.0)]];
        // |0><1| : takes occupied (1) to empty (0)
        let lower = vec![vec![c(0.0), c(1.0)], vec![c(0.0), c(0.0)]];
        let mut m = vec![vec![c(1.0)]];
        for q in (0..n).rev() {
            let f = if q < p {
                &z
            } else if q == p {
                &lower
            } else {
                &id
            };
            m = kron(&m, f);
        }
        m
    }

    fn dagger(m: &Mat) -> Mat {
        let n = m.len();
        (0..n).map(|i| (0..n).map(|j| m[j][i].conj()).collect()).collect()
    }

    #[test]
    fn number_operator_is_half_identity_minus_z() {
        let f = FermionOperator::from_terms(vec![FermionTerm::new(1.0, vec![2], vec![2])]);
        let q = jordan_wigner(&f, 3).unwrap();
        assert_eq!(q.len(), 2);
        assert!((q.identity_coefficient().re - 0.5).abs() < 1e-15);
        let z2 = PauliString::from_letters(&[(2, Pauli::Z)]);
        assert!((q.coefficient(&z2).re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn ladder_images_match_dense_matrices() {
        let n = 3;
        for p in 0..n {
            for create in [true, false] {
                let f = if create {
                    FermionOperator::from_terms(vec![FermionTerm::new(1.0, vec![p], vec![])])
                } else {
                    FermionOperator::from_terms(vec![FermionTerm::new(1.0, vec![], vec![p])])
                };
                let got = jordan_wigner(&f, n).unwrap().to_dense();
                let a = dense_annihilator(p, n);
                let want = if create { dagger(&a) } else { a };
                for i in 0..8 {
                    for j in 0..8 {
                        assert!((got[i][j] - want[i][j]).norm() < 1e-14, "p={p} create={create}");
                    }
                }
            }
        }
    }

    #[test]
    fn single_excitation_generator_form() {
        // t(a_i^dag a_a - a_a^dag a_i), i=0, a=3: (i t/2) Z1 Z2 (X_0 Y_3 - Y_0 X_3)
        let t = 0.3;
        let f = FermionOperator::from_terms(vec![
            FermionTerm::new(t, vec![0], vec![3]),
            FermionTerm::new(-t, vec![3], vec![0]),
        ]);
        let q = jordan_wigner(&f, 4).unwrap();
        assert_eq!(q.len(), 2);
        let xy = PauliString::from_letters(&[(0, Pauli::X), (1, Pauli::Z), (2, Pauli::Z), (3, Pauli::Y)]);
        let yx = PauliString::from_letters(&[(0, Pauli::Y), (1, Pauli::Z), (2, Pauli::Z), (3, Pauli::X)]);
        assert!((q.coefficient(&xy) - Complex64::new(0.0, t / 2.0)).norm() < 1e-15);
        assert!((q.coefficient(&yx) - Complex64::new(0.0, -t / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn anticommutation_relations_hold() {
        let n = 3;
        for p in 0..n {
            for q in 0..n {
                let ap = dense_annihilator(p, n);
                let aq_dag = dagger(&dense_annihilator(q, n));
                let s1 = matmul(&ap, &aq_dag);
                let s2 = matmul(&aq_dag, &ap);
                for i in 0..8 {
                    for j in 0..8 {
                        let want = if p == q && i == j { 1.0 } else { 0.0 };
                        assert!(((s1[i][j] + s2[i][j]).re - want).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn index_overflow_is_an_error() {
        let f = FermionOperator::from_terms(vec![FermionTerm::new(1.0, vec![4], vec![0])]);
        assert!(matches!(jordan_wigner(&f, 4), Err(QubitError::IndexOverflow { index: 4, .. })));
    }
}
