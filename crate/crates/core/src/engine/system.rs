use num_complex::Complex64;

use crate::ansatz::{enumerate_uccsd, AnsatzState};
use crate::chem::{to_fermion_operator, FermionOperator, SpinOrbitalIntegrals};
use crate::qubit::{group_with, jordan_wigner, GroupingStrategy, CommutingGroup, PauliTerm, QubitOperator};

use super::EngineError;

/// Everything the propagation needs about one problem.
///
/// `operator` is the measured operator with its reference expectation
/// `offset` removed, so propagated energies are relative to the reference
/// determinant.
#[derive(Debug, Clone)]
pub struct System {
    pub n_qubits: usize,
    pub reference: u64,
    /// Physical Hamiltonian (no offset removed).
    pub hamiltonian: QubitOperator,
    /// Operator that drives the propagation, offset removed.
    pub operator: QubitOperator,
    pub offset: f64,
    pub groups: Vec<CommutingGroup>,
    pub grouping: GroupingStrategy,
    /// Spatial orbital energies for the quasi-Newton denominators.
    pub orbital_energies: Vec<f64>,
    pub fermion: Option<FermionOperator>,
    /// Folding point when `operator` is `(H - omega)^2`.
    pub omega: Option<f64>,
    /// For folded systems: groups of `H - E_ref` and `E_ref`, used to
    /// measure the projected energy of the physical Hamiltonian.
    pub physical: Option<(Vec<CommutingGroup>, f64)>,
}

impl System {
    pub fn from_integrals(
        ints: &SpinOrbitalIntegrals,
        frozen_core: usize,
        grouping: GroupingStrategy,
    ) -> Result<Self, EngineError> {
        let active = ints.freeze_core(frozen_core)?;
        let fermion = to_fermion_operator(ints, frozen_core)?;
        let n_qubits = active.n_spin_orbitals();
        let h = jordan_wigner(&fermion, n_qubits)?;
        let mut s = Self::from_operator(h, active.reference_mask(), active.orbital_energies_or_fock(), grouping);
        s.fermion = Some(fermion);
        Ok(s)
    }

    pub fn from_operator(h: QubitOperator, reference: u64, orbital_energies: Vec<f64>, grouping: GroupingStrategy) -> Self {
        let n_qubits = h.n_qubits();
        let mut s = Self {
            n_qubits,
            reference,
            operator: h.clone(),
            hamiltonian: h,
            offset: 0.0,
            groups: Vec::new(),
            grouping,
            orbital_energies,
            fermion: None,
            omega: None,
            physical: None,
        };
        s.rebuild();
        s
    }

    fn rebuild(&mut self) {
        let base = match self.omega {
            Some(w) => self.hamiltonian.square_shifted(w),
            None => self.hamiltonian.clone(),
        };
        self.offset = base.matrix_element(self.reference, self.reference).re;
        let mut op = base;
        op.add_term(PauliTerm::identity(-self.offset));
        op.prune(crate::qubit::DEFAULT_PRUNE_TOL);
        self.groups = group_with(&op, self.grouping);
        self.operator = op;
        self.physical = self.omega.map(|_| {
            let e_ref = self.reference_energy();
            let mut h = self.hamiltonian.clone();
            h.add_term(PauliTerm::identity(-e_ref));
            h.prune(crate::qubit::DEFAULT_PRUNE_TOL);
            (group_with(&h, self.grouping), e_ref)
        });
    }

    /// Same Hamiltonian with another reference determinant.
    pub fn with_reference(&self, reference: u64) -> Self {
        let mut s = self.clone();
        s.reference = reference;
        s.rebuild();
        s
    }

    /// Folded operator `(H - omega)^2` around the same reference.
    pub fn folded(&self, omega: f64) -> Self {
        let mut s = self.clone();
        s.omega = Some(omega);
        s.rebuild();
        s
    }

    /// Reference energy of the physical Hamiltonian.
    pub fn reference_energy(&self) -> f64 {
        self.hamiltonian.matrix_element(self.reference, self.reference).re
    }

    pub fn ansatz(&self) -> AnsatzState {
        enumerate_uccsd(self.n_qubits, self.reference, &self.orbital_energies)
    }

    /// Coefficient of the identity string in `operator`.
    pub fn identity_coefficient(&self) -> Complex64 {
        self.operator.identity_coefficient()
    }

    /// `<psi|H|psi>` of the physical Hamiltonian.
    pub fn energy(&self, psi: &[Complex64]) -> f64 {
        self.hamiltonian.expectation(psi).re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::{hydrogen_chain_integrals, Length};

    #[test]
    fn h2_system() {
        let ints = hydrogen_chain_integrals(2, Length::Angstrom(0.7414), 0).unwrap();
        let s = System::from_integrals(&ints, 0, GroupingStrategy::default()).unwrap();
        assert_eq!(s.n_qubits, 4);
        assert_eq!(s.reference, 0b0011);
        assert_eq!(s.hamiltonian.len(), 15);
        assert!((s.offset - ints.reference_energy()).abs() < 1e-10);
        assert!(s.operator.matrix_element(0b0011, 0b0011).norm() < 1e-12);
        assert!(s.groups[0].is_diagonal);
        assert_eq!(s.ansatz().len(), 3);
        let f = s.folded(-1.0);
        let e = s.reference_energy();
        // <(H+1)^2> >= <H+1>^2 on the reference
        assert!(f.offset >= (e + 1.0).powi(2) - 1e-12);
        assert!(f.operator.matrix_element(0b0011, 0b0011).norm() < 1e-12);
    }
}
