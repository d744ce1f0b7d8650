use super::ChemError;

/// Molecular-orbital integrals for a real, spin-restricted orbital basis.
///
/// Two-electron integrals are in chemists' notation `(pq|rs)` and stored
/// densely; every setter writes all eight permutation-equivalent slots.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOrbitalIntegrals {
    pub n_spatial: usize,
    pub n_electrons: usize,
    /// Twice the spin projection, `n_alpha - n_beta`.
    pub ms2: i32,
    pub core_energy: f64,
    one_body: Vec<f64>,
    two_body: Vec<f64>,
    pub orbital_energies: Option<Vec<f64>>,
}

impl SpinOrbitalIntegrals {
    pub fn new(n_spatial: usize, n_electrons: usize, ms2: i32) -> Self {
        Self {
            n_spatial,
            n_electrons,
            ms2,
            core_energy: 0.0,
            one_body: vec![0.0; n_spatial * n_spatial],
            two_body: vec![0.0; n_spatial.pow(4)],
            orbital_energies: None,
        }
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn n_alpha(&self) -> usize {
        ((self.n_electrons as i64 + self.ms2 as i64) / 2) as usize
    }

    pub fn n_beta(&self) -> usize {
        ((self.n_electrons as i64 - self.ms2 as i64) / 2) as usize
    }

    /// Aufbau reference determinant over interleaved spin orbitals
    /// (`2p` is alpha, `2p + 1` is beta).
    pub fn reference_mask(&self) -> u64 {
        let mut m = 0u64;
        for i in 0..self.n_alpha() {
            m |= 1 << (2 * i);
        }
        for i in 0..self.n_beta() {
            m |= 1 << (2 * i + 1);
        }
        m
    }

    #[inline]
    fn idx4(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        let n = self.n_spatial;
        ((p * n + q) * n + r) * n + s
    }

    #[inline]
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.one_body[p * self.n_spatial + q]
    }

    pub fn set_h(&mut self, p: usize, q: usize, v: f64) {
        let n = self.n_spatial;
        self.one_body[p * n + q] = v;
        self.one_body[q * n + p] = v;
    }

    /// `(pq|rs)`.
    #[inline]
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.two_body[self.idx4(p, q, r, s)]
    }

    pub fn set_g(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            let i = self.idx4(a, b, c, d);
            self.two_body[i] = v;
        }
    }

    /// Checks the electron count, spin and the integral symmetries.
    pub fn validate(&self) -> Result<(), ChemError> {
        if self.n_electrons > 2 * self.n_spatial {
            return Err(ChemError::Invalid(format!(
                "{} electrons do not fit in {} spatial orbitals",
                self.n_electrons, self.n_spatial
            )));
        }
        if self.ms2.unsigned_abs() as usize > self.n_electrons
            || (self.n_electrons as i64 - self.ms2 as i64).rem_euclid(2) != 0
        {
            return Err(ChemError::Invalid(format!("MS2={} incompatible with {} electrons", self.ms2, self.n_electrons)));
        }
        if self.n_alpha() > self.n_spatial || self.n_beta() > self.n_spatial {
            return Err(ChemError::Invalid("spin occupation exceeds orbital count".into()));
        }
        if let Some(e) = &self.orbital_energies {
            if e.len() != self.n_spatial {
                return Err(ChemError::Invalid("orbital energy count differs from NORB".into()));
            }
        }
        let n = self.n_spatial;
        for p in 0..n {
            for q in 0..n {
                if self.h(p, q) != self.h(q, p) {
                    return Err(ChemError::Invalid(format!("one-body integrals not symmetric at ({p},{q})")));
                }
            }
        }
        Ok(())
    }

    /// Folds the lowest `n_frozen` doubly occupied orbitals into the core
    /// energy and an effective one-body operator over the remaining orbitals.
    pub fn freeze_core(&self, n_frozen: usize) -> Result<Self, ChemError> {
        if n_frozen == 0 {
            return Ok(self.clone());
        }
        if 2 * n_frozen >= self.n_electrons || n_frozen > self.n_beta() {
            return Err(ChemError::Invalid(format!(
                "cannot freeze {n_frozen} orbitals with {} electrons",
                self.n_electrons
            )));
        }
        let n = self.n_spatial;
        let na = n - n_frozen;
        let mut out = Self::new(na, self.n_electrons - 2 * n_frozen, self.ms2);
        let mut ecore = self.core_energy;
        for i in 0..n_frozen {
            ecore += 2.0 * self.h(i, i);
            for j in 0..n_frozen {
                ecore += 2.0 * self.g(i, i, j, j) - self.g(i, j, j, i);
            }
        }
        out.core_energy = ecore;
        for p in 0..na {
            for q in 0..=p {
                let (pp, qq) = (p + n_frozen, q + n_frozen);
                let mut v = self.h(pp, qq);
                for i in 0..n_frozen {
                    v += 2.0 * self.g(pp, qq, i, i) - self.g(pp, i, i, qq);
                }
                out.set_h(p, q, v);
            }
        }
        for p in 0..na {
            for q in 0..na {
                for r in 0..na {
                    for s in 0..na {
                        let i = out.idx4(p, q, r, s);
                        out.two_body[i] = self.g(p + n_frozen, q + n_frozen, r + n_frozen, s + n_frozen);
                    }
                }
            }
        }
        out.orbital_energies = self.orbital_energies.as_ref().map(|e| e[n_frozen..].to_vec());
        Ok(out)
    }

    /// Restricted Hartree–Fock energy of the aufbau reference, or the
    /// high-spin restricted open-shell energy when `ms2 != 0`.
    pub fn reference_energy(&self) -> f64 {
        let na = self.n_alpha();
        let nb = self.n_beta();
        let mut e = self.core_energy;
        for i in 0..na {
            e += self.h(i, i);
        }
        for i in 0..nb {
            e += self.h(i, i);
        }
        let pair = |occ_a: usize, occ_b: usize, same: bool| {
            let mut s = 0.0;
            for i in 0..occ_a {
                for j in 0..occ_b {
                    s += self.g(i, i, j, j);
                    if same {
                        s -= self.g(i, j, j, i);
                    }
                }
            }
            s
        };
        e += 0.5 * pair(na, na, true) + 0.5 * pair(nb, nb, true) + pair(na, nb, false);
        e
    }

    /// Diagonal of the Fock operator built from the reference occupation;
    /// a stand-in for canonical orbital energies when none were supplied.
    pub fn fock_diagonal(&self) -> Vec<f64> {
        let (na, nb) = (self.n_alpha(), self.n_beta());
        (0..self.n_spatial)
            .map(|p| {
                let mut f = self.h(p, p);
                for i in 0..na.max(nb) {
                    let occ = (i < na) as u8 as f64 + (i < nb) as u8 as f64;
                    f += occ * self.g(p, p, i, i) - 0.5 * occ * self.g(p, i, i, p);
                }
                f
            })
            .collect()
    }

    /// Orbital energies if present, otherwise the Fock diagonal.
    pub fn orbital_energies_or_fock(&self) -> Vec<f64> {
        self.orbital_energies.clone().unwrap_or_else(|| self.fock_diagonal())
    }
}
