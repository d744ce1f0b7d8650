//! Linear hydrogen chains in the STO-3G basis with a restricted
//! Hartree–Fock solution.
//!
//! Every atom carries one contracted 1s function, so all integrals reduce
//! to closed forms over s-type Gaussians and the zeroth Boys function.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{ChemError, SpinOrbitalIntegrals};

/// Bohr radius in Angstrom.
pub const BOHR_ANGSTROM: f64 = 0.529_177_210_92;

const STO3G_EXP: [f64; 3] = [3.425_250_91, 0.623_913_73, 0.168_855_40];
const STO3G_COEF: [f64; 3] = [0.154_328_97, 0.535_328_14, 0.444_634_54];

/// A length with its unit attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Length {
    Angstrom(f64),
    Bohr(f64),
}

impl Length {
    pub fn bohr(self) -> f64 {
        match self {
            Length::Angstrom(v) => v / BOHR_ANGSTROM,
            Length::Bohr(v) => v,
        }
    }

    pub fn angstrom(self) -> f64 {
        match self {
            Length::Angstrom(v) => v,
            Length::Bohr(v) => v * BOHR_ANGSTROM,
        }
    }

    /// Parses `1.5A`, `1.5 Å`, `1.5angstrom`, `2.8a0` or `2.8bohr`. A bare
    /// number is rejected so the unit is never guessed.
    pub fn parse(text: &str) -> Result<Self, String> {
        let t = text.trim();
        let split = t
            .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-' || c == '+' || c == 'e' || c == 'E'))
            .ok_or_else(|| format!("length '{t}' has no unit (use A or a0)"))?;
        let (num, unit) = t.split_at(split);
        let v: f64 = num.trim().parse().map_err(|_| format!("bad length '{t}'"))?;
        match unit.trim().to_ascii_lowercase().as_str() {
            "a" | "å" | "ang" | "angstrom" => Ok(Length::Angstrom(v)),
            "a0" | "bohr" => Ok(Length::Bohr(v)),
            u => Err(format!("unknown length unit '{u}'")),
        }
    }
}

impl std::fmt::Display for Length {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Length::Angstrom(v) => write!(f, "{v}A"),
            Length::Bohr(v) => write!(f, "{v}a0"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScfOptions {
    pub energy_tol: f64,
    pub max_iter: usize,
    /// Weight of the previous density in the mixed density.
    pub damping: f64,
}

impl Default for ScfOptions {
    fn default() -> Self {
        Self { energy_tol: 1e-10, max_iter: 200, damping: 0.5 }
    }
}

/// Zeroth-order Boys function `F0(t) = (1/2) sqrt(pi/t) erf(sqrt t)`.
pub fn boys_f0(t: f64) -> f64 {
    if t < 1e-8 {
        1.0 - t / 3.0
    } else {
        0.5 * (PI / t).sqrt() * libm::erf(t.sqrt())
    }
}

#[derive(Debug, Clone, Copy)]
struct Primitive {
    alpha: f64,
    /// Contraction coefficient times the primitive normalisation.
    c: f64,
}

fn sto3g_1s() -> [Primitive; 3] {
    let mut out = [Primitive { alpha: 0.0, c: 0.0 }; 3];
    for k in 0..3 {
        let a = STO3G_EXP[k];
        out[k] = Primitive { alpha: a, c: STO3G_COEF[k] * (2.0 * a / PI).powf(0.75) };
    }
    out
}

/// Atomic-orbital integrals over 1s functions centred on points along z.
struct AoIntegrals {
    s: DMatrix<f64>,
    h: DMatrix<f64>,
    eri: Vec<f64>,
    n: usize,
}

impl AoIntegrals {
    fn eri(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n;
        self.eri[((p * n + q) * n + r) * n + s]
    }
}

fn ao_integrals(z: &[f64], charges: &[f64]) -> AoIntegrals {
    let n = z.len();
    let basis = sto3g_1s();
    let mut s = DMatrix::zeros(n, n);
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let rab2 = (z[i] - z[j]).powi(2);
            let (mut sij, mut tij, mut vij) = (0.0, 0.0, 0.0);
            for pa in &basis {
                for pb in &basis {
                    let p = pa.alpha + pb.alpha;
                    let mu = pa.alpha * pb.alpha / p;
                    let cc = pa.c * pb.c;
                    let ov = (PI / p).powf(1.5) * (-mu * rab2).exp();
                    sij += cc * ov;
                    tij += cc * mu * (3.0 - 2.0 * mu * rab2) * ov;
                    let pz = (pa.alpha * z[i] + pb.alpha * z[j]) / p;
                    for (zc, &qc) in z.iter().zip(charges) {
                        vij -= cc * qc * 2.0 * PI / p * (-mu * rab2).exp() * boys_f0(p * (pz - zc).powi(2));
                    }
                }
            }
            s[(i, j)] = sij;
            h[(i, j)] = tij + vij;
        }
    }
    let mut eri = vec![0.0; n.pow(4)];
    let idx = |p: usize, q: usize, r: usize, t: usize| ((p * n + q) * n + r) * n + t;
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for t in 0..=r {
                    if p * (p + 1) / 2 + q < r * (r + 1) / 2 + t {
                        continue;
                    }
                    let mut v = 0.0;
                    for a in &basis {
                        for b in &basis {
                            let pp = a.alpha + b.alpha;
                            let pz = (a.alpha * z[p] + b.alpha * z[q]) / pp;
                            let kab = (-a.alpha * b.alpha / pp * (z[p] - z[q]).powi(2)).exp();
                            for c in &basis {
                                for d in &basis {
                                    let qq = c.alpha + d.alpha;
                                    let qz = (c.alpha * z[r] + d.alpha * z[t]) / qq;
                                    let kcd = (-c.alpha * d.alpha / qq * (z[r] - z[t]).powi(2)).exp();
                                    let pre = 2.0 * PI.powf(2.5) / (pp * qq * (pp + qq).sqrt());
                                    let arg = pp * qq / (pp + qq) * (pz - qz).powi(2);
                                    v += a.c * b.c * c.c * d.c * pre * kab * kcd * boys_f0(arg);
                                }
                            }
                        }
                    }
                    for (i, j, k, l) in [(p, q, r, t), (q, p, r, t), (p, q, t, r), (q, p, t, r), (r, t, p, q), (t, r, p, q), (r, t, q, p), (t, r, q, p)] {
                        eri[idx(i, j, k, l)] = v;
                    }
                }
            }
        }
    }
    AoIntegrals { s, h, eri, n }
}

fn fock(ao: &AoIntegrals, d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = ao.n;
    let mut f = ao.h.clone();
    for p in 0..n {
        for q in 0..n {
            let mut g = 0.0;
            for r in 0..n {
                for s in 0..n {
                    g += d[(r, s)] * (ao.eri(p, q, r, s) - 0.5 * ao.eri(p, r, s, q));
                }
            }
            f[(p, q)] += g;
        }
    }
    f
}

/// Orbital coefficients and energies from `F C = S C e`, ascending.
fn solve_roothaan(f: &DMatrix<f64>, x: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let fp = x.transpose() * f * x;
    let eig = SymmetricEigen::new(fp);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let n = f.nrows();
    let mut c = DMatrix::zeros(n, n);
    let mut e = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        let mut v = x * eig.eigenvectors.column(k);
        // fix the arbitrary eigenvector sign: largest component positive
        let imax = v.iamax();
        if v[imax] < 0.0 {
            v = -v;
        }
        c.set_column(col, &v);
        e.push(eig.eigenvalues[k]);
    }
    (c, e)
}

/// Result of a converged restricted Hartree–Fock calculation.
#[derive(Debug, Clone)]
pub struct ScfSolution {
    pub energy: f64,
    pub iterations: usize,
    pub integrals: SpinOrbitalIntegrals,
}

/// Builds molecular-orbital integrals for `n_atoms` hydrogens spaced evenly
/// along a line, with total `charge`.
pub fn hydrogen_chain_integrals(n_atoms: usize, spacing: Length, charge: i32) -> Result<SpinOrbitalIntegrals, ChemError> {
    hydrogen_chain_scf(n_atoms, spacing, charge, ScfOptions::default()).map(|s| s.integrals)
}

pub fn hydrogen_chain_scf(n_atoms: usize, spacing: Length, charge: i32, opts: ScfOptions) -> Result<ScfSolution, ChemError> {
    let n_elec = n_atoms as i64 - charge as i64;
    if n_atoms == 0 || n_elec < 0 {
        return Err(ChemError::Invalid(format!("{n_atoms} atoms with charge {charge}")));
    }
    if n_elec % 2 != 0 {
        return Err(ChemError::Unsupported(format!(
            "{n_elec} electrons: only closed-shell chains are generated; supply an FCIDUMP for open shells"
        )));
    }
    if n_elec == 0 {
        return Err(ChemError::Invalid("no electrons".into()));
    }
    let d = spacing.bohr();
    if d <= 0.0 {
        return Err(ChemError::Invalid(format!("spacing {spacing} must be positive")));
    }
    let z: Vec<f64> = (0..n_atoms).map(|i| i as f64 * d).collect();
    let charges = vec![1.0; n_atoms];
    let mut e_nuc = 0.0;
    for i in 0..n_atoms {
        for j in 0..i {
            e_nuc += 1.0 / (z[i] - z[j]).abs();
        }
    }
    let ao = ao_integrals(&z, &charges);
    let n = n_atoms;
    let n_occ = (n_elec / 2) as usize;

    let seig = SymmetricEigen::new(ao.s.clone());
    let inv_sqrt = DMatrix::from_diagonal(&seig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    let x = &seig.eigenvectors * inv_sqrt * seig.eigenvectors.transpose();

    let density = |c: &DMatrix<f64>| {
        let occ = c.columns(0, n_occ);
        2.0 * &occ * occ.transpose()
    };
    let energy = |d: &DMatrix<f64>, f: &DMatrix<f64>| 0.5 * (d.component_mul(&(&ao.h + f))).sum() + e_nuc;

    let (c0, _) = solve_roothaan(&ao.h, &x);
    let mut dm = density(&c0);
    let mut e_old = f64::INFINITY;
    let mut converged_at = None;
    for it in 1..=opts.max_iter {
        let f = fock(&ao, &dm);
        let e = energy(&dm, &f);
        let (c, _) = solve_roothaan(&f, &x);
        let d_new = density(&c);
        let d_change = (&d_new - &dm).amax();
        if (e - e_old).abs() < opts.energy_tol && d_change < opts.energy_tol.sqrt() {
            dm = d_new;
            converged_at = Some(it);
            break;
        }
        dm = opts.damping * &dm + (1.0 - opts.damping) * d_new;
        e_old = e;
    }
    let iterations = converged_at.ok_or(ChemError::ScfNotConverged { iterations: opts.max_iter })?;
    // final orbitals from the undamped density so that F is diagonal in the MO basis
    let f = fock(&ao, &dm);
    let (c, eps) = solve_roothaan(&f, &x);
    let dm = density(&c);
    let e_scf = energy(&dm, &fock(&ao, &dm));

    let h_mo = c.transpose() * &ao.h * &c;
    let mut ints = SpinOrbitalIntegrals::new(n, n_elec as usize, 0);
    ints.core_energy = e_nuc;
    for p in 0..n {
        for q in 0..=p {
            ints.set_h(p, q, 0.5 * (h_mo[(p, q)] + h_mo[(q, p)]));
        }
    }
    // four quarter transformations
    let mut t = ao.eri.clone();
    for axis in 0..4 {
        let mut out = vec![0.0; n.pow(4)];
        for a in 0..n {
            for b in 0..n {
                for cidx in 0..n {
                    for dd in 0..n {
                        let mut v = 0.0;
                        for k in 0..n {
                            let mut ix = [a, b, cidx, dd];
                            let m = ix[axis];
                            ix[axis] = k;
                            v += c[(k, m)] * t[((ix[0] * n + ix[1]) * n + ix[2]) * n + ix[3]];
                        }
                        out[((a * n + b) * n + cidx) * n + dd] = v;
                    }
                }
            }
        }
        t = out;
    }
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    if p * (p + 1) / 2 + q >= r * (r + 1) / 2 + s {
                        ints.set_g(p, q, r, s, t[((p * n + q) * n + r) * n + s]);
                    }
                }
            }
        }
    }
    ints.orbital_energies = Some(eps);
    Ok(ScfSolution { energy: e_scf, iterations, integrals: ints })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boys_small_and_large() {
        assert!((boys_f0(0.0) - 1.0).abs() < 1e-15);
        assert!((boys_f0(1e-9) - (1.0 - 1e-9 / 3.0)).abs() < 1e-15);
        // F0(t) -> sqrt(pi/t)/2 for large t
        assert!((boys_f0(50.0) - 0.5 * (PI / 50.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sto3g_1s_is_normalised() {
        let ao = ao_integrals(&[0.0], &[1.0]);
        assert!((ao.s[(0, 0)] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn length_units() {
        assert_eq!(Length::parse("1.5A").unwrap(), Length::Angstrom(1.5));
        assert_eq!(Length::parse("2.8 a0").unwrap(), Length::Bohr(2.8));
        assert_eq!(Length::parse("2.8bohr").unwrap(), Length::Bohr(2.8));
        assert!(Length::parse("1.5").is_err());
        assert!(Length::parse("1.5 nm").is_err());
        assert!((Length::Bohr(1.0).angstrom() - BOHR_ANGSTROM).abs() < 1e-15);
    }

    #[test]
    fn h2_hartree_fock_energy() {
        // independent reference value from a standard quantum-chemistry package
        let sol = hydrogen_chain_scf(2, Length::Angstrom(0.7414), 0, ScfOptions::default()).unwrap();
        assert!((sol.energy - (-1.116_684_387_1)).abs() < 1e-6, "{}", sol.energy);
        assert!((sol.integrals.reference_energy() - sol.energy).abs() < 1e-9);
    }

    #[test]
    fn odd_electron_count_is_unsupported() {
        assert!(matches!(hydrogen_chain_integrals(3, Length::Angstrom(1.5), 0), Err(ChemError::Unsupported(_))));
        assert!(hydrogen_chain_integrals(2, Length::Angstrom(0.0), 0).is_err());
    }
}
