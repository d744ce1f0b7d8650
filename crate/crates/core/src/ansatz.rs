//! Disentangled UCCSD ansatz over spin orbitals.
//!
//! Each excitation `i` carries the anti-Hermitian generator
//! `A_i = s_i (T_i - T_i^dag)` with `T_i = a^dag_a a^dag_b ... a_j a_i` and
//! `s_i = +-1` chosen so that `A_i |ref> = |phi_i>`. Then
//! `exp(theta A_i)|ref> = cos(theta)|ref> + sin(theta)|phi_i>`, and the
//! product state `U(theta)|ref> = prod_i exp(theta_i A_i)|ref>` (first
//! excitation applied first) has `d Psi / d theta_i = |phi_i>` at
//! `theta = 0`.
//!
//! Under Jordan–Wigner `A_i = i sum_k kappa_k P_k` with mutually commuting
//! strings, so each factor is exactly a product of gadgets
//! `exp(-i angle P_k / 2)` with `angle = -2 theta kappa_k`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;

use crate::oracle::apply_string;
use crate::qubit::jw::map_product;
use crate::qubit::{PauliString, QubitOperator};
use crate::sim::Gadget;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum AnsatzError {
    #[error("excitation {label} is not valid from reference {reference:#b}")]
    NotAnExcitation { label: String, reference: u64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// One spin-orbital excitation with its amplitude and quasi-Newton
/// denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct Excitation {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    pub amplitude: f64,
    pub denominator: f64,
    /// Determinant reached from the reference.
    pub target: u64,
    /// `(P_k, kappa_k)` with `A = i sum_k kappa_k P_k`.
    pub pauli_expansion: Vec<(PauliString, f64)>,
}

impl Excitation {
    pub fn new(from: Vec<usize>, to: Vec<usize>, reference: u64) -> Result<Self, AnsatzError> {
        let bad = || AnsatzError::NotAnExcitation { label: label(&from, &to), reference };
        if from.is_empty() || from.len() != to.len() || !is_ascending(&from) || !is_ascending(&to) {
            return Err(bad());
        }
        let ann: Vec<usize> = from.iter().rev().copied().collect();
        let (sign, target) = apply_string(reference, &to, &ann).ok_or_else(bad)?;
        // T^dag = a^dag_i a^dag_j ... a_b a_a
        let to_rev: Vec<usize> = to.iter().rev().copied().collect();
        let mut op = QubitOperator::zero(64);
        for t in map_product(Complex64::new(sign, 0.0), &to, &ann) {
            op.add_term(t);
        }
        for t in map_product(Complex64::new(-sign, 0.0), &from, &to_rev) {
            op.add_term(t);
        }
        op.prune(1e-14);
        let pauli_expansion = op
            .terms()
            .map(|t| {
                debug_assert!(t.coeff.re.abs() < 1e-12, "generator must be anti-Hermitian");
                (t.string, t.coeff.im)
            })
            .collect();
        Ok(Self { from, to, amplitude: 0.0, denominator: 0.0, target, pauli_expansion })
    }

    pub fn rank(&self) -> usize {
        self.from.len()
    }

    pub fn label(&self) -> String {
        label(&self.from, &self.to)
    }

    /// Gadgets for `exp(theta A)`.
    pub fn gadgets(&self, theta: f64) -> impl Iterator<Item = Gadget> + '_ {
        self.pauli_expansion.iter().map(move |&(string, kappa)| Gadget { string, angle: -2.0 * theta * kappa })
    }

    fn sort_key(&self) -> (usize, &[usize], &[usize]) {
        (self.rank(), &self.from, &self.to)
    }
}

fn is_ascending(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

fn label(from: &[usize], to: &[usize]) -> String {
    let join = |v: &[usize]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
    format!("{}->{}", join(from), join(to))
}

fn parse_label(s: &str) -> Option<(Vec<usize>, Vec<usize>)> {
    let (a, b) = s.split_once("->")?;
    let list = |t: &str| t.split(',').map(|x| x.trim().parse().ok()).collect::<Option<Vec<usize>>>();
    Some((list(a)?, list(b)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzState {
    pub n_qubits: usize,
    pub reference: u64,
    pub excitations: Vec<Excitation>,
}

/// All spin-conserving singles and doubles out of `reference`, singles
/// first, each block in lexicographic `(from, to)` order. `orbital_energies`
/// are per spatial orbital and fill the denominators.
pub fn enumerate_uccsd(n_spin_orbitals: usize, reference: u64, orbital_energies: &[f64]) -> AnsatzState {
    let occ: Vec<usize> = (0..n_spin_orbitals).filter(|&p| reference >> p & 1 == 1).collect();
    let vir: Vec<usize> = (0..n_spin_orbitals).filter(|&p| reference >> p & 1 == 0).collect();
    let alpha = |v: &[usize]| v.iter().filter(|&&p| p % 2 == 0).count();
    let mut excitations = Vec::new();
    for &i in &occ {
        for &a in &vir {
            if i % 2 == a % 2 {
                excitations.push(Excitation::new(vec![i], vec![a], reference).expect("valid single"));
            }
        }
    }
    for (n, &i) in occ.iter().enumerate() {
        for &j in &occ[n + 1..] {
            for (m, &a) in vir.iter().enumerate() {
                for &b in &vir[m + 1..] {
                    if alpha(&[i, j]) == alpha(&[a, b]) {
                        excitations.push(Excitation::new(vec![i, j], vec![a, b], reference).expect("valid double"));
                    }
                }
            }
        }
    }
    excitations.sort_by(|x, y| x.sort_key().cmp(&y.sort_key()));
    let mut state = AnsatzState { n_qubits: n_spin_orbitals, reference, excitations };
    state.set_denominators(orbital_energies);
    state
}

/// Outcome of one rounding event.
#[derive(Debug, Clone, PartialEq)]
pub struct Rounded {
    pub state: AnsatzState,
    pub kept: usize,
}

impl AnsatzState {
    pub fn len(&self) -> usize {
        self.excitations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.excitations.is_empty()
    }

    /// `Delta_i = sum eps_occ - sum eps_virt` over spatial orbital energies.
    pub fn set_denominators(&mut self, orbital_energies: &[f64]) {
        let eps = |p: usize| orbital_energies.get(p / 2).copied().unwrap_or(0.0);
        for e in &mut self.excitations {
            e.denominator = e.from.iter().map(|&p| eps(p)).sum::<f64>() - e.to.iter().map(|&p| eps(p)).sum::<f64>();
        }
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.excitations.iter().map(|e| e.amplitude).collect()
    }

    pub fn set_amplitudes(&mut self, theta: &[f64]) {
        assert_eq!(theta.len(), self.excitations.len(), "amplitude count");
        for (e, &t) in self.excitations.iter_mut().zip(theta) {
            e.amplitude = t;
        }
    }

    pub fn targets(&self) -> impl Iterator<Item = u64> + '_ {
        self.excitations.iter().map(|e| e.target)
    }

    /// Every gadget of every excitation, in ansatz order.
    pub fn build_circuit(&self) -> Vec<Gadget> {
        self.excitations.iter().flat_map(|e| e.gadgets(e.amplitude)).collect()
    }

    /// As [`build_circuit`](Self::build_circuit), skipping excitations whose
    /// amplitude is exactly zero.
    pub fn active_circuit(&self) -> Vec<Gadget> {
        self.excitations.iter().filter(|e| e.amplitude != 0.0).flat_map(|e| e.gadgets(e.amplitude)).collect()
    }

    /// Keeps the largest amplitudes, chosen by the cumulative-weight rule
    /// with threshold `p`. Excitation `k` in decreasing-`|theta|` order is
    /// kept iff `W_k / W <= p`, where `W_k` sums `|theta|` strictly before
    /// `k` (or up to and including `k` when `inclusive`).
    pub fn round_with(&self, p: f64, inclusive: bool) -> Rounded {
        let total: f64 = self.excitations.iter().map(|e| e.amplitude.abs()).sum();
        if total == 0.0 {
            return Rounded { state: self.clone(), kept: 0 };
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        // stable sort keeps ansatz order on ties
        order.sort_by(|&a, &b| self.excitations[b].amplitude.abs().total_cmp(&self.excitations[a].amplitude.abs()));
        let mut out = self.clone();
        let mut prior = 0.0;
        let mut kept = 0;
        for &k in &order {
            let w = self.excitations[k].amplitude.abs();
            let cum = if inclusive { prior + w } else { prior };
            if cum / total <= p && w != 0.0 {
                kept += 1;
            } else {
                out.excitations[k].amplitude = 0.0;
            }
            prior += w;
        }
        Rounded { state: out, kept }
    }

    /// One rounding event with a fresh uniform `p` in `[0, 1)`.
    pub fn stochastic_round<R: Rng + ?Sized>(&self, inclusive: bool, rng: &mut R) -> Rounded {
        let p: f64 = rng.random();
        self.round_with(p, inclusive)
    }

    /// Text form: header lines then `label theta delta` per excitation.
    pub fn dump(&self) -> String {
        let mut out = format!("n_qubits {}\nreference {}\n", self.n_qubits, self.reference);
        for e in &self.excitations {
            writeln!(out, "{} {:e} {:e}", e.label(), e.amplitude, e.denominator).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, AnsatzError> {
        let mut n_qubits = None;
        let mut reference = None;
        let mut excitations = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |msg: &str| AnsatzError::Parse { line, msg: msg.to_string() };
            let fields: Vec<&str> = raw.split_whitespace().collect();
            match fields.as_slice() {
                [] => continue,
                ["n_qubits", v] => n_qubits = Some(v.parse::<usize>().map_err(|_| err("bad qubit count"))?),
                ["reference", v] => reference = Some(v.parse::<u64>().map_err(|_| err("bad reference"))?),
                [lab, theta, delta] => {
                    let r = reference.ok_or_else(|| err("excitation before reference"))?;
                    let (from, to) = parse_label(lab).ok_or_else(|| err("bad excitation label"))?;
                    let mut e = Excitation::new(from, to, r).map_err(|e| err(&e.to_string()))?;
                    e.amplitude = theta.parse().map_err(|_| err("bad amplitude"))?;
                    e.denominator = delta.parse().map_err(|_| err("bad denominator"))?;
                    excitations.push(e);
                }
                _ => return Err(err("expected `label theta delta`")),
            }
        }
        let err = |msg: &str| AnsatzError::Parse { line: 0, msg: msg.to_string() };
        Ok(Self {
            n_qubits: n_qubits.ok_or_else(|| err("missing n_qubits"))?,
            reference: reference.ok_or_else(|| err("missing reference"))?,
            excitations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::Pauli;
    use crate::sim::prepare_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Brute force: all masks in the reference sector differing by one or
    /// two electrons.
    fn brute_force_targets(n: usize, reference: u64) -> Vec<u64> {
        let even: u64 = 0x5555_5555_5555_5555;
        let counts = |m: u64| ((m & even).count_ones(), (m & !even).count_ones());
        let mut v: Vec<u64> = (0u64..1 << n)
            .filter(|&m| counts(m) == counts(reference) && m != reference)
            .filter(|&m| (m ^ reference).count_ones() <= 4)
            .collect();
        v.sort();
        v
    }

    #[test]
    fn h2_pool() {
        let a = enumerate_uccsd(4, 0b0011, &[-0.5, 0.6]);
        let labels: Vec<String> = a.excitations.iter().map(|e| e.label()).collect();
        assert_eq!(labels, ["0->2", "1->3", "0,1->2,3"]);
        assert!((a.excitations[0].denominator - (-1.1)).abs() < 1e-15);
        assert!((a.excitations[2].denominator - (-2.2)).abs() < 1e-15);
        let mut t: Vec<u64> = a.targets().collect();
        t.sort();
        assert_eq!(t, brute_force_targets(4, 0b0011));
        assert_eq!(a.excitations.iter().map(|e| e.pauli_expansion.len()).collect::<Vec<_>>(), [2, 2, 8]);
    }

    #[test]
    fn pools_match_brute_force() {
        for (n, r) in [(6, 0b000011u64), (8, 0b00001111), (6, 0b000111)] {
            let a = enumerate_uccsd(n, r, &[]);
            let mut t: Vec<u64> = a.targets().collect();
            t.sort();
            assert_eq!(t, brute_force_targets(n, r));
        }
        assert_eq!(enumerate_uccsd(6, 0b000011, &[]).len(), 8);
        assert_eq!(enumerate_uccsd(8, 0b00001111, &[]).len(), 26);
        assert!(enumerate_uccsd(4, 0b1111, &[]).is_empty());
    }

    #[test]
    fn single_generator_jw_form() {
        // A = a0^ a2 ... with reference |0b0011>: excitation 0 -> 2
        let e = Excitation::new(vec![0], vec![2], 0b0011).unwrap();
        let xzy = PauliString::from_letters(&[(0, Pauli::X), (1, Pauli::Z), (2, Pauli::Y)]);
        let yzx = PauliString::from_letters(&[(0, Pauli::Y), (1, Pauli::Z), (2, Pauli::X)]);
        let mut got = e.pauli_expansion.clone();
        got.sort_by(|a, b| a.0.cmp(&b.0));
        let mut want = vec![(xzy, 0.5), (yzx, -0.5)];
        want.sort_by(|a, b| a.0.cmp(&b.0));
        for (g, w) in got.iter().zip(&want) {
            assert_eq!(g.0, w.0);
            assert!((g.1 - w.1).abs() < 1e-15, "{} {}", g.1, w.1);
        }
    }

    #[test]
    fn expansion_strings_commute() {
        let a = enumerate_uccsd(8, 0b00001111, &[]);
        for e in &a.excitations {
            for (p, _) in &e.pauli_expansion {
                assert!(e.pauli_expansion.iter().all(|(q, _)| p.commutes_with(q)));
                assert!(p.y_count() % 2 == 1);
            }
        }
    }

    #[test]
    fn one_excitation_is_a_two_level_rotation() {
        let mut a = enumerate_uccsd(6, 0b000011, &[]);
        for k in 0..a.len() {
            let theta = 0.37;
            let mut th = vec![0.0; a.len()];
            th[k] = theta;
            a.set_amplitudes(&th);
            let s = prepare_state(6, 0b000011, &a.build_circuit()).unwrap();
            let t = a.excitations[k].target;
            assert!((s.amplitude(0b000011) - Complex64::new(theta.cos(), 0.0)).norm() < 1e-14);
            assert!((s.amplitude(t) - Complex64::new(theta.sin(), 0.0)).norm() < 1e-14);
        }
        a.set_amplitudes(&vec![0.0; a.len()]);
        let s = prepare_state(6, 0b000011, &a.build_circuit()).unwrap();
        assert_eq!(s.amplitude(0b000011), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn circuit_size() {
        let a = enumerate_uccsd(8, 0b00001111, &[]);
        let want: usize = a.excitations.iter().map(|e| 2 * e.rank() * e.rank()).sum();
        assert_eq!(a.build_circuit().len(), want);
        assert!(a.active_circuit().is_empty());
    }

    #[test]
    fn rounding_rules() {
        let mut a = enumerate_uccsd(4, 0b0011, &[]);
        a.set_amplitudes(&[0.0, 0.0, 0.2]);
        for p in [0.0, 0.5, 0.999] {
            assert_eq!(a.round_with(p, false).state.amplitudes(), [0.0, 0.0, 0.2]);
        }
        a.set_amplitudes(&[0.9, 0.1, 0.0]);
        assert_eq!(a.round_with(0.95, false).state.amplitudes(), [0.9, 0.1, 0.0]);
        assert_eq!(a.round_with(0.5, false).state.amplitudes(), [0.9, 0.0, 0.0]);
        assert_eq!(a.round_with(0.5, true).state.amplitudes(), [0.0, 0.0, 0.0]);
        assert_eq!(a.round_with(0.5, false).kept, 1);
        a.set_amplitudes(&[0.0; 3]);
        assert_eq!(a.round_with(0.1, false).state, a);
    }

    #[test]
    fn kept_set_is_a_prefix_and_first_always_survives() {
        let mut a = enumerate_uccsd(8, 0b00001111, &[]);
        let th: Vec<f64> = (0..a.len()).map(|k| ((k * 7919) % 13) as f64 * 0.01 - 0.06).collect();
        a.set_amplitudes(&th);
        let mut order: Vec<usize> = (0..a.len()).collect();
        order.sort_by(|&x, &y| th[y].abs().total_cmp(&th[x].abs()));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let r = a.stochastic_round(false, &mut rng);
            let kept: Vec<bool> = order.iter().map(|&k| r.state.excitations[k].amplitude != 0.0).collect();
            assert!(kept[0]);
            assert!(kept.windows(2).all(|w| w[0] || !w[1]));
            assert_eq!(kept.iter().filter(|&&k| k).count(), r.kept);
        }
    }

    #[test]
    fn dump_round_trip() {
        let mut a = enumerate_uccsd(6, 0b000011, &[-0.9, 0.1, 0.4]);
        let th: Vec<f64> = (0..a.len()).map(|k| 0.013 * k as f64 - 0.04).collect();
        a.set_amplitudes(&th);
        let back = AnsatzState::parse(&a.dump()).unwrap();
        assert_eq!(back, a);
        assert!(AnsatzState::parse("n_qubits 4\nreference 3\n0->1 0 0\n").is_err());
        assert!(matches!(AnsatzState::parse("n_qubits 4\n"), Err(AnsatzError::Parse { .. })));
    }
}
