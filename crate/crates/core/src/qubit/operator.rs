use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::pauli::{Pauli, PauliString, PauliTerm, MAX_QUBITS};
use super::QubitError;

/// Coefficients below this magnitude are dropped.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-12;

/// Sum of Pauli strings in canonical form: one coefficient per string,
/// stored in a deterministic order.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitOperator {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl QubitOperator {
    pub fn zero(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS);
        Self { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize, coeff: f64) -> Self {
        let mut op = Self::zero(n_qubits);
        op.add_term(PauliTerm::identity(coeff));
        op
    }

    /// Accumulates terms, merging equal strings, then prunes at
    /// [`DEFAULT_PRUNE_TOL`].
    pub fn from_terms<I: IntoIterator<Item = PauliTerm>>(n_qubits: usize, terms: I) -> Self {
        let mut acc: HashMap<PauliString, Complex64> = HashMap::new();
        for t in terms {
            *acc.entry(t.string).or_default() += t.coeff;
        }
        let mut op = Self { n_qubits, terms: acc.into_iter().collect() };
        op.prune(DEFAULT_PRUNE_TOL);
        op
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, term: PauliTerm) {
        debug_assert!(self.n_qubits >= 64 || term.string.support() >> self.n_qubits == 0);
        *self.terms.entry(term.string).or_default() += term.coeff;
    }

    pub fn coefficient(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    pub fn identity_coefficient(&self) -> Complex64 {
        self.coefficient(&PauliString::IDENTITY)
    }

    pub fn terms(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms.iter().map(|(s, c)| PauliTerm::new(*s, *c))
    }

    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() > tol);
    }

    /// Every coefficient real within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Drops imaginary parts smaller than `tol`; used after products of
    /// Hermitian operators where the anti-Hermitian pieces cancel.
    pub fn clean_hermitian(&mut self, tol: f64) {
        for c in self.terms.values_mut() {
            if c.im.abs() <= tol {
                c.im = 0.0;
            }
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.prune(DEFAULT_PRUNE_TOL);
        out
    }

    pub fn add(&self, other: &QubitOperator) -> Self {
        let mut out = self.clone();
        out.n_qubits = self.n_qubits.max(other.n_qubits);
        for t in other.terms() {
            out.add_term(t);
        }
        out.prune(DEFAULT_PRUNE_TOL);
        out
    }

    /// Operator product with exact Pauli phases.
    pub fn mul(&self, other: &QubitOperator) -> Self {
        let mut acc: HashMap<PauliString, Complex64> = HashMap::with_capacity(self.len() * 4);
        for (sa, ca) in &self.terms {
            for (sb, cb) in &other.terms {
                let (k, s) = sa.mul(sb);
                *acc.entry(s).or_default() += ca * cb * super::pauli::i_pow(k);
            }
        }
        let mut out = Self { n_qubits: self.n_qubits.max(other.n_qubits), terms: acc.into_iter().collect() };
        out.prune(DEFAULT_PRUNE_TOL);
        out
    }

    /// `(H - omega)^2`, expanded exactly in the Pauli algebra.
    ///
    /// The cross terms between anticommuting strings cancel pairwise, so the
    /// result is Hermitian whenever `self` is.
    pub fn square_shifted(&self, omega: f64) -> Self {
        let mut shifted = self.clone();
        shifted.add_term(PauliTerm::identity(-omega));
        shifted.prune(DEFAULT_PRUNE_TOL);
        let mut sq = shifted.mul(&shifted);
        sq.clean_hermitian(1e-10);
        sq
    }

    /// `<bra|H|ket>` between computational basis states.
    pub fn matrix_element(&self, bra: u64, ket: u64) -> Complex64 {
        let flip = bra ^ ket;
        let mut acc = Complex64::default();
        for (s, c) in self.terms.range(PauliString::new(flip, 0)..) {
            if s.x != flip {
                break;
            }
            let (ph, _) = s.apply_to_basis(ket);
            acc += c * ph;
        }
        acc
    }

    /// Dense matrix restricted to the given basis states (row/column order
    /// follows `basis`).
    pub fn sector_matrix(&self, basis: &[u64]) -> Vec<Vec<Complex64>> {
        basis
            .iter()
            .map(|&bra| basis.iter().map(|&ket| self.matrix_element(bra, ket)).collect())
            .collect()
    }

    /// Full `2^n x 2^n` dense matrix, row-major. Only sensible for small `n`.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let dim = 1usize << self.n_qubits;
        let mut m = vec![vec![Complex64::default(); dim]; dim];
        for (s, c) in &self.terms {
            for ket in 0..dim as u64 {
                let (ph, bra) = s.apply_to_basis(ket);
                m[bra as usize][ket as usize] += c * ph;
            }
        }
        m
    }

    /// `H|psi>` for a dense amplitude vector.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); psi.len()];
        for (s, c) in &self.terms {
            for (ket, a) in psi.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let (ph, bra) = s.apply_to_basis(ket as u64);
                out[bra as usize] += c * ph * a;
            }
        }
        out
    }

    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        let hpsi = self.apply(psi);
        psi.iter().zip(&hpsi).map(|(a, b)| a.conj() * b).sum()
    }
}

fn format_coeff(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{:e}", c.re)
    } else {
        format!("({:e},{:e})", c.re, c.im)
    }
}

fn parse_coeff(tok: &str) -> Result<Complex64, String> {
    if let Some(inner) = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        let (re, im) = inner.split_once(',').ok_or_else(|| format!("bad complex coefficient '{tok}'"))?;
        let re: f64 = re.trim().parse().map_err(|_| format!("bad real part '{re}'"))?;
        let im: f64 = im.trim().parse().map_err(|_| format!("bad imaginary part '{im}'"))?;
        Ok(Complex64::new(re, im))
    } else {
        tok.parse::<f64>().map(|v| Complex64::new(v, 0.0)).map_err(|_| format!("bad coefficient '{tok}'"))
    }
}

fn parse_letter(tok: &str) -> Result<(usize, Pauli), String> {
    let mut chars = tok.chars();
    let p = match chars.next() {
        Some('X') | Some('x') => Pauli::X,
        Some('Y') | Some('y') => Pauli::Y,
        Some('Z') | Some('z') => Pauli::Z,
        _ => return Err(format!("bad Pauli factor '{tok}'")),
    };
    let q: usize = chars.as_str().parse().map_err(|_| format!("bad qubit index in '{tok}'"))?;
    if q >= MAX_QUBITS {
        return Err(format!("qubit index {q} exceeds {MAX_QUBITS}"));
    }
    Ok((q, p))
}

impl fmt::Display for QubitOperator {
    /// One term per line: `coeff pauli-word`, e.g. `0.5 X0 Z2 Y3`. A first
    /// line `# qubits N` records the register width.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# qubits {}", self.n_qubits)?;
        for (s, c) in &self.terms {
            writeln!(f, "{} {}", format_coeff(*c), s)?;
        }
        Ok(())
    }
}

impl FromStr for QubitOperator {
    type Err = QubitError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut n_qubits: Option<usize> = None;
        let mut terms = Vec::new();
        let mut max_q = 0usize;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut it = rest.split_whitespace();
                if it.next() == Some("qubits") {
                    let n = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| QubitError::Parse { line: lineno + 1, msg: "bad qubit count".into() })?;
                    n_qubits = Some(n);
                }
                continue;
            }
            let mut toks = line.split_whitespace();
            let coeff = parse_coeff(toks.next().unwrap())
                .map_err(|msg| QubitError::Parse { line: lineno + 1, msg })?;
            let mut letters = Vec::new();
            for tok in toks {
                if tok == "I" {
                    continue;
                }
                let (q, p) = parse_letter(tok).map_err(|msg| QubitError::Parse { line: lineno + 1, msg })?;
                max_q = max_q.max(q + 1);
                letters.push((q, p));
            }
            terms.push(PauliTerm::new(PauliString::from_letters(&letters), coeff));
        }
        let n = n_qubits.unwrap_or(max_q);
        if max_q > n {
            return Err(QubitError::IndexOverflow { index: max_q - 1, n_qubits: n });
        }
        Ok(QubitOperator::from_terms(n, terms))
    }
}
