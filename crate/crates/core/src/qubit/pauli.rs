//! Symplectic Pauli strings.
//!
//! A string is stored as two bitsets over qubits: `x` and `z`. On qubit `q`
//! the letter is `X` if only `x[q]` is set, `Z` if only `z[q]` is set, `Y` if
//! both are set and `I` otherwise. The letters are the Hermitian Paulis, so
//! `Y = iXZ`; every phase produced by multiplication is tracked as a power of
//! `i` and folded into the complex coefficient.

use std::fmt;

use num_complex::Complex64;

/// Maximum register width representable by the bitset encoding.
pub const MAX_QUBITS: usize = 64;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Multiplies `i^k` for `k` taken modulo 4.
pub fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// The operator part of a Pauli string (no coefficient). Used as a map key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn new(x: u64, z: u64) -> Self {
        Self { x, z }
    }

    /// Builds a string from `(qubit, letter)` pairs. Later letters on the same
    /// qubit overwrite earlier ones.
    pub fn from_letters(letters: &[(usize, Pauli)]) -> Self {
        let mut s = Self::IDENTITY;
        for &(q, p) in letters {
            assert!(q < MAX_QUBITS, "qubit index {q} out of range");
            let (x, z) = p.bits();
            let bit = 1u64 << q;
            s.x = (s.x & !bit) | if x { bit } else { 0 };
            s.z = (s.z & !bit) | if z { bit } else { 0 };
        }
        s
    }

    pub fn letter(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// True when the string contains only `I` and `Z`.
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Qubit-by-qubit commutation: wherever both act non-trivially the
    /// letters agree.
    pub fn qubitwise_commutes_with(&self, other: &PauliString) -> bool {
        let common = self.support() & other.support();
        (self.x ^ other.x) & common == 0 && (self.z ^ other.z) & common == 0
    }

    /// Product `self * other` as `(i^k, string)`.
    pub fn mul(&self, other: &PauliString) -> (u32, PauliString) {
        let (x1, z1, x2, z2) = (self.x, self.z, other.x, other.z);
        let y1 = x1 & z1;
        let xo1 = x1 & !z1;
        let zo1 = z1 & !x1;
        let y2 = x2 & z2;
        let xo2 = x2 & !z2;
        let zo2 = z2 & !x2;
        // Y.Z = iX, Y.X = -iZ, X.Y = iZ, X.Z = -iY, Z.X = iY, Z.Y = -iX
        let plus = (y1 & zo2).count_ones() + (xo1 & y2).count_ones() + (zo1 & xo2).count_ones();
        let minus = (y1 & xo2).count_ones() + (xo1 & zo2).count_ones() + (zo1 & y2).count_ones();
        let k = (plus + 3 * minus) % 4;
        (k, PauliString { x: x1 ^ x2, z: z1 ^ z2 })
    }

    /// Action on a computational basis state: `P|b> = phase * |b ^ x>`.
    pub fn apply_to_basis(&self, b: u64) -> (Complex64, u64) {
        let sign = if (b & self.z).count_ones() % 2 == 1 { 2 } else { 0 };
        (i_pow(self.y_count() + sign), b ^ self.x)
    }

    /// `<b|P|psi>` expressed through a single amplitude lookup.
    pub fn bra_phase(&self, b: u64) -> (Complex64, u64) {
        let (ph, c) = self.apply_to_basis(b);
        (ph.conj(), c)
    }

    pub fn to_word(&self, n_qubits: usize) -> String {
        (0..n_qubits).map(|q| self.letter(q).symbol()).collect()
    }
}

impl fmt::Display for PauliString {
    /// Sparse form, e.g. `X0 Z2 Y3`; the identity prints as `I`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        let mut support = self.support();
        while support != 0 {
            let q = support.trailing_zeros() as usize;
            support &= support - 1;
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}{}", self.letter(q).symbol(), q)?;
        }
        Ok(())
    }
}

/// Pauli string with a complex coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub string: PauliString,
    pub coeff: Complex64,
}

impl PauliTerm {
    pub fn new(string: PauliString, coeff: Complex64) -> Self {
        Self { string, coeff }
    }

    pub fn real(string: PauliString, coeff: f64) -> Self {
        Self { string, coeff: Complex64::new(coeff, 0.0) }
    }

    pub fn identity(coeff: f64) -> Self {
        Self::real(PauliString::IDENTITY, coeff)
    }

    pub fn x_mask(&self) -> u64 {
        self.string.x
    }

    pub fn z_mask(&self) -> u64 {
        self.string.z
    }

    /// Exact product; the phase from the letters is folded into the
    /// coefficient.
    pub fn multiply(&self, other: &PauliTerm) -> PauliTerm {
        let (k, s) = self.string.mul(&other.string);
        PauliTerm { string: s, coeff: self.coeff * other.coeff * i_pow(k) }
    }

    pub fn anticommutes_with(&self, other: &PauliTerm) -> bool {
        !self.string.commutes_with(&other.string)
    }
}
