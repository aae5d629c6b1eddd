//! Pauli strings in symplectic (bit-mask) form and weighted sums of them.
//!
//! Qubit `q` lives in bit `q` of both masks. In text, qubit 0 is the leftmost
//! character; in dense matrices and state vectors it is the most significant
//! tensor factor.

mod dense;
mod grouping;
mod text;

use std::fmt;
use std::ops::Mul;

use indexmap::IndexMap;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use dense::{min_eigenvalue, to_dense, DENSE_QUBIT_LIMIT};
pub use grouping::{qwc_group, QwcGroup};
pub use text::{parse_qubit_hamiltonian, read_qubit_hamiltonian, write_qubit_hamiltonian};

/// Coefficients whose magnitude falls below this after merging are dropped.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Largest register a [`PauliString`] can describe.
pub const MAX_QUBITS: usize = 64;

/// A power of `i`: `Phase(k)` stands for `i^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

fn width_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        PauliString {
            n_qubits,
            x: 0,
            z: 0,
        }
    }

    pub fn from_masks(n_qubits: usize, x: u64, z: u64) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::Resource(format!(
                "{n_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit"
            )));
        }
        let mask = width_mask(n_qubits);
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::Data(format!(
                "Pauli masks reach beyond {n_qubits} qubits"
            )));
        }
        Ok(PauliString { n_qubits, x, z })
    }

    /// Single non-identity factor on `qubit`.
    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Self {
        assert!(qubit < n_qubits);
        let bit = 1u64 << qubit;
        let (x, z) = match p {
            Pauli::I => (0, 0),
            Pauli::X => (bit, 0),
            Pauli::Y => (bit, bit),
            Pauli::Z => (0, bit),
        };
        PauliString { n_qubits, x, z }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Qubits carrying a non-identity factor.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits((self.x >> qubit) & 1 == 1, (self.z >> qubit) & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        let bit = 1u64 << qubit;
        self.x &= !bit;
        self.z &= !bit;
        match p {
            Pauli::I => {}
            Pauli::X => self.x |= bit,
            Pauli::Y => {
                self.x |= bit;
                self.z |= bit
            }
            Pauli::Z => self.z |= bit,
        }
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let sym = (self.x & other.z) ^ (self.z & other.x);
        sym.count_ones() % 2 == 0
    }

    /// True when the two strings commute on every qubit individually.
    pub fn qubitwise_commutes_with(&self, other: &PauliString) -> bool {
        (self.x & other.z) ^ (self.z & other.x) == 0
    }

    /// Operator product `self · other = phase · r`.
    pub fn multiply(&self, other: &PauliString) -> Result<(Phase, PauliString)> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        let (x1, z1, x2, z2) = (self.x, self.z, other.x, other.z);
        let (px, py, pz) = (x1 & !z1, x1 & z1, !x1 & z1);
        let (qx, qy, qz) = (x2 & !z2, x2 & z2, !x2 & z2);
        // XY = iZ, YZ = iX, ZX = iY and the reversed orders pick up -i.
        let plus = ((px & qy) | (py & qz) | (pz & qx)).count_ones() as i64;
        let minus = ((py & qx) | (pz & qy) | (px & qz)).count_ones() as i64;
        Ok((
            Phase::from_exponent(plus - minus),
            PauliString {
                n_qubits: self.n_qubits,
                x: x1 ^ x2,
                z: z1 ^ z2,
            },
        ))
    }

    /// Drop the listed qubits, renumbering the survivors in order.
    pub(crate) fn remove_qubits(&self, removed: &[usize]) -> PauliString {
        let mut out = PauliString::identity(self.n_qubits - removed.len());
        let mut target = 0;
        for q in 0..self.n_qubits {
            if removed.contains(&q) {
                continue;
            }
            out.set(target, self.get(q));
            target += 1;
        }
        out
    }

    /// X and Z masks re-expressed in state-vector index space (qubit 0 is
    /// the most significant bit).
    pub(crate) fn index_masks(&self) -> (usize, usize) {
        (
            from_qubit_bits(self.x, self.n_qubits),
            from_qubit_bits(self.z, self.n_qubits),
        )
    }

    /// Apply the string to a computational basis index. Returns the target
    /// index and the phase picked up.
    pub(crate) fn apply_to_basis(&self, index: usize) -> (usize, Complex64) {
        let (xm, zm) = self.index_masks();
        // P = i^{#Y} X^x Z^z, so Z acts first.
        let mut phase = Phase::from_exponent((self.x & self.z).count_ones() as i64).to_complex();
        if (index & zm).count_ones() % 2 == 1 {
            phase = -phase;
        }
        (index ^ xm, phase)
    }
}

/// Convert a state-vector index (qubit 0 most significant) to a qubit bit
/// mask (qubit q in bit q).
pub fn to_qubit_bits(index: usize, n_qubits: usize) -> u64 {
    let mut out = 0u64;
    for q in 0..n_qubits {
        if (index >> (n_qubits - 1 - q)) & 1 == 1 {
            out |= 1 << q;
        }
    }
    out
}

/// Inverse of [`to_qubit_bits`].
pub fn from_qubit_bits(bits: u64, n_qubits: usize) -> usize {
    let mut out = 0usize;
    for q in 0..n_qubits {
        if (bits >> q) & 1 == 1 {
            out |= 1 << (n_qubits - 1 - q);
        }
    }
    out
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.get(q).to_char())?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n > MAX_QUBITS {
            return Err(Error::Resource(format!("{n} qubits exceeds the limit")));
        }
        let mut p = PauliString::identity(n);
        for (q, c) in s.chars().enumerate() {
            let pauli = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::Data(format!("invalid Pauli character '{other}'"))),
            };
            p.set(q, pauli);
        }
        Ok(p)
    }
}

/// Weighted sum of Pauli strings on a common register.
///
/// Terms keep first-insertion order; adding an existing string merges the
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: IndexMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum {
            n_qubits,
            terms: IndexMap::new(),
        }
    }

    pub fn identity(n_qubits: usize, coeff: f64) -> Self {
        let mut s = Self::zero(n_qubits);
        s.add_term(Complex64::new(coeff, 0.0), PauliString::identity(n_qubits))
            .expect("same width");
        s
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, PauliString)>,
    {
        let mut s = Self::zero(n_qubits);
        for (c, p) in terms {
            s.add_term(c, p)?;
        }
        s.prune();
        Ok(s)
    }

    /// Convenience constructor from real coefficients and textual strings.
    pub fn from_labels(terms: &[(f64, &str)]) -> Result<Self> {
        let n = terms.first().map(|(_, s)| s.len()).unwrap_or(0);
        let parsed = terms
            .iter()
            .map(|(c, s)| Ok((Complex64::new(*c, 0.0), s.parse::<PauliString>()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, parsed)
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

    pub fn add_term(&mut self, coeff: Complex64, p: PauliString) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: p.n_qubits(),
            });
        }
        *self.terms.entry(p).or_insert(Complex64::new(0.0, 0.0)) += coeff;
        Ok(())
    }

    /// Drop terms whose merged coefficient is negligible.
    pub fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= MERGE_TOLERANCE);
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn term(&self, index: usize) -> Option<(&PauliString, &Complex64)> {
        self.terms.get_index(index)
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    /// Coefficient of the identity string (real part).
    pub fn constant(&self) -> f64 {
        self.coefficient(&PauliString::identity(self.n_qubits)).re
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.prune();
        out
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        let mut out = self.clone();
        for (p, c) in other.terms() {
            out.add_term(*c, *p)?;
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        let mut out = PauliSum::zero(self.n_qubits);
        for (p, a) in self.terms() {
            for (q, b) in other.terms() {
                let (phase, r) = p.multiply(q)?;
                out.add_term(a * b * phase.to_complex(), r)?;
            }
        }
        out.prune();
        Ok(out)
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> PauliSum {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.conj();
        }
        out
    }

    /// Zero the imaginary parts (after checking they are negligible).
    pub fn into_real(mut self, tol: f64) -> Result<PauliSum> {
        for (p, c) in &mut self.terms {
            if c.im.abs() > tol {
                return Err(Error::Data(format!(
                    "term {p} has imaginary coefficient {:.3e}; operator is not Hermitian",
                    c.im
                )));
            }
            c.im = 0.0;
        }
        self.prune();
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn multiply_table_examples() {
        assert_eq!(ps("X").multiply(&ps("Z")).unwrap(), (Phase::MINUS_I, ps("Y")));
        assert_eq!(ps("X").multiply(&ps("I")).unwrap(), (Phase::ONE, ps("X")));
        assert_eq!(ps("ZX").multiply(&ps("XX")).unwrap(), (Phase::I, ps("YI")));
        assert_eq!(ps("Y").multiply(&ps("Y")).unwrap(), (Phase::ONE, ps("I")));
        assert_eq!(ps("Y").multiply(&ps("Z")).unwrap(), (Phase::I, ps("X")));
    }

    #[test]
    fn multiply_size_mismatch() {
        assert!(matches!(
            ps("XX").multiply(&ps("X")),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn weight_and_text_round_trip() {
        let p = ps("IXYZ");
        assert_eq!(p.weight(), 3);
        assert_eq!(p.to_string(), "IXYZ");
        assert_eq!(p.get(0), Pauli::I);
        assert_eq!(p.get(2), Pauli::Y);
    }

    #[test]
    fn merging_drops_cancelled_terms() {
        let s = PauliSum::from_labels(&[(0.5, "ZI"), (-0.5, "ZI"), (1.0, "XX")]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.coefficient(&ps("XX")).re, 1.0);
    }

    #[test]
    fn apply_to_basis_matches_definition() {
        // Y|0> = i|1>, Y|1> = -i|0>
        let y = ps("Y");
        assert_eq!(y.apply_to_basis(0), (1, Complex64::new(0.0, 1.0)));
        assert_eq!(y.apply_to_basis(1), (0, Complex64::new(0.0, -1.0)));
        // ZX on |10>: X flips qubit 1 -> |11>, Z on qubit 0 gives -1
        let (idx, ph) = ps("ZX").apply_to_basis(0b10);
        assert_eq!(idx, 0b11);
        assert_eq!(ph, Complex64::new(-1.0, 0.0));
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
        let mask = width_mask(n);
        (any::<u64>(), any::<u64>())
            .prop_map(move |(x, z)| PauliString::from_masks(n, x & mask, z & mask).unwrap())
    }

    proptest! {
        #[test]
        fn multiply_is_associative(
            (p, q, r) in (1usize..=6).prop_flat_map(|n| (arb_pauli(n), arb_pauli(n), arb_pauli(n)))
        ) {
            let (a, pq) = p.multiply(&q).unwrap();
            let (b, left) = pq.multiply(&r).unwrap();
            let (c, qr) = q.multiply(&r).unwrap();
            let (d, right) = p.multiply(&qr).unwrap();
            prop_assert_eq!(left, right);
            prop_assert_eq!(a * b, c * d);
        }

        #[test]
        fn commutation_agrees_with_product_phases(n in 1usize..=6, x1 in any::<u64>(), z1 in any::<u64>(), x2 in any::<u64>(), z2 in any::<u64>()) {
            let m = width_mask(n);
            let p = PauliString::from_masks(n, x1 & m, z1 & m).unwrap();
            let q = PauliString::from_masks(n, x2 & m, z2 & m).unwrap();
            let (a, _) = p.multiply(&q).unwrap();
            let (b, _) = q.multiply(&p).unwrap();
            prop_assert_eq!(p.commutes_with(&q), a == b);
        }
    }
}
