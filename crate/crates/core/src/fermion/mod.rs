//! Second-quantized electronic Hamiltonians and their qubit encodings.
//!
//! Spin orbitals follow the block convention: for `m` spatial orbitals,
//! modes `0..m` are spin-up and `m..2m` spin-down.

mod integrals;
mod taper;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

pub use integrals::{parse_integral_file, read_integral_file, write_integral_file, IntegralFile};
pub use taper::{taper_two_qubits, tapered_qubits};

/// `H = core + Σ h_pq a†_p a_q + Σ h_pqrs a†_p a†_q a_r a_s` over spin orbitals.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionicOperator {
    n_modes: usize,
    one_body: Vec<f64>,
    two_body: Vec<f64>,
    core_energy: f64,
}

impl FermionicOperator {
    pub fn zeros(n_modes: usize) -> Self {
        FermionicOperator {
            n_modes,
            one_body: vec![0.0; n_modes * n_modes],
            two_body: vec![0.0; n_modes.pow(4)],
            core_energy: 0.0,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn core_energy(&self) -> f64 {
        self.core_energy
    }

    pub fn set_core_energy(&mut self, e: f64) {
        self.core_energy = e;
    }

    pub fn one_body(&self, p: usize, q: usize) -> f64 {
        self.one_body[p * self.n_modes + q]
    }

    pub fn set_one_body(&mut self, p: usize, q: usize, v: f64) {
        self.one_body[p * self.n_modes + q] = v;
    }

    fn two_index(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.n_modes + q) * self.n_modes + r) * self.n_modes + s
    }

    pub fn two_body(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.two_body[self.two_index(p, q, r, s)]
    }

    pub fn set_two_body(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let i = self.two_index(p, q, r, s);
        self.two_body[i] = v;
    }

    /// Finite entries and a symmetric one-body tensor.
    pub fn validate(&self) -> Result<()> {
        if !self.core_energy.is_finite()
            || self.one_body.iter().chain(&self.two_body).any(|v| !v.is_finite())
        {
            return Err(Error::Data("non-finite entry in fermionic operator".into()));
        }
        let n = self.n_modes;
        for p in 0..n {
            for q in 0..p {
                let (a, b) = (self.one_body(p, q), self.one_body(q, p));
                if (a - b).abs() > 1e-10 * (1.0 + a.abs()) {
                    return Err(Error::Data(format!(
                        "one-body tensor not symmetric at ({p},{q}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Occupation numbers of the spin-up and spin-down sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParticleSector {
    pub n_alpha: usize,
    pub n_beta: usize,
}

impl ParticleSector {
    pub fn new(n_alpha: usize, n_beta: usize) -> Self {
        ParticleSector { n_alpha, n_beta }
    }

    pub fn total(&self) -> usize {
        self.n_alpha + self.n_beta
    }

    /// Checks that each spin block has room for its electrons.
    pub fn check(&self, n_modes: usize) -> Result<()> {
        if n_modes % 2 != 0 {
            return Err(Error::Argument(format!(
                "spin sectors need an even number of modes, got {n_modes}"
            )));
        }
        let m = n_modes / 2;
        if self.n_alpha > m || self.n_beta > m {
            return Err(Error::Argument(format!(
                "sector ({}, {}) does not fit {m} spatial orbitals",
                self.n_alpha, self.n_beta
            )));
        }
        Ok(())
    }

    /// Hartree–Fock occupation: lowest modes of each spin block.
    pub fn reference_occupation(&self, n_modes: usize) -> Vec<bool> {
        let m = n_modes / 2;
        (0..n_modes)
            .map(|j| if j < m { j < self.n_alpha } else { j - m < self.n_beta })
            .collect()
    }
}

/// Fermion-to-qubit encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    JordanWigner,
    /// Qubit `j` stores the parity of occupations `0..=j`.
    Parity,
}

impl Encoding {
    /// Qubit operator of `a†_j` (`dagger`) or `a_j` on `n` modes.
    pub fn ladder(self, n: usize, j: usize, dagger: bool) -> PauliSum {
        let sign = if dagger { -0.5 } else { 0.5 };
        let mut x_part = PauliString::identity(n);
        let mut y_part = PauliString::identity(n);
        match self {
            Encoding::JordanWigner => {
                for k in 0..j {
                    x_part.set(k, Pauli::Z);
                    y_part.set(k, Pauli::Z);
                }
                x_part.set(j, Pauli::X);
                y_part.set(j, Pauli::Y);
            }
            Encoding::Parity => {
                if j > 0 {
                    x_part.set(j - 1, Pauli::Z);
                }
                x_part.set(j, Pauli::X);
                y_part.set(j, Pauli::Y);
                for k in j + 1..n {
                    x_part.set(k, Pauli::X);
                    y_part.set(k, Pauli::X);
                }
            }
        }
        PauliSum::from_terms(
            n,
            [
                (Complex64::new(0.5, 0.0), x_part),
                (Complex64::new(0.0, sign), y_part),
            ],
        )
        .expect("widths agree")
    }

    /// Qubit basis state (as a qubit bit mask) encoding an occupation vector.
    pub fn encode_occupation(self, occupation: &[bool]) -> u64 {
        let mut bits = 0u64;
        let mut parity = false;
        for (j, &occ) in occupation.iter().enumerate() {
            parity ^= occ;
            let bit = match self {
                Encoding::JordanWigner => occ,
                Encoding::Parity => parity,
            };
            if bit {
                bits |= 1 << j;
            }
        }
        bits
    }

    /// Map a product of ladder operators, e.g. `[(p, true), (q, false)]` for
    /// `a†_p a_q`.
    pub fn map_product(self, n: usize, ops: &[(usize, bool)]) -> Result<PauliSum> {
        let mut acc = PauliSum::identity(n, 1.0);
        for &(j, dagger) in ops {
            acc = acc.mul(&self.ladder(n, j, dagger))?;
        }
        Ok(acc)
    }

    /// Map a full Hamiltonian. The result is checked to be Hermitian and
    /// returned with real coefficients.
    pub fn map(self, f: &FermionicOperator) -> Result<PauliSum> {
        f.validate()?;
        let n = f.n_modes();
        let create: Vec<PauliSum> = (0..n).map(|j| self.ladder(n, j, true)).collect();
        let annihilate: Vec<PauliSum> = (0..n).map(|j| self.ladder(n, j, false)).collect();

        let mut h = PauliSum::identity(n, f.core_energy());
        for p in 0..n {
            for q in 0..n {
                let v = f.one_body(p, q);
                if v != 0.0 {
                    let term = create[p].mul(&annihilate[q])?;
                    h = h.add(&term.scale(Complex64::new(v, 0.0)))?;
                }
            }
        }
        let mut pairs_cr: Vec<Option<PauliSum>> = vec![None; n * n];
        let mut pairs_an: Vec<Option<PauliSum>> = vec![None; n * n];
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = f.two_body(p, q, r, s);
                        if v == 0.0 {
                            continue;
                        }
                        let left = pairs_cr[p * n + q]
                            .get_or_insert_with(|| create[p].mul(&create[q]).expect("widths"))
                            .clone();
                        let right = pairs_an[r * n + s]
                            .get_or_insert_with(|| annihilate[r].mul(&annihilate[s]).expect("widths"))
                            .clone();
                        let term = left.mul(&right)?;
                        h = h.add(&term.scale(Complex64::new(v, 0.0)))?;
                    }
                }
            }
        }
        h.into_real(1e-10)
    }
}

impl std::str::FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jw" | "jordan-wigner" | "jordan_wigner" => Ok(Encoding::JordanWigner),
            "parity" => Ok(Encoding::Parity),
            other => Err(Error::Argument(format!("unknown mapping '{other}' (expected jw or parity)"))),
        }
    }
}

/// Map an integral file to qubits, optionally removing the two parity
/// qubits. The sector defaults to the file's `nelec` line.
pub fn qubit_hamiltonian(
    file: &IntegralFile,
    encoding: Encoding,
    taper: bool,
    sector: Option<ParticleSector>,
) -> Result<PauliSum> {
    let h = encoding.map(&file.operator)?;
    if !taper {
        return Ok(h);
    }
    if encoding != Encoding::Parity {
        return Err(Error::Argument("tapering requires the parity mapping".into()));
    }
    let sector = sector
        .or(file.sector)
        .ok_or_else(|| Error::Argument("tapering needs a particle sector (nelec line or explicit sector)".into()))?;
    taper_two_qubits(&h, sector)
}

pub fn jordan_wigner(f: &FermionicOperator) -> Result<PauliSum> {
    Encoding::JordanWigner.map(f)
}

pub fn parity_map(f: &FermionicOperator) -> Result<PauliSum> {
    Encoding::Parity.map(f)
}


/// Random Hermitian, spin-conserving test operators.
#[cfg(test)]
pub(crate) fn random_operator(n_modes: usize, seed: u64, spin_conserving: bool) -> FermionicOperator {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let m = n_modes / 2;
    let spin = |j: usize| if spin_conserving && m > 0 { j / m } else { 0 };
    let mut f = FermionicOperator::zeros(n_modes);
    f.set_core_energy(rng.random_range(-2.0..2.0));
    for p in 0..n_modes {
        for q in 0..=p {
            if spin(p) == spin(q) {
                let v = rng.random_range(-1.0..1.0);
                f.set_one_body(p, q, v);
                f.set_one_body(q, p, v);
            }
        }
    }
    for p in 0..n_modes {
        for q in 0..n_modes {
            for r in 0..n_modes {
                for s in 0..n_modes {
                    // Hermitian partner of a†p a†q a_r a_s is a†s a†r a_q a_p.
                    let (pp, qq, rr, ss) = (s, r, q, p);
                    if (pp, qq, rr, ss) < (p, q, r, s) {
                        continue;
                    }
                    if spin(p) != spin(s) || spin(q) != spin(r) || p == q || r == s {
                        continue;
                    }
                    let v = rng.random_range(-0.5..0.5);
                    f.set_two_body(p, q, r, s, v);
                    f.set_two_body(pp, qq, rr, ss, v);
                }
            }
        }
    }
    f
}
