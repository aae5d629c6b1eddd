//! State-vector simulation, shot sampling and the noise surrogate.
//!
//! Noisy circuits are simulated by propagating the density matrix through
//! the depolarizing channels, which yields exactly the outcome distribution
//! of per-shot Pauli-trajectory sampling; [`sample_trajectories`] is the
//! literal per-shot procedure and serves as the reference.

mod noise;
mod state;

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::circuit::Circuit;
use crate::error::{Error, Result};

pub use noise::{
    bit_channel, xor_relabel, NoiseModel, Readout, DEFAULT_DEPOL_1Q, DEFAULT_DEPOL_2Q, DEFAULT_EPS0,
    DEFAULT_EPS1,
};
pub use state::{statevector, State, DENSITY_QUBIT_LIMIT, STATEVECTOR_QUBIT_LIMIT};
pub(crate) use state::{apply_1q, apply_gate, PAULI_MATRICES};

/// Measurement histogram keyed by state index (qubit 0 is the most
/// significant bit, so the printed bitstring reads qubit 0 first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    n_qubits: usize,
    counts: BTreeMap<usize, u64>,
    total: u64,
}

impl Counts {
    pub fn new(n_qubits: usize) -> Self {
        Counts {
            n_qubits,
            counts: BTreeMap::new(),
            total: 0,
        }
    }

    pub fn record(&mut self, outcome: usize, count: u64) {
        if count > 0 {
            *self.counts.entry(outcome).or_insert(0) += count;
            self.total += count;
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn total_shots(&self) -> u64 {
        self.total
    }

    pub fn get(&self, outcome: usize) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let mut f = vec![0.0; 1 << self.n_qubits];
        if self.total > 0 {
            for (k, v) in self.iter() {
                f[k] = v as f64 / self.total as f64;
            }
        }
        f
    }

    pub fn bitstring(&self, outcome: usize) -> String {
        format!("{outcome:0width$b}", width = self.n_qubits)
    }
}

impl fmt::Display for Counts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.iter() {
            writeln!(f, "{} {v}", self.bitstring(k))?;
        }
        Ok(())
    }
}

/// Draw `shots` outcomes from `probs` by a chain of conditional binomials.
pub fn multinomial<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut out = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let p = p.max(0.0);
        if i + 1 == probs.len() || p >= mass {
            out[i] = remaining;
            break;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let k = Binomial::new(remaining, q).expect("valid binomial").sample(rng);
        out[i] = k;
        remaining -= k;
        mass -= p;
    }
    out
}

/// Exact measured-outcome distribution of `c`, including gate and readout
/// noise.
pub fn outcome_distribution(c: &Circuit, values: &[f64], noise: Option<&NoiseModel>) -> Result<Vec<f64>> {
    if let Some(m) = noise {
        m.check_width(c.n_qubits())?;
    }
    let mut s = State::for_noise(c.n_qubits(), noise)?;
    s.run(c, values, noise)?;
    let mut p = s.probabilities();
    if let Some(m) = noise {
        m.apply_readout(&mut p);
    }
    Ok(p)
}

pub fn counts_from_distribution(probs: &[f64], n_qubits: usize, shots: u64, seed: u64) -> Counts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Counts::new(n_qubits);
    for (i, k) in multinomial(probs, shots, &mut rng).into_iter().enumerate() {
        counts.record(i, k);
    }
    counts
}

pub fn sample(c: &Circuit, values: &[f64], shots: u64, noise: Option<&NoiseModel>, seed: u64) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::Argument("shots must be positive".into()));
    }
    let p = outcome_distribution(c, values, noise)?;
    Ok(counts_from_distribution(&p, c.n_qubits(), shots, seed))
}

/// Per-shot trajectory sampling: after each gate, with the model's
/// depolarizing probability, a uniformly random Pauli (identity included)
/// hits the touched qubits; each measured bit then flips with its readout
/// probability.
pub fn sample_trajectories(
    c: &Circuit,
    values: &[f64],
    shots: u64,
    noise: &NoiseModel,
    seed: u64,
) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::Argument("shots must be positive".into()));
    }
    noise.check_width(c.n_qubits())?;
    c.check_binding(values)?;
    let n = c.n_qubits();
    let mut base = State::zero(n)?.into_amplitudes().expect("pure");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Counts::new(n);
    for _ in 0..shots {
        base.iter_mut().for_each(|a| *a = num_complex::Complex64::new(0.0, 0.0));
        base[0] = num_complex::Complex64::new(1.0, 0.0);
        for gate in c.gates() {
            apply_gate(&mut base, n, gate, values);
            let (a, b) = gate.qubits();
            let p = if b.is_some() { noise.depol_2q() } else { noise.depol_1q() };
            if p > 0.0 && rng.random::<f64>() < p {
                for q in std::iter::once(a).chain(b) {
                    let k = rng.random_range(0..4);
                    if k != 0 {
                        apply_1q(&mut base, n, q, &PAULI_MATRICES[k]);
                    }
                }
            }
        }
        let r: f64 = rng.random();
        let mut acc = 0.0;
        let mut outcome = base.len() - 1;
        for (i, amp) in base.iter().enumerate() {
            acc += amp.norm_sqr();
            if r < acc {
                outcome = i;
                break;
            }
        }
        for (q, ro) in noise.readout().iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            let flip = if outcome & bit == 0 { ro.eps0 } else { ro.eps1 };
            if flip > 0.0 && rng.random::<f64>() < flip {
                outcome ^= bit;
            }
        }
        counts.record(outcome, 1);
    }
    Ok(counts)
}
