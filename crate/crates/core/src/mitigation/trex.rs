//! Twirled readout error extinction.
//!
//! Random X flips before measurement (undone classically) turn any readout
//! channel into one that only rescales each Z-type observable by a factor λ.
//! λ is learned from twirled identity circuits and divided out.

use rand::Rng;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::pauli::from_qubit_bits;
use crate::seed::{derive_seed, rng_from};
use crate::sim::{sample, NoiseModel};

pub const LAMBDA_FLOOR: f64 = 0.05;
pub const DEFAULT_CALIBRATION_CIRCUITS: usize = 16;
pub const DEFAULT_CALIBRATION_SHOTS: u64 = 8192;

/// Twirl masks (qubit bits) for `count` circuits: all `2^n` masks cycled in
/// order for `n ≤ 5`, uniform random masks above that.
pub fn twirl_masks(n_qubits: usize, count: usize, seed: u64) -> Vec<u64> {
    if n_qubits <= 5 {
        let period = 1u64 << n_qubits;
        (0..count as u64).map(|i| i % period).collect()
    } else {
        let mut rng = rng_from(seed, &[0x7717]);
        let width = if n_qubits >= 64 { u64::MAX } else { (1u64 << n_qubits) - 1 };
        (0..count).map(|_| rng.random::<u64>() & width).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrexCalibration {
    n_qubits: usize,
    /// Histogram of un-flipped outcomes (state-vector index order).
    histogram: Vec<u64>,
    shots_used: u64,
    n_circuits: usize,
}

impl TrexCalibration {
    /// A calibration that mitigates nothing (λ = 1 for every mask).
    pub fn trivial(n_qubits: usize) -> Self {
        let mut histogram = vec![0; 1 << n_qubits];
        histogram[0] = 1;
        TrexCalibration {
            n_qubits,
            histogram,
            shots_used: 0,
            n_circuits: 0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn shots_used(&self) -> u64 {
        self.shots_used
    }

    pub fn n_circuits(&self) -> usize {
        self.n_circuits
    }

    /// `λ(m)`: mean of `(-1)^{popcount(z & m)}` over un-flipped outcomes `z`,
    /// for a Z-support mask `m` in qubit bits.
    pub fn lambda(&self, mask: u64) -> f64 {
        if mask == 0 {
            return 1.0;
        }
        let m = from_qubit_bits(mask, self.n_qubits);
        let total: u64 = self.histogram.iter().sum();
        let signed: i64 = self
            .histogram
            .iter()
            .enumerate()
            .map(|(z, &k)| if (z & m).count_ones() % 2 == 0 { k as i64 } else { -(k as i64) })
            .sum();
        signed as f64 / total as f64
    }

    /// `1/λ(m)`, refusing amplification beyond the floor.
    pub fn weight(&self, mask: u64) -> Result<f64> {
        let lambda = self.lambda(mask);
        if lambda < LAMBDA_FLOOR {
            return Err(Error::Amplification {
                mask,
                lambda,
                floor: LAMBDA_FLOOR,
            });
        }
        Ok(1.0 / lambda)
    }
}

/// Run `n_circuits` twirled identity circuits with `total_shots` shots in all.
pub fn trex_calibrate(
    n_qubits: usize,
    noise: Option<&NoiseModel>,
    total_shots: u64,
    n_circuits: usize,
    seed: u64,
) -> Result<TrexCalibration> {
    if n_circuits == 0 {
        return Err(Error::Argument("T-REx calibration needs at least one circuit".into()));
    }
    if total_shots == 0 || total_shots % n_circuits as u64 != 0 {
        return Err(Error::Argument(format!(
            "{total_shots} calibration shots do not split evenly over {n_circuits} circuits"
        )));
    }
    let per_circuit = total_shots / n_circuits as u64;
    let mut histogram = vec![0u64; 1 << n_qubits];
    for (i, mask) in twirl_masks(n_qubits, n_circuits, seed).into_iter().enumerate() {
        let mut c = Circuit::new(n_qubits);
        for q in 0..n_qubits {
            if (mask >> q) & 1 == 1 {
                c.x(q)?;
            }
        }
        let t = from_qubit_bits(mask, n_qubits);
        let counts = sample(&c, &[], per_circuit, noise, derive_seed(seed, &[i as u64]))?;
        for (y, k) in counts.iter() {
            histogram[y ^ t] += k;
        }
    }
    Ok(TrexCalibration {
        n_qubits,
        histogram,
        shots_used: total_shots,
        n_circuits,
    })
}

/// Divide each raw twirled mean by the λ of its Z-support mask.
pub fn trex_estimate(raw_means: &[f64], masks: &[u64], cal: &TrexCalibration) -> Result<Vec<f64>> {
    if raw_means.len() != masks.len() {
        return Err(Error::Argument(format!(
            "{} means but {} masks",
            raw_means.len(),
            masks.len()
        )));
    }
    raw_means
        .iter()
        .zip(masks)
        .map(|(&m, &mask)| Ok(m * cal.weight(mask)?))
        .collect()
}
