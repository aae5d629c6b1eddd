//! Brute-force readout-error mitigation by confusion-matrix inversion.

use nalgebra::{DMatrix, DVector};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::sim::{sample, Counts, NoiseModel};

pub const REM_QUBIT_LIMIT: usize = 6;
pub const MAX_CONDITION: f64 = 1e6;

/// Column-stochastic `A[y][x] = P(measured y | prepared x)`, indices in
/// state-vector order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    n_qubits: usize,
    a: DMatrix<f64>,
}

impl ConfusionMatrix {
    pub fn new(n_qubits: usize, a: DMatrix<f64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if a.nrows() != dim || a.ncols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: a.nrows().max(a.ncols()),
            });
        }
        for (x, col) in a.column_iter().enumerate() {
            if col.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                return Err(Error::Data(format!("column {x} has entries outside [0, 1]")));
            }
            let s: f64 = col.sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::Data(format!("column {x} sums to {s}, not 1")));
            }
        }
        Ok(ConfusionMatrix { n_qubits, a })
    }

    /// The exact matrix of an independent per-qubit readout channel.
    pub fn from_noise(noise: &NoiseModel) -> Result<Self> {
        let n = noise.n_qubits();
        check_width(n)?;
        let mut a = DMatrix::from_element(1, 1, 1.0);
        for r in noise.readout() {
            let single = DMatrix::from_row_slice(2, 2, &[1.0 - r.eps0, r.eps1, r.eps0, 1.0 - r.eps1]);
            a = a.kronecker(&single);
        }
        ConfusionMatrix::new(n, a)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn condition_number(&self) -> f64 {
        let sv = self.a.clone().singular_values();
        let max = sv.max();
        let min = sv.min();
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// `A⁻¹ f` for a frequency vector `f`.
    pub fn apply_inverse(&self, freqs: &[f64]) -> Result<Vec<f64>> {
        if freqs.len() != self.a.nrows() {
            return Err(Error::Dimension {
                expected: self.a.nrows(),
                found: freqs.len(),
            });
        }
        let cond = self.condition_number();
        if !(cond < MAX_CONDITION) {
            return Err(Error::Conditioning(cond));
        }
        let f = DVector::from_column_slice(freqs);
        let q = self.a.clone().lu().solve(&f).ok_or(Error::Conditioning(f64::INFINITY))?;
        Ok(q.iter().copied().collect())
    }
}

fn check_width(n: usize) -> Result<()> {
    if n > REM_QUBIT_LIMIT {
        return Err(Error::Resource(format!(
            "confusion matrices are limited to {REM_QUBIT_LIMIT} qubits, got {n}"
        )));
    }
    Ok(())
}

/// Estimate `A` column by column: prepare each basis state with X gates and
/// sample it under `noise`.
pub fn rem_calibrate(n_qubits: usize, noise: Option<&NoiseModel>, shots_per_state: u64, seed: u64) -> Result<ConfusionMatrix> {
    check_width(n_qubits)?;
    let dim = 1usize << n_qubits;
    let mut a = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        let mut c = Circuit::new(n_qubits);
        for q in 0..n_qubits {
            if (x >> (n_qubits - 1 - q)) & 1 == 1 {
                c.x(q)?;
            }
        }
        let counts = sample(&c, &[], shots_per_state, noise, derive_seed(seed, &[x as u64]))?;
        for (y, f) in counts.frequencies().into_iter().enumerate() {
            a[(y, x)] = f;
        }
    }
    ConfusionMatrix::new(n_qubits, a)
}

/// Quasi-probabilities `A⁻¹ · frequencies(counts)`; entries may be negative.
pub fn rem_apply(a: &ConfusionMatrix, counts: &Counts) -> Result<Vec<f64>> {
    if counts.n_qubits() != a.n_qubits {
        return Err(Error::Dimension {
            expected: a.n_qubits,
            found: counts.n_qubits(),
        });
    }
    a.apply_inverse(&counts.frequencies())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_leaves_frequencies() {
        let a = ConfusionMatrix::new(1, DMatrix::identity(2, 2)).unwrap();
        let mut counts = Counts::new(1);
        counts.record(0, 3);
        counts.record(1, 1);
        assert_eq!(rem_apply(&a, &counts).unwrap(), vec![0.75, 0.25]);
    }

    #[test]
    fn exact_single_qubit_inversion() {
        let noise = NoiseModel::readout_only(1, 0.02, 0.05).unwrap();
        let a = ConfusionMatrix::from_noise(&noise).unwrap();
        let p = 0.7;
        let f = [0.98 * p + 0.05 * (1.0 - p), 0.02 * p + 0.95 * (1.0 - p)];
        let q = a.apply_inverse(&f).unwrap();
        assert_abs_diff_eq!(q[0], 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(q[1], 0.3, epsilon = 1e-12);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = ConfusionMatrix::new(1, DMatrix::from_element(2, 2, 0.5)).unwrap();
        assert!(matches!(a.apply_inverse(&[0.5, 0.5]), Err(Error::Conditioning(_))));
    }

    #[test]
    fn non_stochastic_rejected() {
        assert!(ConfusionMatrix::new(1, DMatrix::from_row_slice(2, 2, &[0.9, 0.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn too_many_qubits() {
        let noise = NoiseModel::readout_only(7, 0.0, 0.0).unwrap();
        assert!(matches!(rem_calibrate(7, Some(&noise), 10, 0), Err(Error::Resource(_))));
    }

    fn binomial_ok(est: f64, p: f64, shots: u64) -> bool {
        (est - p).abs() <= 5.0 * (p * (1.0 - p) / shots as f64).sqrt() + 1e-12
    }

    #[test]
    fn noiseless_calibration_is_identity() {
        let a = rem_calibrate(2, None, 100_000, 1).unwrap();
        assert_eq!(a.matrix(), &DMatrix::<f64>::identity(4, 4));
    }

    #[test]
    fn single_qubit_calibration() {
        let noise = NoiseModel::readout_only(1, 0.02, 0.05).unwrap();
        let shots = 100_000;
        let a = rem_calibrate(1, Some(&noise), shots, 2).unwrap();
        let exact = [[0.98, 0.05], [0.02, 0.95]];
        for y in 0..2 {
            for x in 0..2 {
                assert!(binomial_ok(a.matrix()[(y, x)], exact[y][x], shots), "A[{y}][{x}]");
            }
        }
    }

    #[test]
    fn two_qubit_calibration_is_a_tensor_product() {
        let noise = NoiseModel::new(
            vec![
                crate::sim::Readout { eps0: 0.02, eps1: 0.05 },
                crate::sim::Readout { eps0: 0.04, eps1: 0.01 },
            ],
            0.0,
            0.0,
        )
        .unwrap();
        let shots = 100_000;
        let sampled = rem_calibrate(2, Some(&noise), shots, 3).unwrap();
        let m0 = DMatrix::from_row_slice(2, 2, &[0.98, 0.05, 0.02, 0.95]);
        let m1 = DMatrix::from_row_slice(2, 2, &[0.96, 0.01, 0.04, 0.99]);
        let kron = m0.kronecker(&m1);
        assert_eq!(ConfusionMatrix::from_noise(&noise).unwrap().matrix(), &kron);
        for y in 0..4 {
            for x in 0..4 {
                assert!(binomial_ok(sampled.matrix()[(y, x)], kron[(y, x)], shots));
            }
        }
    }
}
