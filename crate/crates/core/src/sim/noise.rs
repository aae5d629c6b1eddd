use crate::error::{Error, Result};

pub const DEFAULT_DEPOL_1Q: f64 = 1e-3;
pub const DEFAULT_DEPOL_2Q: f64 = 1e-2;
pub const DEFAULT_EPS0: f64 = 0.02;
pub const DEFAULT_EPS1: f64 = 0.05;

/// Readout flip probabilities for one qubit: `eps0 = P(read 1 | 0)`,
/// `eps1 = P(read 0 | 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Readout {
    pub eps0: f64,
    pub eps1: f64,
}

/// Depolarizing gate noise plus independent per-qubit readout flips.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    readout: Vec<Readout>,
    depol_1q: f64,
    depol_2q: f64,
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Argument(format!("{name} = {p} is not a probability")));
    }
    Ok(())
}

impl NoiseModel {
    pub fn new(readout: Vec<Readout>, depol_1q: f64, depol_2q: f64) -> Result<Self> {
        for (q, r) in readout.iter().enumerate() {
            check_probability(&format!("eps0[{q}]"), r.eps0)?;
            check_probability(&format!("eps1[{q}]"), r.eps1)?;
        }
        check_probability("depol_1q", depol_1q)?;
        check_probability("depol_2q", depol_2q)?;
        Ok(NoiseModel {
            readout,
            depol_1q,
            depol_2q,
        })
    }

    pub fn uniform(n_qubits: usize, eps0: f64, eps1: f64, depol_1q: f64, depol_2q: f64) -> Result<Self> {
        NoiseModel::new(vec![Readout { eps0, eps1 }; n_qubits], depol_1q, depol_2q)
    }

    pub fn readout_only(n_qubits: usize, eps0: f64, eps1: f64) -> Result<Self> {
        NoiseModel::uniform(n_qubits, eps0, eps1, 0.0, 0.0)
    }

    /// The surrogate defaults used for noisy campaigns.
    pub fn default_surrogate(n_qubits: usize) -> Self {
        NoiseModel::uniform(n_qubits, DEFAULT_EPS0, DEFAULT_EPS1, DEFAULT_DEPOL_1Q, DEFAULT_DEPOL_2Q)
            .expect("defaults are probabilities")
    }

    pub fn n_qubits(&self) -> usize {
        self.readout.len()
    }

    pub fn readout(&self) -> &[Readout] {
        &self.readout
    }

    pub fn depol_1q(&self) -> f64 {
        self.depol_1q
    }

    pub fn depol_2q(&self) -> f64 {
        self.depol_2q
    }

    pub fn has_gate_noise(&self) -> bool {
        self.depol_1q > 0.0 || self.depol_2q > 0.0
    }

    pub fn has_readout_noise(&self) -> bool {
        self.readout.iter().any(|r| r.eps0 > 0.0 || r.eps1 > 0.0)
    }

    /// Same readout, no gate noise.
    pub fn without_gate_noise(&self) -> NoiseModel {
        NoiseModel {
            readout: self.readout.clone(),
            depol_1q: 0.0,
            depol_2q: 0.0,
        }
    }

    pub(crate) fn check_width(&self, n_qubits: usize) -> Result<()> {
        if self.readout.len() != n_qubits {
            return Err(Error::Dimension {
                expected: n_qubits,
                found: self.readout.len(),
            });
        }
        Ok(())
    }

    /// Push an outcome distribution through the readout channel.
    pub fn apply_readout(&self, probs: &mut [f64]) {
        let n = self.readout.len();
        for (q, r) in self.readout.iter().enumerate() {
            bit_channel(probs, n, q, r.eps0, r.eps1);
        }
    }
}

/// Classical bit channel on qubit `q`: 0→1 with `e0`, 1→0 with `e1`.
pub fn bit_channel(probs: &mut [f64], n_qubits: usize, q: usize, e0: f64, e1: f64) {
    if e0 == 0.0 && e1 == 0.0 {
        return;
    }
    let stride = 1usize << (n_qubits - 1 - q);
    for block in (0..probs.len()).step_by(2 * stride) {
        for i in block..block + stride {
            let (p0, p1) = (probs[i], probs[i + stride]);
            probs[i] = (1.0 - e0) * p0 + e1 * p1;
            probs[i + stride] = e0 * p0 + (1.0 - e1) * p1;
        }
    }
}

/// Relabel outcomes `i → i ^ mask`.
pub fn xor_relabel(probs: &[f64], mask: usize) -> Vec<f64> {
    (0..probs.len()).map(|i| probs[i ^ mask]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_non_probabilities() {
        assert!(NoiseModel::uniform(1, 1.5, 0.0, 0.0, 0.0).is_err());
        assert!(NoiseModel::uniform(1, 0.0, 0.0, -0.1, 0.0).is_err());
    }

    #[test]
    fn single_qubit_confusion() {
        let m = NoiseModel::readout_only(1, 0.02, 0.05).unwrap();
        let mut p = vec![0.7, 0.3];
        m.apply_readout(&mut p);
        assert_abs_diff_eq!(p[0], 0.98 * 0.7 + 0.05 * 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.02 * 0.7 + 0.95 * 0.3, epsilon = 1e-15);
    }

    #[test]
    fn readout_targets_the_right_qubit() {
        // qubit 0 is the high bit: |10⟩ is index 2.
        let m = NoiseModel::new(
            vec![Readout { eps0: 0.0, eps1: 1.0 }, Readout { eps0: 0.0, eps1: 0.0 }],
            0.0,
            0.0,
        )
        .unwrap();
        let mut p = vec![0.0, 0.0, 1.0, 0.0];
        m.apply_readout(&mut p);
        assert_eq!(p, vec![1.0, 0.0, 0.0, 0.0]);
    }
}
