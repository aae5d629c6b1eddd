use nalgebra::DMatrix;
use num_complex::Complex64;

use super::PauliSum;
use crate::error::{Error, Result};

/// Largest register accepted by the dense oracle.
pub const DENSE_QUBIT_LIMIT: usize = 12;

/// Dense `2^n × 2^n` matrix of the sum, qubit 0 as the leftmost tensor factor.
pub fn to_dense(h: &PauliSum) -> Result<DMatrix<Complex64>> {
    let n = h.n_qubits();
    if n > DENSE_QUBIT_LIMIT {
        return Err(Error::Resource(format!(
            "dense matrix of {n} qubits exceeds the {DENSE_QUBIT_LIMIT}-qubit oracle limit"
        )));
    }
    let dim = 1usize << n;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (p, c) in h.terms() {
        for col in 0..dim {
            let (row, phase) = p.apply_to_basis(col);
            m[(row, col)] += c * phase;
        }
    }
    Ok(m)
}

/// Smallest eigenvalue of a Hermitian sum.
pub fn min_eigenvalue(h: &PauliSum) -> Result<f64> {
    let m = to_dense(h)?;
    let eig = m.symmetric_eigen();
    Ok(eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_z() {
        let h = PauliSum::from_labels(&[(1.0, "Z")]).unwrap();
        let m = to_dense(&h).unwrap();
        assert_eq!(m[(0, 0)], c(1.0));
        assert_eq!(m[(1, 1)], c(-1.0));
        assert_eq!(m[(0, 1)], c(0.0));
    }

    #[test]
    fn direct_sum_of_z() {
        let h = PauliSum::from_labels(&[(0.5, "ZI"), (0.5, "IZ")]).unwrap();
        let m = to_dense(&h).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn qubit_zero_is_leftmost_factor() {
        // X on qubit 0 maps |00> to |10>, which is index 2.
        let h = PauliSum::from_labels(&[(1.0, "XI")]).unwrap();
        let m = to_dense(&h).unwrap();
        assert_eq!(m[(2, 0)], c(1.0));
    }

    #[test]
    fn y_matrix() {
        let h = PauliSum::from_labels(&[(1.0, "Y")]).unwrap();
        let m = to_dense(&h).unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn too_many_qubits() {
        let h = PauliSum::zero(13);
        assert!(matches!(to_dense(&h), Err(Error::Resource(_))));
        let _ = PauliString::identity(13);
    }
}
