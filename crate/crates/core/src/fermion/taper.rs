use num_complex::Complex64;

use super::ParticleSector;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// Positions removed by two-qubit parity tapering on `n` qubits: the last
/// qubit of each spin block.
pub fn tapered_qubits(n_qubits: usize) -> [usize; 2] {
    [n_qubits / 2 - 1, n_qubits - 1]
}

/// Remove the two parity qubits fixed by the spin sector.
///
/// Qubit `n/2 - 1` holds the spin-up parity and qubit `n - 1` the total
/// parity, so `Z` there is replaced by `(-1)^{n_alpha}` and
/// `(-1)^{n_alpha + n_beta}`. Works for any operator that commutes with both
/// parities, Hermitian or not.
pub fn taper_two_qubits(h: &PauliSum, sector: ParticleSector) -> Result<PauliSum> {
    let n = h.n_qubits();
    if n < 2 {
        return Err(Error::Argument(format!("cannot taper a {n}-qubit operator")));
    }
    sector.check(n)?;
    let [alpha_q, total_q] = tapered_qubits(n);
    let alpha_sign = if sector.n_alpha % 2 == 0 { 1.0 } else { -1.0 };
    let total_sign = if sector.total() % 2 == 0 { 1.0 } else { -1.0 };

    let mut out = PauliSum::zero(n - 2);
    for (p, c) in h.terms() {
        let mut factor = 1.0;
        for (q, sign) in [(alpha_q, alpha_sign), (total_q, total_sign)] {
            if (p.x_mask() >> q) & 1 == 1 {
                return Err(Error::MappingInconsistency(format!(
                    "term {p} acts with X or Y on tapered qubit {q}; expected block spin ordering and parity encoding"
                )));
            }
            if (p.z_mask() >> q) & 1 == 1 {
                factor *= sign;
            }
        }
        out.add_term(c * Complex64::new(factor, 0.0), p.remove_qubits(&[alpha_q, total_q]))?;
    }
    out.prune();
    Ok(out)
}
