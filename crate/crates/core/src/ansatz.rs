//! EfficientSU2 and UCCSD circuit builders.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::circuit::{Angle, Circuit};
use crate::error::{Error, Result};
use crate::fermion::{taper_two_qubits, tapered_qubits, Encoding, ParticleSector};
use crate::pauli::{Pauli, PauliString, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UccsdMapping {
    JordanWigner,
    /// Parity encoding with the two spin-parity qubits removed.
    ParityTapered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzSpec {
    EfficientSu2 {
        n_qubits: usize,
        reps: usize,
    },
    Uccsd {
        n_spin_orbitals: usize,
        sector: ParticleSector,
        mapping: UccsdMapping,
    },
}

impl AnsatzSpec {
    pub fn build(&self) -> Result<Circuit> {
        match *self {
            AnsatzSpec::EfficientSu2 { n_qubits, reps } => build_efficient_su2(n_qubits, reps),
            AnsatzSpec::Uccsd {
                n_spin_orbitals,
                sector,
                mapping,
            } => build_uccsd(n_spin_orbitals, sector, mapping),
        }
    }

    pub fn n_qubits(&self) -> usize {
        match *self {
            AnsatzSpec::EfficientSu2 { n_qubits, .. } => n_qubits,
            AnsatzSpec::Uccsd {
                n_spin_orbitals,
                mapping: UccsdMapping::JordanWigner,
                ..
            } => n_spin_orbitals,
            AnsatzSpec::Uccsd { n_spin_orbitals, .. } => n_spin_orbitals.saturating_sub(2),
        }
    }
}

/// Alternating RY/RZ rotation layers with linear-chain CNOT entanglers.
/// Parameters are ordered layer by layer; within a layer all RY angles
/// (qubit 0 first) precede all RZ angles.
pub fn build_efficient_su2(n_qubits: usize, reps: usize) -> Result<Circuit> {
    if n_qubits < 2 || reps < 1 {
        return Err(Error::Argument(format!(
            "EfficientSU2 needs at least 2 qubits and 1 repetition, got {n_qubits} and {reps}"
        )));
    }
    let mut c = Circuit::new(n_qubits);
    for layer in 0..=reps {
        if layer > 0 {
            for q in 0..n_qubits - 1 {
                c.cnot(q, q + 1)?;
            }
        }
        for q in 0..n_qubits {
            let k = c.add_parameter(format!("theta[{}]", c.n_parameters()));
            c.ry(q, Angle::param(k))?;
        }
        for q in 0..n_qubits {
            let k = c.add_parameter(format!("theta[{}]", c.n_parameters()));
            c.rz(q, Angle::param(k))?;
        }
    }
    Ok(c)
}

/// A spin-conserving excitation `occupied → virtual`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Excitation {
    pub occupied: Vec<usize>,
    pub virtuals: Vec<usize>,
}

impl Excitation {
    /// `T - T†` with `T = a†_{v0} a†_{v1} … a_{o1} a_{o0}`.
    pub fn generator(&self, encoding: Encoding, n_modes: usize) -> Result<PauliSum> {
        let forward: Vec<(usize, bool)> = self
            .virtuals
            .iter()
            .map(|&v| (v, true))
            .chain(self.occupied.iter().rev().map(|&o| (o, false)))
            .collect();
        let backward: Vec<(usize, bool)> = self
            .occupied
            .iter()
            .map(|&o| (o, true))
            .chain(self.virtuals.iter().rev().map(|&v| (v, false)))
            .collect();
        encoding
            .map_product(n_modes, &forward)?
            .sub(&encoding.map_product(n_modes, &backward)?)
    }
}

impl fmt::Display for Excitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}->{}", join(&self.occupied), join(&self.virtuals))
    }
}

/// Singles then doubles, each sorted by (occupied, virtual). Spin blocks are
/// α = `0..m`, β = `m..2m`.
pub fn uccsd_excitations(n_spin_orbitals: usize, sector: ParticleSector) -> Result<Vec<Excitation>> {
    sector.check(n_spin_orbitals)?;
    let m = n_spin_orbitals / 2;
    let occ_a: Vec<usize> = (0..sector.n_alpha).collect();
    let vir_a: Vec<usize> = (sector.n_alpha..m).collect();
    let occ_b: Vec<usize> = (m..m + sector.n_beta).collect();
    let vir_b: Vec<usize> = (m + sector.n_beta..2 * m).collect();

    let mut singles = Vec::new();
    for (occ, vir) in [(&occ_a, &vir_a), (&occ_b, &vir_b)] {
        for &i in occ {
            for &a in vir {
                singles.push(Excitation {
                    occupied: vec![i],
                    virtuals: vec![a],
                });
            }
        }
    }

    let pairs = |v: &[usize]| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (x, &i) in v.iter().enumerate() {
            for &j in &v[x + 1..] {
                out.push((i, j));
            }
        }
        out
    };
    let cross = |a: &[usize], b: &[usize]| -> Vec<(usize, usize)> {
        a.iter().flat_map(|&i| b.iter().map(move |&j| (i, j))).collect()
    };
    let mut doubles = Vec::new();
    for (occ, vir) in [
        (pairs(&occ_a), pairs(&vir_a)),
        (pairs(&occ_b), pairs(&vir_b)),
        (cross(&occ_a, &occ_b), cross(&vir_a, &vir_b)),
    ] {
        for &(i, j) in &occ {
            for &(a, b) in &vir {
                doubles.push(Excitation {
                    occupied: vec![i, j],
                    virtuals: vec![a, b],
                });
            }
        }
    }

    singles.sort();
    doubles.sort();
    singles.extend(doubles);
    Ok(singles)
}

/// Append `exp(-i·angle/2·P)` as basis change, CNOT ladder, RZ and the
/// mirror image.
pub(crate) fn append_pauli_rotation(c: &mut Circuit, p: &PauliString, angle: Angle) -> Result<()> {
    let support: Vec<usize> = (0..p.n_qubits()).filter(|&q| p.get(q) != Pauli::I).collect();
    let Some(&last) = support.last() else {
        return Ok(());
    };
    for &q in &support {
        append_basis_change(c, q, p.get(q))?;
    }
    for w in support.windows(2) {
        c.cnot(w[0], w[1])?;
    }
    c.rz(last, angle)?;
    for w in support.windows(2).rev() {
        c.cnot(w[0], w[1])?;
    }
    for &q in &support {
        match p.get(q) {
            Pauli::X => c.ry(q, Angle::Fixed(FRAC_PI_2))?,
            Pauli::Y => {
                c.ry(q, Angle::Fixed(FRAC_PI_2))?;
                c.rz(q, Angle::Fixed(FRAC_PI_2))?;
            }
            _ => {}
        }
    }
    Ok(())
}

/// Rotate qubit `q` so that measuring Z afterwards measures `axis`:
/// X via RY(-π/2), Y via RZ(-π/2) followed by the X rotation.
pub(crate) fn append_basis_change(c: &mut Circuit, q: usize, axis: Pauli) -> Result<()> {
    match axis {
        Pauli::X => c.ry(q, Angle::Fixed(-FRAC_PI_2)),
        Pauli::Y => {
            c.rz(q, Angle::Fixed(-FRAC_PI_2))?;
            c.ry(q, Angle::Fixed(-FRAC_PI_2))
        }
        _ => Ok(()),
    }
}

/// Hartree–Fock reference on the ansatz register, as qubit bits.
pub fn hartree_fock_bits(n_spin_orbitals: usize, sector: ParticleSector, mapping: UccsdMapping) -> Result<u64> {
    sector.check(n_spin_orbitals)?;
    let occ = sector.reference_occupation(n_spin_orbitals);
    Ok(match mapping {
        UccsdMapping::JordanWigner => Encoding::JordanWigner.encode_occupation(&occ),
        UccsdMapping::ParityTapered => {
            let bits = Encoding::Parity.encode_occupation(&occ);
            let full = PauliString::from_masks(n_spin_orbitals, bits, 0)?;
            full.remove_qubits(&tapered_qubits(n_spin_orbitals)).x_mask()
        }
    })
}

/// First-order Trotterized UCCSD on top of the Hartree–Fock reference, one
/// parameter per excitation.
pub fn build_uccsd(n_spin_orbitals: usize, sector: ParticleSector, mapping: UccsdMapping) -> Result<Circuit> {
    let excitations = uccsd_excitations(n_spin_orbitals, sector)?;
    let (encoding, n_qubits) = match mapping {
        UccsdMapping::JordanWigner => (Encoding::JordanWigner, n_spin_orbitals),
        UccsdMapping::ParityTapered => (Encoding::Parity, n_spin_orbitals - 2),
    };
    let mut c = Circuit::new(n_qubits);
    let hf = hartree_fock_bits(n_spin_orbitals, sector, mapping)?;
    for q in 0..n_qubits {
        if (hf >> q) & 1 == 1 {
            c.x(q)?;
        }
    }
    for ex in &excitations {
        let k = c.add_parameter(format!("t[{ex}]"));
        let mut g = ex.generator(encoding, n_spin_orbitals)?;
        if mapping == UccsdMapping::ParityTapered {
            g = taper_two_qubits(&g, sector)?;
        }
        // g = Σ i·c_j·P_j, and exp(iθcP) = R_P(-2cθ).
        for (p, coeff) in g.terms() {
            if coeff.re.abs() > 1e-10 {
                return Err(Error::MappingInconsistency(format!(
                    "excitation {ex} generator is not anti-Hermitian (term {p}: {coeff})"
                )));
            }
            if p.is_identity() || coeff.im == 0.0 {
                continue;
            }
            append_pauli_rotation(
                &mut c,
                p,
                Angle::Param {
                    index: k,
                    scale: -2.0 * coeff.im,
                },
            )?;
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::to_dense;
    use crate::sim::statevector;
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn efficient_su2_shape() {
        let c = build_efficient_su2(4, 1).unwrap();
        assert_eq!(c.n_parameters(), 16);
        assert_eq!(c.count_two_qubit(), 3);
        for (n, reps) in [(2, 1), (3, 2), (5, 3)] {
            assert_eq!(build_efficient_su2(n, reps).unwrap().n_parameters(), 2 * n * (reps + 1));
        }
        assert!(build_efficient_su2(1, 1).is_err());
    }

    #[test]
    fn efficient_su2_zero_parameters_is_identity() {
        let c = build_efficient_su2(2, 1).unwrap();
        let v = statevector(&c, &[0.0; 8]).unwrap();
        assert_abs_diff_eq!(v[0].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn beh2_excitation_list() {
        let ex = uccsd_excitations(6, ParticleSector::new(1, 1)).unwrap();
        let labels: Vec<String> = ex.iter().map(|e| e.to_string()).collect();
        assert_eq!(
            labels,
            ["0->1", "0->2", "3->4", "3->5", "0,3->1,4", "0,3->1,5", "0,3->2,4", "0,3->2,5"]
        );
        assert!(uccsd_excitations(6, ParticleSector::new(4, 0)).is_err());
    }

    /// Independent enumeration: all spin-conserving singles/doubles by brute
    /// force over index tuples.
    #[test]
    fn excitation_count_matches_brute_force() {
        for (n, na, nb) in [(4, 1, 1), (6, 1, 1), (8, 2, 1), (8, 2, 2), (6, 2, 0)] {
            let m = n / 2;
            let sector = ParticleSector::new(na, nb);
            let occ = sector.reference_occupation(n);
            let spin = |i: usize| i / m;
            let mut count = 0;
            for i in 0..n {
                for a in 0..n {
                    if occ[i] && !occ[a] && spin(i) == spin(a) {
                        count += 1;
                    }
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    for a in 0..n {
                        for b in a + 1..n {
                            let ok = occ[i] && occ[j] && !occ[a] && !occ[b];
                            let mut s_in = [spin(i), spin(j)];
                            let mut s_out = [spin(a), spin(b)];
                            s_in.sort();
                            s_out.sort();
                            if ok && s_in == s_out {
                                count += 1;
                            }
                        }
                    }
                }
            }
            assert_eq!(uccsd_excitations(n, sector).unwrap().len(), count, "n={n} ({na},{nb})");
        }
    }

    #[test]
    fn zero_parameters_give_reference_state() {
        for mapping in [UccsdMapping::JordanWigner, UccsdMapping::ParityTapered] {
            let sector = ParticleSector::new(1, 1);
            let c = build_uccsd(6, sector, mapping).unwrap();
            assert_eq!(c.n_parameters(), 8);
            let v = statevector(&c, &[0.0; 8]).unwrap();
            let bits = hartree_fock_bits(6, sector, mapping).unwrap();
            let idx = crate::pauli::from_qubit_bits(bits, c.n_qubits());
            assert_abs_diff_eq!(v[idx].norm(), 1.0, epsilon = 1e-12);
        }
        assert_eq!(hartree_fock_bits(6, ParticleSector::new(1, 1), UccsdMapping::ParityTapered).unwrap(), 0b11);
    }

    /// The circuit equals Π_k exp(θ_k G_k) applied to the reference, with the
    /// exponentials computed densely.
    #[test]
    fn circuit_matches_dense_exponentials() {
        let sector = ParticleSector::new(1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for mapping in [UccsdMapping::JordanWigner, UccsdMapping::ParityTapered] {
            let c = build_uccsd(6, sector, mapping).unwrap();
            let theta: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
            let v = statevector(&c, &theta).unwrap();

            let n = c.n_qubits();
            let bits = hartree_fock_bits(6, sector, mapping).unwrap();
            let mut psi = DVector::<Complex64>::zeros(1 << n);
            psi[crate::pauli::from_qubit_bits(bits, n)] = Complex64::new(1.0, 0.0);
            let encoding = match mapping {
                UccsdMapping::JordanWigner => Encoding::JordanWigner,
                UccsdMapping::ParityTapered => Encoding::Parity,
            };
            for (ex, t) in uccsd_excitations(6, sector).unwrap().iter().zip(&theta) {
                let mut g = ex.generator(encoding, 6).unwrap();
                if mapping == UccsdMapping::ParityTapered {
                    g = taper_two_qubits(&g, sector).unwrap();
                }
                let m: DMatrix<Complex64> = to_dense(&g).unwrap() * Complex64::new(*t, 0.0);
                psi = m.exp() * psi;
            }
            for i in 0..1 << n {
                assert_abs_diff_eq!((v[i] - psi[i]).norm(), 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn jordan_wigner_uccsd_conserves_particle_number() {
        let sector = ParticleSector::new(1, 1);
        let c = build_uccsd(6, sector, UccsdMapping::JordanWigner).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let theta: Vec<f64> = (0..8).map(|_| rng.random_range(-3.0..3.0)).collect();
            let v = statevector(&c, &theta).unwrap();
            let leaked: f64 = v
                .iter()
                .enumerate()
                .filter(|(i, _)| i.count_ones() != 2)
                .map(|(_, a)| a.norm_sqr())
                .sum();
            assert!(leaked < 1e-10, "{leaked}");
        }
    }

    #[test]
    fn builders_are_deterministic() {
        let spec = AnsatzSpec::Uccsd {
            n_spin_orbitals: 6,
            sector: ParticleSector::new(1, 1),
            mapping: UccsdMapping::ParityTapered,
        };
        assert_eq!(spec.build().unwrap(), spec.build().unwrap());
        assert_eq!(spec.n_qubits(), 4);
    }
}
