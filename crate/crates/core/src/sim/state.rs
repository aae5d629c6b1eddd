//! Pure and mixed state propagation.
//!
//! Indices put qubit 0 in the most significant bit. A density matrix on `n`
//! qubits is stored row-major and treated as a vector on `2n` qubits: row
//! qubit `q` sits at position `q`, column qubit `q` at position `n + q`, so
//! `ρ → UρU†` is `U` on the row position and `conj(U)` on the column one.

use num_complex::Complex64 as C;

use super::noise::NoiseModel;
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

pub const STATEVECTOR_QUBIT_LIMIT: usize = 24;
pub const DENSITY_QUBIT_LIMIT: usize = 10;

pub(crate) type Mat2 = [[C; 2]; 2];

const ZERO: C = C { re: 0.0, im: 0.0 };
const ONE: C = C { re: 1.0, im: 0.0 };

pub(crate) fn gate_matrix(gate: &Gate, values: &[f64]) -> Option<Mat2> {
    Some(match gate {
        Gate::Ry { angle, .. } => {
            let t = angle.resolve(values) / 2.0;
            let (s, c) = t.sin_cos();
            [[C::new(c, 0.0), C::new(-s, 0.0)], [C::new(s, 0.0), C::new(c, 0.0)]]
        }
        Gate::Rz { angle, .. } => {
            let t = angle.resolve(values) / 2.0;
            [[C::from_polar(1.0, -t), ZERO], [ZERO, C::from_polar(1.0, t)]]
        }
        Gate::Sx { .. } => {
            let (a, b) = (C::new(0.5, 0.5), C::new(0.5, -0.5));
            [[a, b], [b, a]]
        }
        Gate::SxDg { .. } => {
            let (a, b) = (C::new(0.5, -0.5), C::new(0.5, 0.5));
            [[a, b], [b, a]]
        }
        Gate::X { .. } => [[ZERO, ONE], [ONE, ZERO]],
        Gate::Cnot { .. } => return None,
    })
}

pub(crate) const PAULI_MATRICES: [Mat2; 4] = [
    [[ONE, ZERO], [ZERO, ONE]],
    [[ZERO, ONE], [ONE, ZERO]],
    [[ZERO, C { re: 0.0, im: -1.0 }], [C { re: 0.0, im: 1.0 }, ZERO]],
    [[ONE, ZERO], [ZERO, C { re: -1.0, im: 0.0 }]],
];

/// Apply a single-qubit matrix at `pos` of a `width`-qubit register.
pub(crate) fn apply_1q(amps: &mut [C], width: usize, pos: usize, u: &Mat2) {
    let stride = 1usize << (width - 1 - pos);
    for block in (0..amps.len()).step_by(2 * stride) {
        for i in block..block + stride {
            let (a0, a1) = (amps[i], amps[i + stride]);
            amps[i] = u[0][0] * a0 + u[0][1] * a1;
            amps[i + stride] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
}

pub(crate) fn apply_cnot(amps: &mut [C], width: usize, control: usize, target: usize) {
    let cbit = 1usize << (width - 1 - control);
    let tbit = 1usize << (width - 1 - target);
    for i in 0..amps.len() {
        if i & cbit != 0 && i & tbit == 0 {
            amps.swap(i, i | tbit);
        }
    }
}

fn conj(u: &Mat2) -> Mat2 {
    [[u[0][0].conj(), u[0][1].conj()], [u[1][0].conj(), u[1][1].conj()]]
}

#[derive(Debug, Clone)]
enum Repr {
    Pure(Vec<C>),
    Mixed(Vec<C>),
}

/// A register state, pure unless gate noise forces a density matrix.
#[derive(Debug, Clone)]
pub struct State {
    n_qubits: usize,
    repr: Repr,
}

impl State {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits > STATEVECTOR_QUBIT_LIMIT {
            return Err(Error::Resource(format!(
                "state-vector simulation is limited to {STATEVECTOR_QUBIT_LIMIT} qubits, got {n_qubits}"
            )));
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(State {
            n_qubits,
            repr: Repr::Pure(amps),
        })
    }

    pub fn zero_mixed(n_qubits: usize) -> Result<Self> {
        if n_qubits > DENSITY_QUBIT_LIMIT {
            return Err(Error::Resource(format!(
                "density-matrix simulation is limited to {DENSITY_QUBIT_LIMIT} qubits, got {n_qubits}"
            )));
        }
        let mut rho = vec![ZERO; 1 << (2 * n_qubits)];
        rho[0] = ONE;
        Ok(State {
            n_qubits,
            repr: Repr::Mixed(rho),
        })
    }

    /// `|0…0⟩`, as a density matrix when `noise` carries gate errors.
    pub fn for_noise(n_qubits: usize, noise: Option<&NoiseModel>) -> Result<Self> {
        match noise {
            Some(m) if m.has_gate_noise() => State::zero_mixed(n_qubits),
            _ => State::zero(n_qubits),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn is_mixed(&self) -> bool {
        matches!(self.repr, Repr::Mixed(_))
    }

    pub fn amplitudes(&self) -> Option<&[C]> {
        match &self.repr {
            Repr::Pure(a) => Some(a),
            Repr::Mixed(_) => None,
        }
    }

    pub fn into_amplitudes(self) -> Option<Vec<C>> {
        match self.repr {
            Repr::Pure(a) => Some(a),
            Repr::Mixed(_) => None,
        }
    }

    /// Run `c` with the given binding. Gate noise from `noise` is applied
    /// after every gate when the state is mixed; a pure state with a noisy
    /// model is an error.
    pub fn run(&mut self, c: &Circuit, values: &[f64], noise: Option<&NoiseModel>) -> Result<()> {
        if c.n_qubits() != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: c.n_qubits(),
            });
        }
        c.check_binding(values)?;
        let depol = match noise {
            Some(m) if m.has_gate_noise() => {
                if !self.is_mixed() {
                    return Err(Error::Argument(
                        "gate noise requires a density-matrix state".into(),
                    ));
                }
                Some((m.depol_1q(), m.depol_2q()))
            }
            _ => None,
        };
        let n = self.n_qubits;
        for gate in c.gates() {
            match &mut self.repr {
                Repr::Pure(amps) => apply_gate(amps, n, gate, values),
                Repr::Mixed(rho) => {
                    let u = gate_matrix(gate, values);
                    match (gate, u) {
                        (Gate::Cnot { control, target }, _) => {
                            apply_cnot(rho, 2 * n, *control, *target);
                            apply_cnot(rho, 2 * n, n + control, n + target);
                        }
                        (_, Some(u)) => {
                            let q = gate.qubits().0;
                            apply_1q(rho, 2 * n, q, &u);
                            apply_1q(rho, 2 * n, n + q, &conj(&u));
                        }
                        _ => unreachable!(),
                    }
                    if let Some((p1, p2)) = depol {
                        match gate.qubits() {
                            (a, Some(b)) if p2 > 0.0 => depolarize(rho, n, &[a, b], p2),
                            (a, None) if p1 > 0.0 => depolarize(rho, n, &[a], p1),
                            _ => {}
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Outcome probabilities of an ideal computational-basis measurement.
    pub fn probabilities(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Pure(a) => a.iter().map(|z| z.norm_sqr()).collect(),
            Repr::Mixed(rho) => {
                let dim = 1usize << self.n_qubits;
                (0..dim).map(|i| rho[i * dim + i].re.max(0.0)).collect()
            }
        }
    }

    /// `⟨P⟩` for a Pauli string given by index-space masks and its `i^{#Y}`
    /// phase.
    pub(crate) fn pauli_expectation(&self, xm: usize, zm: usize, phase: C) -> C {
        let parity = |i: usize| if (i & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        match &self.repr {
            Repr::Pure(a) => {
                let mut acc = ZERO;
                for (i, amp) in a.iter().enumerate() {
                    acc += a[i ^ xm].conj() * *amp * parity(i);
                }
                acc * phase
            }
            Repr::Mixed(rho) => {
                // Tr(Pρ) = Σ_i phase·sign(i)·ρ[i, i^x]
                let dim = 1usize << self.n_qubits;
                let mut acc = ZERO;
                for i in 0..dim {
                    acc += rho[i * dim + (i ^ xm)] * parity(i);
                }
                acc * phase
            }
        }
    }
}

pub(crate) fn apply_gate(amps: &mut [C], n: usize, gate: &Gate, values: &[f64]) {
    match (gate, gate_matrix(gate, values)) {
        (Gate::Cnot { control, target }, _) => apply_cnot(amps, n, *control, *target),
        (_, Some(u)) => apply_1q(amps, n, gate.qubits().0, &u),
        _ => unreachable!(),
    }
}

/// `ρ → (1-p)ρ + p·Tr_S(ρ)⊗I/2^k` on the listed qubits.
fn depolarize(rho: &mut [C], n: usize, qubits: &[usize], p: f64) {
    let dim = 1usize << n;
    let mask: usize = qubits.iter().map(|q| 1usize << (n - 1 - q)).sum();
    let subsets: Vec<usize> = {
        let mut v = vec![0usize];
        let mut s = mask;
        while s != 0 {
            v.push(s);
            s = (s - 1) & mask;
        }
        v
    };
    let norm = 1.0 / subsets.len() as f64;
    for r0 in (0..dim).filter(|r| r & mask == 0) {
        for c0 in (0..dim).filter(|c| c & mask == 0) {
            let avg: C = subsets
                .iter()
                .map(|&s| rho[(r0 | s) * dim + (c0 | s)])
                .sum::<C>()
                * norm;
            for &s1 in &subsets {
                for &s2 in &subsets {
                    let idx = (r0 | s1) * dim + (c0 | s2);
                    rho[idx] *= 1.0 - p;
                    if s1 == s2 {
                        rho[idx] += avg * p;
                    }
                }
            }
        }
    }
}

/// Ideal state vector of `c` at `values`.
pub fn statevector(c: &Circuit, values: &[f64]) -> Result<Vec<C>> {
    let mut s = State::zero(c.n_qubits())?;
    s.run(c, values, None)?;
    Ok(s.into_amplitudes().expect("pure state"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{fold, Angle};
    use crate::sim::noise::NoiseModel;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    pub(crate) fn random_circuit(n: usize, depth: usize, seed: u64) -> (Circuit, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Circuit::new(n);
        let mut values = Vec::new();
        for _ in 0..depth {
            let q = rng.random_range(0..n);
            match rng.random_range(0..6) {
                0 | 1 => {
                    let k = c.add_parameter(format!("p{}", values.len()));
                    values.push(rng.random_range(-PI..PI));
                    let angle = Angle::Param { index: k, scale: rng.random_range(-2.0..2.0) };
                    if rng.random() { c.ry(q, angle) } else { c.rz(q, angle) }.unwrap();
                }
                2 => c.sx(q).unwrap(),
                3 => c.push(Gate::SxDg { qubit: q }).unwrap(),
                4 => c.x(q).unwrap(),
                _ if n > 1 => {
                    let t = (q + rng.random_range(1..n)) % n;
                    c.cnot(q, t).unwrap();
                }
                _ => c.ry(q, Angle::Fixed(0.3)).unwrap(),
            }
        }
        (c, values)
    }

    #[test]
    fn ry_pi_flips() {
        let mut c = Circuit::new(1);
        c.ry(0, Angle::Fixed(PI)).unwrap();
        let v = statevector(&c, &[]).unwrap();
        assert_abs_diff_eq!(v[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cnot_on_10() {
        let mut c = Circuit::new(2);
        c.x(0).unwrap();
        c.cnot(0, 1).unwrap();
        let v = statevector(&c, &[]).unwrap();
        assert_abs_diff_eq!(v[0b11].re, 1.0);
    }

    #[test]
    fn sx_squared_is_x() {
        let mut c = Circuit::new(1);
        c.sx(0).unwrap();
        c.sx(0).unwrap();
        let v = statevector(&c, &[]).unwrap();
        assert_abs_diff_eq!(v[1].norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn unbound_parameter_is_binding_error() {
        let mut c = Circuit::new(1);
        let k = c.add_parameter("t");
        c.ry(0, Angle::param(k)).unwrap();
        assert!(matches!(statevector(&c, &[]), Err(Error::Binding(_))));
    }

    #[test]
    fn random_circuits_are_unitary_and_fold_invariant() {
        for seed in 0..20 {
            let (c, values) = random_circuit(4, 40, seed);
            let v = statevector(&c, &values).unwrap();
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);

            let folded = statevector(&fold(&c, 3).unwrap(), &values).unwrap();
            for (a, b) in v.iter().zip(&folded) {
                assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-10);
            }

            let mut round = c.clone();
            round.extend(&c.inverse()).unwrap();
            let back = statevector(&round, &values).unwrap();
            assert_abs_diff_eq!(back[0].norm(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn noiseless_density_matrix_matches_statevector() {
        let (c, values) = random_circuit(3, 30, 99);
        let pure = statevector(&c, &values).unwrap();
        let mut mixed = State::zero_mixed(3).unwrap();
        mixed.run(&c, &values, None).unwrap();
        for (p, q) in pure.iter().map(|z| z.norm_sqr()).zip(mixed.probabilities()) {
            assert_abs_diff_eq!(p, q, epsilon = 1e-12);
        }
    }

    #[test]
    fn full_depolarization_mixes_touched_qubit() {
        let noise = NoiseModel::uniform(2, 0.0, 0.0, 1.0, 0.0).unwrap();
        let mut c = Circuit::new(2);
        c.x(1).unwrap();
        let mut s = State::for_noise(2, Some(&noise)).unwrap();
        s.run(&c, &[], Some(&noise)).unwrap();
        let p = s.probabilities();
        assert_abs_diff_eq!(p[0b00], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p[0b01], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn depolarizing_shrinks_pauli_expectation() {
        // Single-qubit channel: ⟨Z⟩ → (1-p)⟨Z⟩.
        let noise = NoiseModel::uniform(1, 0.0, 0.0, 0.2, 0.0).unwrap();
        let mut c = Circuit::new(1);
        c.x(0).unwrap();
        let mut s = State::for_noise(1, Some(&noise)).unwrap();
        s.run(&c, &[], Some(&noise)).unwrap();
        let z = s.pauli_expectation(0, 1, ONE);
        assert_abs_diff_eq!(z.re, -0.8, epsilon = 1e-14);
    }

    #[test]
    fn pure_and_mixed_pauli_expectations_agree() {
        let (c, values) = random_circuit(3, 25, 5);
        let mut pure = State::zero(3).unwrap();
        pure.run(&c, &values, None).unwrap();
        let mut mixed = State::zero_mixed(3).unwrap();
        mixed.run(&c, &values, None).unwrap();
        for label in ["XYZ", "ZZI", "YIX", "III"] {
            let p: crate::pauli::PauliString = label.parse().unwrap();
            let (xm, zm) = p.index_masks();
            let phase = crate::pauli::Phase::from_exponent((p.x_mask() & p.z_mask()).count_ones() as i64)
                .to_complex();
            let a = pure.pauli_expectation(xm, zm, phase);
            let b = mixed.pauli_expectation(xm, zm, phase);
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
        }
    }
}
