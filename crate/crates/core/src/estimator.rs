//! Grouped, optionally twirled, energy estimation.

use num_complex::Complex64;

use crate::ansatz::append_basis_change;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::mitigation::{rem_apply, trex_estimate, twirl_masks, ConfusionMatrix, TrexCalibration};
use crate::pauli::{from_qubit_bits, qwc_group, Phase, PauliString, PauliSum, QwcGroup};
use crate::seed::derive_seed;
use crate::sim::{bit_channel, counts_from_distribution, xor_relabel, NoiseModel, State};

const COEFF_IMAG_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
struct GroupPlan {
    group: QwcGroup,
    strings: Vec<PauliString>,
    coeffs: Vec<f64>,
    /// Z-support of each member in state-vector index space.
    parity_masks: Vec<usize>,
    basis_circuit: Circuit,
}

/// How the groups of one Hamiltonian are measured.
#[derive(Debug, Clone)]
pub struct MeasurementPlan {
    n_qubits: usize,
    n_terms: usize,
    constant: f64,
    groups: Vec<GroupPlan>,
    shots_per_group: u64,
    twirls_per_group: u64,
}

impl MeasurementPlan {
    /// Greedy qubit-wise-commuting grouping of `h`.
    pub fn new(h: &PauliSum, shots_per_group: u64, twirls_per_group: u64) -> Result<Self> {
        MeasurementPlan::from_groups(h, qwc_group(h), shots_per_group, twirls_per_group)
    }

    pub fn from_groups(
        h: &PauliSum,
        groups: Vec<QwcGroup>,
        shots_per_group: u64,
        twirls_per_group: u64,
    ) -> Result<Self> {
        if shots_per_group == 0 {
            return Err(Error::Argument("shots per group must be positive".into()));
        }
        if twirls_per_group > 0 && shots_per_group % twirls_per_group != 0 {
            return Err(Error::Argument(format!(
                "{twirls_per_group} twirls do not divide {shots_per_group} shots"
            )));
        }
        let n = h.n_qubits();
        let mut seen = vec![false; h.len()];
        let mut plans = Vec::with_capacity(groups.len());
        for group in groups {
            let mut strings = Vec::new();
            let mut coeffs = Vec::new();
            let mut parity_masks = Vec::new();
            for &i in &group.members {
                let (p, c) = h
                    .term(i)
                    .ok_or_else(|| Error::Plan(format!("term index {i} out of range")))?;
                if p.is_identity() {
                    return Err(Error::Plan("the identity term belongs to no group".into()));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::Plan(format!("term {p} appears in two groups")));
                }
                if !p.qubitwise_commutes_with(&group.basis) || p.support() & !group.basis.support() != 0 {
                    return Err(Error::Plan(format!("term {p} is not measurable in basis {}", group.basis)));
                }
                if c.im.abs() > COEFF_IMAG_TOLERANCE {
                    return Err(Error::Plan(format!("term {p} has a complex coefficient {c}")));
                }
                strings.push(*p);
                coeffs.push(c.re);
                parity_masks.push(from_qubit_bits(p.support(), n));
            }
            let mut basis_circuit = Circuit::new(n);
            for q in 0..n {
                append_basis_change(&mut basis_circuit, q, group.basis.get(q))?;
            }
            plans.push(GroupPlan {
                group,
                strings,
                coeffs,
                parity_masks,
                basis_circuit,
            });
        }
        for (i, (p, _)) in h.terms().enumerate() {
            if !p.is_identity() && !seen[i] {
                return Err(Error::Plan(format!("term {p} is not covered by any group")));
            }
        }
        Ok(MeasurementPlan {
            n_qubits: n,
            n_terms: h.len(),
            constant: h.constant(),
            groups: plans,
            shots_per_group,
            twirls_per_group,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> impl Iterator<Item = &QwcGroup> {
        self.groups.iter().map(|g| &g.group)
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn shots_per_group(&self) -> u64 {
        self.shots_per_group
    }

    pub fn twirls_per_group(&self) -> u64 {
        self.twirls_per_group
    }

    pub fn basis_circuit(&self, group: usize) -> &Circuit {
        &self.groups[group].basis_circuit
    }

    pub fn circuits_per_estimate(&self) -> u64 {
        self.groups.len() as u64 * self.twirls_per_group.max(1)
    }

    pub fn shots_per_estimate(&self) -> u64 {
        self.groups.len() as u64 * self.shots_per_group
    }

    /// Z-support masks (qubit bits) the groups will ask T-REx for.
    pub fn requested_masks(&self) -> Vec<u64> {
        let mut m: Vec<u64> = self
            .groups
            .iter()
            .flat_map(|g| g.strings.iter().map(|p| p.support()))
            .collect();
        m.sort_unstable();
        m.dedup();
        m
    }

    fn check_hamiltonian(&self, h: &PauliSum) -> Result<()> {
        if h.n_qubits() != self.n_qubits || h.len() != self.n_terms {
            return Err(Error::Plan(format!(
                "plan was built for {} terms on {} qubits, Hamiltonian has {} on {}",
                self.n_terms,
                self.n_qubits,
                h.len(),
                h.n_qubits()
            )));
        }
        for g in &self.groups {
            for ((&i, p), &c) in g.group.members.iter().zip(&g.strings).zip(&g.coeffs) {
                match h.term(i) {
                    Some((q, d)) if q == p && d.re == c => {}
                    _ => return Err(Error::Plan(format!("term {i} ({p}) differs from the plan"))),
                }
            }
        }
        Ok(())
    }
}

/// Readout treatment applied inside [`estimate_with`].
#[derive(Debug, Clone, Copy, Default)]
pub enum ReadoutMitigation<'a> {
    #[default]
    None,
    Trex(&'a TrexCalibration),
    Rem(&'a ConfusionMatrix),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEstimate {
    pub value: f64,
    /// Propagated variance of `value` (after any mitigation rescaling).
    pub variance: f64,
    /// Variance of the unmitigated estimator from the same shots.
    pub raw_variance: f64,
    pub shots_used: u64,
    pub circuits_executed: u64,
}

impl EnergyEstimate {
    pub fn std_error(&self) -> f64 {
        self.variance.sqrt()
    }
}

pub fn estimate(
    h: &PauliSum,
    ansatz: &Circuit,
    values: &[f64],
    plan: &MeasurementPlan,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<EnergyEstimate> {
    estimate_with(h, ansatz, values, plan, noise, ReadoutMitigation::None, seed)
}

/// Measure every group of `plan`; twirled circuits flip the masked qubits
/// with X right before measurement and the flips are undone on the
/// recorded bits.
pub fn estimate_with(
    h: &PauliSum,
    ansatz: &Circuit,
    values: &[f64],
    plan: &MeasurementPlan,
    noise: Option<&NoiseModel>,
    mitigation: ReadoutMitigation<'_>,
    seed: u64,
) -> Result<EnergyEstimate> {
    plan.check_hamiltonian(h)?;
    let n = plan.n_qubits;
    if ansatz.n_qubits() != n {
        return Err(Error::Dimension {
            expected: n,
            found: ansatz.n_qubits(),
        });
    }
    if let Some(m) = noise {
        m.check_width(n)?;
    }
    match mitigation {
        ReadoutMitigation::Trex(cal) if cal.n_qubits() != n => {
            return Err(Error::Dimension { expected: n, found: cal.n_qubits() })
        }
        ReadoutMitigation::Rem(a) if a.n_qubits() != n => {
            return Err(Error::Dimension { expected: n, found: a.n_qubits() })
        }
        _ => {}
    }
    let mut out = EnergyEstimate {
        value: plan.constant,
        variance: 0.0,
        raw_variance: 0.0,
        shots_used: 0,
        circuits_executed: 0,
    };
    if plan.groups.is_empty() {
        ansatz.check_binding(values)?;
        return Ok(out);
    }

    let mut prepared = State::for_noise(n, noise)?;
    prepared.run(ansatz, values, noise)?;
    let flip = noise.map_or(0.0, |m| m.depol_1q() / 2.0);
    let n_twirls = plan.twirls_per_group.max(1);
    let shots_per_circuit = plan.shots_per_group / n_twirls;

    for (gi, g) in plan.groups.iter().enumerate() {
        let mut state = prepared.clone();
        state.run(&g.basis_circuit, &[], noise)?;
        let probs = state.probabilities();
        let group_seed = derive_seed(seed, &[gi as u64]);
        let masks = if plan.twirls_per_group == 0 {
            vec![0]
        } else {
            twirl_masks(n, n_twirls as usize, group_seed)
        };

        let mut dist = vec![0.0; probs.len()];
        for (ti, &mask) in masks.iter().enumerate() {
            let t = from_qubit_bits(mask, n);
            let mut p = xor_relabel(&probs, t);
            if flip > 0.0 {
                for q in (0..n).filter(|q| (mask >> q) & 1 == 1) {
                    bit_channel(&mut p, n, q, flip, flip);
                }
            }
            if let Some(m) = noise {
                m.apply_readout(&mut p);
            }
            let counts = counts_from_distribution(&p, n, shots_per_circuit, derive_seed(group_seed, &[ti as u64]));
            match mitigation {
                ReadoutMitigation::Rem(a) => {
                    for (y, q) in rem_apply(a, &counts)?.into_iter().enumerate() {
                        dist[y ^ t] += q * shots_per_circuit as f64;
                    }
                }
                _ => {
                    for (y, k) in counts.iter() {
                        dist[y ^ t] += k as f64;
                    }
                }
            }
        }
        let total = plan.shots_per_group as f64;
        dist.iter_mut().for_each(|d| *d /= total);

        let sign = |y: usize, m: usize| if (y & m).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let raw_means: Vec<f64> = g
            .parity_masks
            .iter()
            .map(|&m| dist.iter().enumerate().map(|(y, d)| d * sign(y, m)).sum())
            .collect();
        let (means, weights) = match mitigation {
            ReadoutMitigation::Trex(cal) => {
                let masks: Vec<u64> = g.strings.iter().map(|p| p.support()).collect();
                let w = masks.iter().map(|&m| cal.weight(m)).collect::<Result<Vec<f64>>>()?;
                (trex_estimate(&raw_means, &masks, cal)?, w)
            }
            _ => (raw_means, vec![1.0; g.coeffs.len()]),
        };
        out.value += g.coeffs.iter().zip(&means).map(|(c, m)| c * m).sum::<f64>();

        let per_shot_variance = |w: &[f64]| {
            let (mut first, mut second) = (0.0, 0.0);
            for (y, d) in dist.iter().enumerate() {
                let e: f64 = g
                    .coeffs
                    .iter()
                    .zip(&g.parity_masks)
                    .zip(w)
                    .map(|((c, &m), w)| c * w * sign(y, m))
                    .sum();
                first += d * e;
                second += d * e * e;
            }
            (second - first * first).max(0.0) / total
        };
        out.variance += per_shot_variance(&weights);
        out.raw_variance += per_shot_variance(&vec![1.0; g.coeffs.len()]);
        out.shots_used += plan.shots_per_group;
        out.circuits_executed += masks.len() as u64;
    }
    Ok(out)
}

fn pauli_sum_expectation(h: &PauliSum, state: &State) -> Result<f64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, c) in h.terms() {
        let (xm, zm) = p.index_masks();
        let phase = Phase::from_exponent((p.x_mask() & p.z_mask()).count_ones() as i64).to_complex();
        acc += c * state.pauli_expectation(xm, zm, phase);
    }
    if acc.im.abs() > 1e-10 * acc.re.abs().max(1.0) {
        return Err(Error::Data(format!(
            "expectation has imaginary part {:e}; is the operator Hermitian?",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// `⟨ψ(θ)|H|ψ(θ)⟩` on the noiseless state vector.
pub fn exact_expectation(h: &PauliSum, ansatz: &Circuit, values: &[f64]) -> Result<f64> {
    if h.n_qubits() != ansatz.n_qubits() {
        return Err(Error::Dimension {
            expected: ansatz.n_qubits(),
            found: h.n_qubits(),
        });
    }
    let mut s = State::zero(ansatz.n_qubits())?;
    s.run(ansatz, values, None)?;
    pauli_sum_expectation(h, &s)
}

/// `Tr(ρH)` with gate noise from `noise` (readout does not enter).
pub fn noisy_expectation(h: &PauliSum, ansatz: &Circuit, values: &[f64], noise: &NoiseModel) -> Result<f64> {
    if h.n_qubits() != ansatz.n_qubits() {
        return Err(Error::Dimension {
            expected: ansatz.n_qubits(),
            found: h.n_qubits(),
        });
    }
    let mut s = State::for_noise(ansatz.n_qubits(), Some(noise))?;
    s.run(ansatz, values, Some(noise))?;
    pauli_sum_expectation(h, &s)
}
