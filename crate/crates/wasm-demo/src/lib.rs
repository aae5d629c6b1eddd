//! Browser bindings for three small experiments on the parity-tapered BeH2
//! Hamiltonian with a one-layer EfficientSU2 ansatz.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::OnceLock;

use mitivqe::ansatz::build_efficient_su2;
use mitivqe::circuit::{fold, Circuit};
use mitivqe::estimator::{estimate, estimate_with, exact_expectation, MeasurementPlan, ReadoutMitigation};
use mitivqe::fermion::{parse_integral_file, qubit_hamiltonian, Encoding};
use mitivqe::mitigation::{trex_calibrate, zne_fit, FitKind, ZneSeries};
use mitivqe::pauli::{min_eigenvalue, PauliSum};
use mitivqe::sim::NoiseModel;
use wasm_bindgen::prelude::*;

const INTEGRALS: &str = include_str!("../../core/fixtures/beh2_cas23.integrals");

/// Final parameters of a 250-iteration hardware run.
const HARDWARE_THETA: [f64; 16] = [
    3.255, -0.056, 3.222, -2.214, -2.208, 1.688, -0.416, 0.113, -0.033, 0.058, -0.038, 2.204, 0.702, -0.273,
    -0.137, 1.747,
];

struct Problem {
    h: PauliSum,
    ansatz: Circuit,
    ground: f64,
}

fn problem() -> &'static Problem {
    static P: OnceLock<Problem> = OnceLock::new();
    P.get_or_init(|| {
        let file = parse_integral_file(INTEGRALS, Path::new("beh2_cas23.integrals")).expect("bundled integrals parse");
        let h = qubit_hamiltonian(&file, Encoding::Parity, true, None).expect("bundled integrals map");
        let ground = min_eigenvalue(&h).expect("four qubits diagonalize");
        Problem {
            h,
            ansatz: build_efficient_su2(4, 1).expect("valid ansatz"),
            ground,
        }
    })
}

fn theta_or_default(theta: &[f64]) -> Vec<f64> {
    if theta.len() == HARDWARE_THETA.len() {
        theta.to_vec()
    } else {
        HARDWARE_THETA.to_vec()
    }
}

#[wasm_bindgen]
pub fn hardware_theta() -> Vec<f64> {
    HARDWARE_THETA.to_vec()
}

#[wasm_bindgen]
pub fn ground_energy() -> f64 {
    problem().ground
}

/// Exact energy at `theta` (16 values; anything else means the hardware
/// parameters).
#[wasm_bindgen]
pub fn exact_energy(theta: &[f64]) -> f64 {
    let p = problem();
    exact_expectation(&p.h, &p.ansatz, &theta_or_default(theta)).unwrap_or(f64::NAN)
}

/// Exact energies while parameter `index` sweeps `[-π, π]` in `points`
/// steps, all others held at `theta`.
#[wasm_bindgen]
pub fn energy_scan(theta: &[f64], index: usize, points: usize) -> Vec<f64> {
    let p = problem();
    let mut x = theta_or_default(theta);
    let index = index.min(x.len() - 1);
    let points = points.max(2);
    (0..points)
        .map(|i| {
            x[index] = -PI + 2.0 * PI * i as f64 / (points - 1) as f64;
            exact_expectation(&p.h, &p.ansatz, &x).unwrap_or(f64::NAN)
        })
        .collect()
}

/// Fold the ansatz at scales 1, 3, 5 under depolarizing noise and
/// extrapolate. Returns `[e1, e3, e5, linear, quadratic, exponential,
/// exact]`; a failed fit is NaN.
#[wasm_bindgen]
pub fn zne_demo(theta: &[f64], depol_1q: f64, depol_2q: f64, shots: u32, seed: u32) -> Vec<f64> {
    let p = problem();
    let x = theta_or_default(theta);
    let run = || -> mitivqe::Result<Vec<f64>> {
        let noise = NoiseModel::uniform(4, 0.0, 0.0, depol_1q, depol_2q)?;
        let plan = MeasurementPlan::new(&p.h, shots.max(1) as u64, 0)?;
        let mut points = Vec::new();
        for s in [1usize, 3, 5] {
            let folded = fold(&p.ansatz, s)?;
            let est = estimate(&p.h, &folded, &x, &plan, Some(&noise), seed as u64 * 16 + s as u64)?;
            points.push((s as f64, est.value));
        }
        let series = ZneSeries::new(&points)?;
        let mut out: Vec<f64> = points.iter().map(|p| p.1).collect();
        for kind in [FitKind::Linear, FitKind::Quadratic, FitKind::Exponential] {
            out.push(zne_fit(&series, kind).unwrap_or(f64::NAN));
        }
        out.push(exact_expectation(&p.h, &p.ansatz, &x)?);
        Ok(out)
    };
    run().unwrap_or_else(|_| vec![f64::NAN; 7])
}

/// Readout-only noise with symmetric flip probability `eps`. Returns
/// `[unmitigated, T-REx, exact, λ(Z0), λ(Z0Z1), λ(Z0Z1Z2), λ(Z0Z1Z2Z3)]`.
#[wasm_bindgen]
pub fn trex_demo(theta: &[f64], eps: f64, shots: u32, seed: u32) -> Vec<f64> {
    let p = problem();
    let x = theta_or_default(theta);
    let run = || -> mitivqe::Result<Vec<f64>> {
        let noise = NoiseModel::readout_only(4, eps, eps)?;
        let shots = (shots.max(16) as u64 / 16) * 16;
        let plain = MeasurementPlan::new(&p.h, shots, 0)?;
        let twirled = MeasurementPlan::new(&p.h, shots, 16)?;
        let cal = trex_calibrate(4, Some(&noise), 8192, 16, seed as u64)?;
        let raw = estimate(&p.h, &p.ansatz, &x, &plain, Some(&noise), seed as u64 + 1)?;
        let mitigated = estimate_with(
            &p.h,
            &p.ansatz,
            &x,
            &twirled,
            Some(&noise),
            ReadoutMitigation::Trex(&cal),
            seed as u64 + 2,
        )?;
        let mut out = vec![raw.value, mitigated.value, exact_expectation(&p.h, &p.ansatz, &x)?];
        out.extend([0b1, 0b11, 0b111, 0b1111].map(|m| cal.lambda(m)));
        Ok(out)
    };
    run().unwrap_or_else(|_| vec![f64::NAN; 7])
}
