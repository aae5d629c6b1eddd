//! VQE campaigns: repeated SPSA runs over the shot-based energy estimator.

mod config;
mod trace;

pub use config::{AnsatzChoice, HamiltonianSource, MitigationSpec, NoiseSpec, RunConfig};
pub use trace::{reevaluate_trace, TraceEvaluation, VqeRecord, VqeTrace};

use std::fmt::Write as _;
use std::path::Path;

use crate::ansatz::{hartree_fock_bits, AnsatzSpec, UccsdMapping};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::estimator::{estimate_with, exact_expectation, MeasurementPlan, ReadoutMitigation};
use crate::fermion::{qubit_hamiltonian, read_integral_file, Encoding, ParticleSector};
use crate::mitigation::{rem_calibrate, trex_calibrate, ConfusionMatrix, TrexCalibration, REM_QUBIT_LIMIT};
use crate::pauli::{min_eigenvalue, read_qubit_hamiltonian, PauliSum, DENSE_QUBIT_LIMIT};
use crate::seed::{derive_seed, rng_from};
use crate::sim::NoiseModel;
use crate::spsa::{self, random_initial_point, SpsaConfig};

/// Width of the |ΔE| histogram buckets, in hartree.
pub const HISTOGRAM_STEP: f64 = 0.05;
/// Deviations at or above this land in the last bucket.
pub const HISTOGRAM_CLAMP: f64 = 1.0;
pub const BEST_K: usize = 5;

/// A loaded Hamiltonian plus what is known about its fermionic origin.
#[derive(Debug, Clone)]
pub struct LoadedHamiltonian {
    pub h: PauliSum,
    /// Spin orbitals, sector and UCCSD mapping when loaded from integrals.
    pub origin: Option<(usize, ParticleSector, UccsdMapping)>,
}

pub fn load_hamiltonian(source: &HamiltonianSource) -> Result<LoadedHamiltonian> {
    match source {
        HamiltonianSource::Qubit { path } => Ok(LoadedHamiltonian {
            h: read_qubit_hamiltonian(path)?,
            origin: None,
        }),
        HamiltonianSource::Integrals {
            path,
            encoding,
            taper,
            sector,
        } => {
            let file = read_integral_file(path)?;
            let h = qubit_hamiltonian(&file, *encoding, *taper, *sector)?;
            let mapping = match (encoding, taper) {
                (Encoding::Parity, true) => Some(UccsdMapping::ParityTapered),
                (Encoding::JordanWigner, false) => Some(UccsdMapping::JordanWigner),
                _ => None,
            };
            let origin = match (sector.or(file.sector), mapping) {
                (Some(s), Some(m)) => Some((file.operator.n_modes(), s, m)),
                _ => None,
            };
            Ok(LoadedHamiltonian { h, origin })
        }
    }
}

/// Everything a campaign needs, with files loaded and circuits built.
#[derive(Debug, Clone)]
pub struct Problem {
    pub h: PauliSum,
    pub ansatz_spec: AnsatzSpec,
    pub ansatz: Circuit,
    pub plan: MeasurementPlan,
    pub noise: Option<NoiseModel>,
    pub mitigation: MitigationSpec,
    pub spsa: SpsaConfig,
    pub n_repeats: usize,
    pub seed: u64,
    /// Lowest eigenvalue, when the register is small enough to diagonalize.
    pub reference_energy: Option<f64>,
}

impl Problem {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let loaded = load_hamiltonian(&cfg.hamiltonian)?;
        Problem::new(loaded, cfg)
    }

    pub fn new(loaded: LoadedHamiltonian, cfg: &RunConfig) -> Result<Self> {
        let h = loaded.h;
        let n = h.n_qubits();
        let ansatz_spec = match cfg.ansatz {
            AnsatzChoice::EfficientSu2 { reps } => AnsatzSpec::EfficientSu2 { n_qubits: n, reps },
            AnsatzChoice::Uccsd { mapping } => {
                let (n_spin_orbitals, sector, native) = loaded.origin.ok_or_else(|| {
                    Error::Argument("UCCSD needs an integral-file Hamiltonian with a particle sector".into())
                })?;
                AnsatzSpec::Uccsd {
                    n_spin_orbitals,
                    sector,
                    mapping: mapping.unwrap_or(native),
                }
            }
        };
        if ansatz_spec.n_qubits() != n {
            return Err(Error::Dimension {
                expected: n,
                found: ansatz_spec.n_qubits(),
            });
        }
        let ansatz = ansatz_spec.build()?;
        let plan = MeasurementPlan::new(&h, cfg.shots_per_group, cfg.twirls_per_group)?;
        let noise = cfg
            .noise
            .map(|s| NoiseModel::uniform(n, s.eps0, s.eps1, s.depol_1q, s.depol_2q))
            .transpose()?;
        if matches!(cfg.mitigation, MitigationSpec::Rem { .. }) && n > REM_QUBIT_LIMIT {
            return Err(Error::Resource(format!(
                "confusion-matrix mitigation is limited to {REM_QUBIT_LIMIT} qubits, got {n}"
            )));
        }
        cfg.spsa.validate()?;
        if cfg.n_repeats == 0 {
            return Err(Error::Argument("a campaign needs at least one run".into()));
        }
        let reference_energy = if n <= DENSE_QUBIT_LIMIT { Some(min_eigenvalue(&h)?) } else { None };
        Ok(Problem {
            h,
            ansatz_spec,
            ansatz,
            plan,
            noise,
            mitigation: cfg.mitigation,
            spsa: cfg.spsa,
            n_repeats: cfg.n_repeats,
            seed: cfg.seed,
            reference_energy,
        })
    }

    /// Energy of the Hartree–Fock determinant, for fermionic problems.
    pub fn hartree_fock_energy(&self) -> Result<Option<f64>> {
        let AnsatzSpec::Uccsd {
            n_spin_orbitals,
            sector,
            mapping,
        } = self.ansatz_spec
        else {
            return Ok(None);
        };
        let bits = hartree_fock_bits(n_spin_orbitals, sector, mapping)?;
        let mut c = Circuit::new(self.h.n_qubits());
        for q in (0..self.h.n_qubits()).filter(|q| (bits >> q) & 1 == 1) {
            c.x(q)?;
        }
        exact_expectation(&self.h, &c, &[]).map(Some)
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        derive_seed(self.seed, &[run as u64])
    }
}

const STREAM_INIT: u64 = 0;
const STREAM_SPSA: u64 = 1;
const STREAM_ESTIMATE: u64 = 2;
const STREAM_TREX: u64 = 3;
const STREAM_REM: u64 = 4;

/// One SPSA run. Calibration overhead is charged to the record that
/// triggered it.
pub fn run_single(problem: &Problem, run: usize) -> Result<VqeTrace> {
    let run_seed = problem.run_seed(run);
    let p = problem.ansatz.n_parameters();
    let theta0 = random_initial_point(&mut rng_from(run_seed, &[STREAM_INIT]), p);
    let spsa_cfg = SpsaConfig {
        seed: derive_seed(run_seed, &[STREAM_SPSA]),
        ..problem.spsa
    };
    let n = problem.h.n_qubits();
    let noise = problem.noise.as_ref();

    let mut rem: Option<ConfusionMatrix> = None;
    let mut pending_shots = 0u64;
    let mut pending_circuits = 0u64;
    if let MitigationSpec::Rem { shots_per_state } = problem.mitigation {
        rem = Some(rem_calibrate(n, noise, shots_per_state, derive_seed(run_seed, &[STREAM_REM]))?);
        pending_shots = shots_per_state << n;
        pending_circuits = 1 << n;
    }
    let mut trex: Option<(usize, TrexCalibration)> = None;
    let mut records: Vec<VqeRecord> = Vec::with_capacity(spsa_cfg.total_evaluations());

    let cost = |x: &[f64], ctx: spsa::EvalContext<'_>| -> Result<f64> {
        let (mut shots, mut circuits) = (std::mem::take(&mut pending_shots), std::mem::take(&mut pending_circuits));
        if let MitigationSpec::Trex {
            circuits: cal_circuits,
            shots: cal_shots,
            calibrate_every,
        } = problem.mitigation
        {
            let epoch = if ctx.iteration == 0 { 0 } else { (ctx.iteration - 1) / calibrate_every + 1 };
            if trex.as_ref().is_none_or(|(e, _)| *e != epoch) {
                let seed = derive_seed(run_seed, &[STREAM_TREX, epoch as u64]);
                trex = Some((epoch, trex_calibrate(n, noise, cal_shots, cal_circuits, seed)?));
                shots += cal_shots;
                circuits += cal_circuits as u64;
            }
        }
        let mitigation = match (&trex, &rem) {
            (Some((_, cal)), _) => ReadoutMitigation::Trex(cal),
            (_, Some(a)) => ReadoutMitigation::Rem(a),
            _ => ReadoutMitigation::None,
        };
        let seed = derive_seed(run_seed, &[STREAM_ESTIMATE, ctx.index as u64]);
        let est = estimate_with(&problem.h, &problem.ansatz, x, &problem.plan, noise, mitigation, seed)?;
        records.push(VqeRecord {
            index: ctx.index,
            kind: ctx.kind,
            iteration: ctx.iteration,
            theta: ctx.iterate.to_vec(),
            energy: est.value,
            variance: est.variance,
            shots: shots + est.shots_used,
            circuits: circuits + est.circuits_executed,
        });
        Ok(est.value)
    };
    spsa::run(cost, theta0, &spsa_cfg)?;
    Ok(VqeTrace { records })
}

#[derive(Debug)]
pub struct RunResult {
    pub run: usize,
    pub seed: u64,
    pub trace: Result<VqeTrace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub run: usize,
    pub seed: u64,
    /// Estimated energy at the final iterate.
    pub final_energy: Option<f64>,
    /// Noiseless energy at the final iterate.
    pub exact_final: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSummary {
    pub reference_energy: Option<f64>,
    pub runs: Vec<RunSummary>,
    pub successful: usize,
    pub best_k: usize,
    /// Mean and population std of the `best_k` lowest final estimates.
    pub best: Option<(f64, f64)>,
    /// The same statistic over noiseless final energies.
    pub best_exact: Option<(f64, f64)>,
    pub mean_all: Option<f64>,
    /// Run counts per |ΔE| bucket of width [`HISTOGRAM_STEP`].
    pub histogram: Vec<usize>,
}

impl CampaignSummary {
    pub fn final_energies(&self) -> Vec<f64> {
        self.runs.iter().filter_map(|r| r.final_energy).collect()
    }

    /// `|best-k mean − reference|`.
    pub fn best_delta(&self) -> Option<f64> {
        Some((self.best?.0 - self.reference_energy?).abs())
    }

    pub fn to_text(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("NaN".to_string(), |v| v.to_string());
        let mut out = String::new();
        let _ = writeln!(out, "runs = {}", self.runs.len());
        let _ = writeln!(out, "successful = {}", self.successful);
        let _ = writeln!(out, "reference_energy = {}", opt(self.reference_energy));
        let _ = writeln!(out, "best_k = {}", self.best_k);
        let _ = writeln!(out, "best_mean = {}", opt(self.best.map(|b| b.0)));
        let _ = writeln!(out, "best_std = {}", opt(self.best.map(|b| b.1)));
        let _ = writeln!(out, "best_delta = {}", opt(self.best_delta()));
        let _ = writeln!(out, "best_exact_mean = {}", opt(self.best_exact.map(|b| b.0)));
        let _ = writeln!(out, "best_exact_std = {}", opt(self.best_exact.map(|b| b.1)));
        let _ = writeln!(out, "mean_all = {}", opt(self.mean_all));
        let _ = writeln!(out, "histogram_step = {HISTOGRAM_STEP}");
        let counts: Vec<String> = self.histogram.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "histogram = {}", counts.join(","));
        out
    }

    pub fn runs_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        let mut out = String::from("run,seed,final_energy,exact_final,abs_delta,status\n");
        for r in &self.runs {
            let delta = r.final_energy.zip(self.reference_energy).map(|(e, x)| (e - x).abs());
            let status = r.error.as_deref().map_or("ok".to_string(), |e| e.replace(',', ";"));
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.run,
                r.seed,
                opt(r.final_energy),
                opt(r.exact_final),
                opt(delta),
                status
            );
        }
        out
    }
}

/// Mean and population standard deviation of the `k` lowest values.
pub fn best_k_summary(energies: &[f64], k: usize) -> Result<(f64, f64)> {
    if k == 0 || k > energies.len() {
        return Err(Error::Argument(format!(
            "cannot take the best {k} of {} energies",
            energies.len()
        )));
    }
    let mut sorted = energies.to_vec();
    sorted.sort_by(f64::total_cmp);
    let best = &sorted[..k];
    let mean = best.iter().sum::<f64>() / k as f64;
    let var = best.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / k as f64;
    Ok((mean, var.sqrt()))
}

/// Bucket `|ΔE|` values; the last bucket collects everything past the clamp.
pub fn delta_histogram(deltas: &[f64]) -> Vec<usize> {
    let n_buckets = (HISTOGRAM_CLAMP / HISTOGRAM_STEP).round() as usize;
    let mut h = vec![0; n_buckets];
    for &d in deltas {
        let b = ((d / HISTOGRAM_STEP).floor() as usize).min(n_buckets - 1);
        h[b] += 1;
    }
    h
}

pub fn summarize(problem: &Problem, results: &[RunResult]) -> Result<CampaignSummary> {
    let mut runs = Vec::with_capacity(results.len());
    for r in results {
        let mut s = RunSummary {
            run: r.run,
            seed: r.seed,
            final_energy: None,
            exact_final: None,
            error: None,
        };
        match &r.trace {
            Ok(t) => {
                s.final_energy = t.final_energy();
                if let Some(theta) = t.final_theta() {
                    s.exact_final = Some(exact_expectation(&problem.h, &problem.ansatz, theta)?);
                }
            }
            Err(e) => s.error = Some(e.to_string()),
        }
        runs.push(s);
    }
    let finals: Vec<f64> = runs.iter().filter_map(|r| r.final_energy).collect();
    let exact: Vec<f64> = runs.iter().filter_map(|r| r.exact_final).collect();
    let histogram = match problem.reference_energy {
        Some(e0) => delta_histogram(&finals.iter().map(|e| (e - e0).abs()).collect::<Vec<_>>()),
        None => Vec::new(),
    };
    Ok(CampaignSummary {
        reference_energy: problem.reference_energy,
        successful: finals.len(),
        best_k: BEST_K,
        best: best_k_summary(&finals, BEST_K).ok(),
        best_exact: best_k_summary(&exact, BEST_K).ok(),
        mean_all: (!finals.is_empty()).then(|| finals.iter().sum::<f64>() / finals.len() as f64),
        histogram,
        runs,
    })
}

#[derive(Debug)]
pub struct CampaignResult {
    pub runs: Vec<RunResult>,
    pub summary: CampaignSummary,
}

impl CampaignResult {
    /// `trace_NNN.csv` per successful run, `runs.csv` and `summary.txt`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let put = |name: String, text: String| {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| Error::io(path, e))
        };
        for r in &self.runs {
            if let Ok(t) = &r.trace {
                put(format!("trace_{:03}.csv", r.run), t.to_csv())?;
            }
        }
        put("runs.csv".into(), self.summary.runs_csv())?;
        put("summary.txt".into(), self.summary.to_text())
    }
}

/// Run every repeat (in parallel with the `parallel` feature). Individual
/// failures are kept in the result; the campaign fails only if all runs do.
pub fn run_campaign(problem: &Problem) -> Result<CampaignResult> {
    let one = |run: usize| RunResult {
        run,
        seed: problem.run_seed(run),
        trace: run_single(problem, run),
    };
    #[cfg(feature = "parallel")]
    let mut runs: Vec<RunResult> = {
        use rayon::prelude::*;
        (0..problem.n_repeats).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let mut runs: Vec<RunResult> = (0..problem.n_repeats).map(one).collect();

    if runs.iter().all(|r| r.trace.is_err()) {
        let first = runs.swap_remove(0);
        return Err(first.trace.expect_err("all runs failed"));
    }
    let summary = summarize(problem, &runs)?;
    Ok(CampaignResult { runs, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spsa::EvalKind;
    use approx::assert_abs_diff_eq;

    fn small_problem(max_iterations: usize, mitigation: MitigationSpec, noise: Option<NoiseSpec>) -> Problem {
        let h = PauliSum::from_labels(&[(0.5, "ZI"), (0.3, "IZ"), (0.2, "XX"), (-1.0, "II")]).unwrap();
        let mut cfg = RunConfig::new(HamiltonianSource::Qubit { path: "unused".into() });
        cfg.spsa.max_iterations = max_iterations;
        cfg.shots_per_group = 400;
        cfg.twirls_per_group = if matches!(mitigation, MitigationSpec::Trex { .. }) { 4 } else { 0 };
        cfg.noise = noise;
        cfg.mitigation = mitigation;
        cfg.n_repeats = 3;
        cfg.seed = 5;
        Problem::new(LoadedHamiltonian { h, origin: None }, &cfg).unwrap()
    }

    #[test]
    fn best_k_examples() {
        let (mean, _) = best_k_summary(&[-1.0, -2.0, -3.0, -4.0, -5.0, 0.0], 5).unwrap();
        assert_eq!(mean, -3.0);
        assert_eq!(best_k_summary(&[2.5; 7], 5).unwrap(), (2.5, 0.0));
        let (m, s) = best_k_summary(&[1.0, 3.0], 2).unwrap();
        assert_eq!((m, s), (2.0, 1.0));
        assert!(matches!(best_k_summary(&[1.0; 4], 5), Err(Error::Argument(_))));
        assert!(best_k_summary(&[1.0], 0).is_err());
    }

    #[test]
    fn histogram_buckets_and_clamp() {
        let h = delta_histogram(&[0.0, 0.049, 0.05, 0.12, 0.99, 3.0]);
        assert_eq!(h.len(), 20);
        assert_eq!(h[0], 2);
        assert_eq!(h[1], 1);
        assert_eq!(h[2], 1);
        assert_eq!(h[19], 2);
        assert_eq!(h.iter().sum::<usize>(), 6);
    }

    #[test]
    fn one_iteration_trace_has_53_records() {
        let p = small_problem(1, MitigationSpec::None, None);
        let t = run_single(&p, 0).unwrap();
        assert_eq!(t.len(), 50 + 2 + 1);
        let kinds: Vec<EvalKind> = t.records.iter().map(|r| r.kind).collect();
        assert!(kinds[..50].iter().all(|&k| k == EvalKind::Calibration));
        assert_eq!(&kinds[50..], &[EvalKind::GradientPlus, EvalKind::GradientMinus, EvalKind::Final]);
        assert!(t.records.iter().enumerate().all(|(i, r)| r.index == i));
        assert_eq!(t.records[52].iteration, 2);
    }

    #[test]
    fn trex_overhead_is_charged_once_per_iteration() {
        let p = small_problem(3, MitigationSpec::Trex { circuits: 4, shots: 800, calibrate_every: 1 }, None);
        let t = run_single(&p, 0).unwrap();
        let groups = p.plan.n_groups() as u64;
        for k in 1..=3 {
            let recs: Vec<&VqeRecord> = t.records.iter().filter(|r| r.iteration == k).collect();
            assert_eq!(recs.len(), 2);
            assert_eq!(recs.iter().map(|r| r.shots).sum::<u64>(), 2 * groups * 400 + 800);
            assert_eq!(recs.iter().map(|r| r.circuits).sum::<u64>(), 2 * groups * 4 + 4);
        }
        let every = small_problem(4, MitigationSpec::Trex { circuits: 4, shots: 800, calibrate_every: 2 }, None);
        let t = run_single(&every, 0).unwrap();
        let with_cal = t.records.iter().filter(|r| r.shots > groups * 400).count();
        // Calibration phase, iterations 1 and 3, final.
        assert_eq!(with_cal, 4);
    }

    #[test]
    fn campaigns_are_reproducible() {
        let p = small_problem(5, MitigationSpec::None, Some(NoiseSpec::default()));
        let a = run_campaign(&p).unwrap();
        let b = run_campaign(&p).unwrap();
        assert_eq!(a.summary, b.summary);
        let single = run_single(&p, 1).unwrap();
        assert_eq!(a.runs[1].trace.as_ref().unwrap(), &single);
        assert_ne!(a.runs[0].trace.as_ref().unwrap(), a.runs[1].trace.as_ref().unwrap());
    }

    #[test]
    fn noiseless_campaign_finds_the_ground_state() {
        let mut p = small_problem(150, MitigationSpec::None, None);
        p.plan = MeasurementPlan::new(&p.h, 20_000, 0).unwrap();
        let result = run_campaign(&p).unwrap();
        let e0 = p.reference_energy.unwrap();
        assert_abs_diff_eq!(e0, -1.0 - (0.8f64.powi(2) + 0.2f64.powi(2)).sqrt(), epsilon = 1e-12);
        let best = result.summary.best_exact;
        assert!(best.is_none(), "fewer than five runs");
        let gaps: Vec<f64> = result.summary.runs.iter().map(|r| r.exact_final.unwrap() - e0).collect();
        assert!(gaps.iter().all(|&g| (0.0..0.05).contains(&g)), "{gaps:?}");
        assert!(gaps.iter().any(|&g| g < 0.005), "{gaps:?}");
        assert_eq!(result.summary.successful, 3);
        assert_eq!(result.summary.histogram.iter().sum::<usize>(), 3);
    }

    #[test]
    fn rem_campaign_runs_and_writes_files() {
        let p = small_problem(2, MitigationSpec::Rem { shots_per_state: 1000 }, Some(NoiseSpec::default()));
        let t = run_single(&p, 0).unwrap();
        assert_eq!(t.records[0].shots, p.plan.shots_per_estimate() + 4 * 1000);
        let result = run_campaign(&p).unwrap();
        let dir = tempfile::tempdir().unwrap();
        result.write(dir.path()).unwrap();
        let back = VqeTrace::read(&dir.path().join("trace_002.csv")).unwrap();
        let orig = result.runs[2].trace.as_ref().unwrap();
        assert_eq!(back.len(), orig.len());
        assert_eq!(back.final_energy(), orig.final_energy());
        let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
        assert!(summary.contains("successful = 3"));
    }

    #[test]
    fn failing_runs_are_quarantined() {
        // λ collapses below the floor, so every mitigated estimate fails.
        let noise = NoiseSpec {
            eps0: 0.5,
            eps1: 0.5,
            depol_1q: 0.0,
            depol_2q: 0.0,
        };
        let p = small_problem(1, MitigationSpec::trex_default(), Some(noise));
        let err = run_campaign(&p).unwrap_err();
        assert!(matches!(err, Error::Amplification { .. }));

        let mut p = small_problem(1, MitigationSpec::None, None);
        p.n_repeats = 2;
        let results = vec![
            RunResult { run: 0, seed: 1, trace: run_single(&p, 0) },
            RunResult {
                run: 1,
                seed: 2,
                trace: Err(Error::Evaluation { iteration: 3, message: "NaN".into() }),
            },
        ];
        let s = summarize(&p, &results).unwrap();
        assert_eq!(s.successful, 1);
        assert!(s.runs[1].error.is_some());
        assert!(s.runs_csv().lines().nth(2).unwrap().contains("iteration 3"));
    }
}
