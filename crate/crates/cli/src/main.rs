use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mitivqe::circuit::fold;
use mitivqe::estimator::{estimate_with, exact_expectation, MeasurementPlan, ReadoutMitigation};
use mitivqe::fermion::{qubit_hamiltonian, read_integral_file, Encoding, ParticleSector};
use mitivqe::mitigation::{
    rem_calibrate, trex_calibrate, write_zne_table, zne_fit, FitKind, ZneSeries, DEFAULT_CALIBRATION_CIRCUITS,
    DEFAULT_CALIBRATION_SHOTS,
};
use mitivqe::pauli::write_qubit_hamiltonian;
use mitivqe::seed::derive_seed;
use mitivqe::vqe::{reevaluate_trace, run_campaign, MitigationSpec, NoiseSpec, Problem, RunConfig, VqeTrace};
use mitivqe::{Error, ErrorCategory, Result};

#[derive(Parser)]
#[command(name = "mitivqe", version, about = "VQE campaigns with readout mitigation and zero-noise extrapolation")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map an integral file to a qubit Hamiltonian.
    Map {
        #[arg(long)]
        integrals: PathBuf,
        /// jw or parity.
        #[arg(long, default_value = "parity")]
        mapping: String,
        /// Remove the two parity qubits fixed by the spin sector.
        #[arg(long)]
        taper: bool,
        /// Spin-up and spin-down electron counts (defaults to the file's nelec).
        #[arg(long, num_args = 2, value_names = ["ALPHA", "BETA"])]
        sector: Option<Vec<usize>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a VQE campaign and write one trace per run plus a summary.
    Vqe {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the energy at one parameter vector.
    Estimate {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        theta: ThetaArgs,
    },
    /// Fold the ansatz, estimate at each scale and extrapolate to zero noise.
    Zne {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        theta: ThetaArgs,
        #[arg(long, value_delimiter = ',', default_value = "1,3,5")]
        scales: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "linear,quadratic,exponential")]
        fits: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact energies of every iterate in a trace file.
    TraceEval {
        /// Supplies the Hamiltonian and the ansatz.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare unmitigated, confusion-matrix and T-REx estimates at one point.
    RemStudy {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        theta: ThetaArgs,
        #[arg(long, default_value_t = 8192)]
        shots_per_state: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides MITIVQE_SEED and the config seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    eps0: Option<f64>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    depol_1q: Option<f64>,
    #[arg(long)]
    depol_2q: Option<f64>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ThetaArgs {
    /// Trace file; its final record (or last record) supplies θ.
    #[arg(long)]
    theta: Option<PathBuf>,
    /// Comma-separated parameter values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Option<Vec<f64>>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Ok(v) = std::env::var("MITIVQE_SEED") {
            cfg.seed = v
                .trim()
                .parse()
                .map_err(|_| Error::Argument(format!("MITIVQE_SEED is not an integer: '{v}'")))?;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(s) = self.shots {
            cfg.shots_per_group = s;
        }
        let rates = [self.eps0, self.eps1, self.depol_1q, self.depol_2q];
        if rates.iter().any(Option::is_some) {
            let n = cfg.noise.get_or_insert_with(NoiseSpec::default);
            n.eps0 = self.eps0.unwrap_or(n.eps0);
            n.eps1 = self.eps1.unwrap_or(n.eps1);
            n.depol_1q = self.depol_1q.unwrap_or(n.depol_1q);
            n.depol_2q = self.depol_2q.unwrap_or(n.depol_2q);
        }
        Ok(cfg)
    }
}

impl ThetaArgs {
    fn resolve(&self, expected: usize) -> Result<Vec<f64>> {
        let theta = match (&self.theta, &self.params) {
            (Some(path), _) => {
                let trace = VqeTrace::read(path)?;
                trace
                    .final_theta()
                    .or(trace.records.last().map(|r| r.theta.as_slice()))
                    .ok_or_else(|| Error::Trace(format!("{} has no records", path.display())))?
                    .to_vec()
            }
            (None, Some(v)) => v.clone(),
            (None, None) => unreachable!("clap requires one of --theta and --params"),
        };
        if theta.len() != expected {
            return Err(Error::Trace(format!(
                "got {} parameters but the ansatz takes {expected}",
                theta.len()
            )));
        }
        Ok(theta)
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn map(
    integrals: &Path,
    mapping: &str,
    taper: bool,
    sector: Option<&[usize]>,
    out: &Path,
) -> Result<()> {
    let encoding: Encoding = mapping.parse()?;
    let file = read_integral_file(integrals)?;
    let sector = sector.map(|s| ParticleSector::new(s[0], s[1]));
    let h = qubit_hamiltonian(&file, encoding, taper, sector)?;
    write_file(out, &write_qubit_hamiltonian(&h))?;
    println!("qubits {}", h.n_qubits());
    println!("terms {}", h.len());
    Ok(())
}

fn vqe(run: &RunArgs, repeats: Option<usize>, iterations: Option<usize>, out: &Path) -> Result<()> {
    let mut cfg = run.load()?;
    if let Some(r) = repeats {
        cfg.n_repeats = r;
    }
    if let Some(k) = iterations {
        cfg.spsa.max_iterations = k;
    }
    let problem = Problem::from_config(&cfg)?;
    let result = run_campaign(&problem)?;
    result.write(out)?;
    print!("{}", result.summary.to_text());
    for r in result.runs.iter().filter(|r| r.trace.is_err()) {
        if let Err(e) = &r.trace {
            eprintln!("run {} failed: {e}", r.run);
        }
    }
    Ok(())
}

fn estimate(run: &RunArgs, theta: &ThetaArgs) -> Result<()> {
    let cfg = run.load()?;
    let p = Problem::from_config(&cfg)?;
    let x = theta.resolve(p.ansatz.n_parameters())?;
    let n = p.h.n_qubits();
    let noise = p.noise.as_ref();
    let cal_seed = derive_seed(p.seed, &[1]);
    let (trex, rem) = match p.mitigation {
        MitigationSpec::None => (None, None),
        MitigationSpec::Trex { circuits, shots, .. } => (Some(trex_calibrate(n, noise, shots, circuits, cal_seed)?), None),
        MitigationSpec::Rem { shots_per_state } => (None, Some(rem_calibrate(n, noise, shots_per_state, cal_seed)?)),
    };
    let mitigation = match (&trex, &rem) {
        (Some(c), _) => ReadoutMitigation::Trex(c),
        (_, Some(a)) => ReadoutMitigation::Rem(a),
        _ => ReadoutMitigation::None,
    };
    let est = estimate_with(&p.h, &p.ansatz, &x, &p.plan, noise, mitigation, p.seed)?;
    println!("energy {}", est.value);
    println!("std_error {}", est.std_error());
    println!("shots {}", est.shots_used);
    println!("circuits {}", est.circuits_executed);
    println!("exact {}", exact_expectation(&p.h, &p.ansatz, &x)?);
    Ok(())
}

fn zne(run: &RunArgs, theta: &ThetaArgs, scales: &[usize], fits: &[String], out: Option<&Path>) -> Result<()> {
    let cfg = run.load()?;
    let p = Problem::from_config(&cfg)?;
    let x = theta.resolve(p.ansatz.n_parameters())?;
    let kinds = fits.iter().map(|f| f.parse()).collect::<Result<Vec<FitKind>>>()?;
    if scales.iter().any(|&s| s == 0 || s % 2 == 0) {
        return Err(Error::Argument(format!("fold scales must be odd, got {scales:?}")));
    }
    if let Some(k) = kinds.iter().find(|k| scales.len() < k.min_points()) {
        return Err(Error::Argument(format!(
            "{k} extrapolation needs at least {} scales, got {}",
            k.min_points(),
            scales.len()
        )));
    }
    let mut points = Vec::with_capacity(scales.len());
    for &s in scales {
        let folded = fold(&p.ansatz, s)?;
        let est = estimate_with(
            &p.h,
            &folded,
            &x,
            &p.plan,
            p.noise.as_ref(),
            ReadoutMitigation::None,
            derive_seed(p.seed, &[s as u64]),
        )?;
        points.push((s as f64, est.value, est.variance));
    }
    let series = ZneSeries::with_variances(&points)?;
    let results: Vec<(FitKind, Result<f64>)> = kinds.iter().map(|&k| (k, zne_fit(&series, k))).collect();
    emit(out, &write_zne_table(&series, &results))?;
    for (k, r) in &results {
        match r {
            Ok(v) => eprintln!("{k}: {v}"),
            Err(e) => eprintln!("{k}: {e}"),
        }
    }
    if results.iter().all(|(_, r)| r.is_err()) {
        let (_, last) = results.into_iter().last().expect("at least one fit kind");
        return last.map(|_| ());
    }
    Ok(())
}

fn trace_eval(config: &Path, trace: &Path, out: Option<&Path>) -> Result<()> {
    let cfg = RunConfig::load(config)?;
    let p = Problem::from_config(&cfg)?;
    let trace = VqeTrace::read(trace)?;
    let ev = reevaluate_trace(&trace, &p.h, &p.ansatz)?;
    emit(out, &ev.to_csv())?;
    let mut report = String::new();
    if let Some((k, e)) = ev.series.last() {
        let _ = writeln!(report, "final iteration {k} energy {e:.5}");
    }
    if let Some((k, e)) = ev.minimum {
        let _ = writeln!(report, "minimum {e:.5} at iteration {k}");
    }
    if let Some(m) = ev.last_tenth_mean {
        let _ = writeln!(report, "last-10% mean {m:.5}");
    }
    eprint!("{report}");
    Ok(())
}

fn rem_study(run: &RunArgs, theta: &ThetaArgs, shots_per_state: u64, out: Option<&Path>) -> Result<()> {
    let mut cfg = run.load()?;
    if cfg.twirls_per_group == 0 {
        cfg.twirls_per_group = DEFAULT_CALIBRATION_CIRCUITS as u64;
    }
    let p = Problem::from_config(&cfg)?;
    let x = theta.resolve(p.ansatz.n_parameters())?;
    let n = p.h.n_qubits();
    let noise = p.noise.as_ref();
    let exact = exact_expectation(&p.h, &p.ansatz, &x)?;
    let rem = rem_calibrate(n, noise, shots_per_state, derive_seed(p.seed, &[1]))?;
    let trex = trex_calibrate(
        n,
        noise,
        DEFAULT_CALIBRATION_SHOTS,
        DEFAULT_CALIBRATION_CIRCUITS,
        derive_seed(p.seed, &[2]),
    )?;
    let plain = MeasurementPlan::new(&p.h, cfg.shots_per_group, 0)?;
    let rows: [(&str, &MeasurementPlan, ReadoutMitigation<'_>); 3] = [
        ("none", &plain, ReadoutMitigation::None),
        ("rem", &plain, ReadoutMitigation::Rem(&rem)),
        ("trex", &p.plan, ReadoutMitigation::Trex(&trex)),
    ];
    let mut text = String::from("method,energy,std_error,abs_error,exact\n");
    for (name, plan, m) in rows {
        let est = estimate_with(&p.h, &p.ansatz, &x, plan, noise, m, p.seed)?;
        let _ = writeln!(
            text,
            "{name},{},{},{},{exact}",
            est.value,
            est.std_error(),
            (est.value - exact).abs()
        );
    }
    eprintln!("confusion matrix condition number {}", rem.condition_number());
    emit(out, &text)
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Map {
            integrals,
            mapping,
            taper,
            sector,
            out,
        } => map(integrals, mapping, *taper, sector.as_deref(), out),
        Command::Vqe {
            run,
            repeats,
            iterations,
            out,
        } => vqe(run, *repeats, *iterations, out),
        Command::Estimate { run, theta } => estimate(run, theta),
        Command::Zne {
            run,
            theta,
            scales,
            fits,
            out,
        } => zne(run, theta, scales, fits, out.as_deref()),
        Command::TraceEval { config, trace, out } => trace_eval(config, trace, out.as_deref()),
        Command::RemStudy {
            run,
            theta,
            shots_per_state,
            out,
        } => rem_study(run, theta, *shots_per_state, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.category() {
                ErrorCategory::Usage => 2,
                ErrorCategory::Data => 3,
                ErrorCategory::Numerical => 4,
            })
        }
    }
}
