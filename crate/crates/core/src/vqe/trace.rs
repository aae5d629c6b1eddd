//! Per-evaluation VQE traces and their noiseless re-evaluation.

use std::fmt::Write as _;
use std::path::Path;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::estimator::exact_expectation;
use crate::pauli::PauliSum;
use crate::spsa::EvalKind;

#[derive(Debug, Clone, PartialEq)]
pub struct VqeRecord {
    pub index: usize,
    pub kind: EvalKind,
    pub iteration: usize,
    /// The optimizer iterate when this evaluation was made.
    pub theta: Vec<f64>,
    pub energy: f64,
    pub variance: f64,
    pub shots: u64,
    /// Not persisted in trace files.
    pub circuits: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VqeTrace {
    pub records: Vec<VqeRecord>,
}

impl VqeTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn final_record(&self) -> Option<&VqeRecord> {
        self.records.iter().rev().find(|r| r.kind == EvalKind::Final)
    }

    pub fn final_theta(&self) -> Option<&[f64]> {
        self.final_record().map(|r| r.theta.as_slice())
    }

    pub fn final_energy(&self) -> Option<f64> {
        self.final_record().map(|r| r.energy)
    }

    pub fn total_shots(&self) -> u64 {
        self.records.iter().map(|r| r.shots).sum()
    }

    pub fn to_csv(&self) -> String {
        let p = self.records.first().map_or(0, |r| r.theta.len());
        let mut out = String::from("index,kind,iteration,energy,variance,shots");
        for i in 0..p {
            let _ = write!(out, ",theta_{i}");
        }
        out.push('\n');
        for r in &self.records {
            let _ = write!(
                out,
                "{},{},{},{},{},{}",
                r.index,
                r.kind.name(),
                r.iteration,
                r.energy,
                r.variance,
                r.shots
            );
            for t in &r.theta {
                let _ = write!(out, ",{t}");
            }
            out.push('\n');
        }
        out
    }

    /// Lines starting with `#` are skipped.
    pub fn parse_csv(text: &str, path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header_line = text.lines().position(|l| !l.trim_start().starts_with('#')).map_or(1, |i| i + 1);
        let headers = reader
            .headers()
            .map_err(|e| Error::parse(path, header_line, e.to_string()))?
            .clone();
        let fixed = ["index", "kind", "iteration", "energy", "variance", "shots"];
        if headers.len() < fixed.len() || headers.iter().zip(fixed).any(|(h, f)| h != f) {
            return Err(Error::parse(
                path,
                header_line,
                format!("expected header starting with {}", fixed.join(",")),
            ));
        }
        for (i, h) in headers.iter().skip(fixed.len()).enumerate() {
            if h != format!("theta_{i}") {
                return Err(Error::parse(path, header_line, format!("expected column theta_{i}, found '{h}'")));
            }
        }

        let mut records = Vec::new();
        for row in reader.records() {
            let row = row.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                Error::parse(path, line, e.to_string())
            })?;
            let line = row.position().map_or(0, |p| p.line() as usize);
            let err = |msg: String| Error::parse(path, line, msg);
            let field = |i: usize| row.get(i).unwrap_or("");
            let int = |i: usize| {
                field(i)
                    .parse::<u64>()
                    .map_err(|_| err(format!("column {} is not an integer: '{}'", fixed[i], field(i))))
            };
            let real = |i: usize, name: &str| {
                field(i)
                    .parse::<f64>()
                    .map_err(|_| err(format!("column {name} is not a number: '{}'", field(i))))
            };
            let kind = EvalKind::parse(field(1)).ok_or_else(|| err(format!("unknown record kind '{}'", field(1))))?;
            let theta = (fixed.len()..headers.len())
                .map(|i| real(i, &headers[i]))
                .collect::<Result<Vec<f64>>>()?;
            if theta.iter().any(|t| !t.is_finite()) {
                return Err(err("theta entries must be finite".into()));
            }
            records.push(VqeRecord {
                index: int(0)? as usize,
                kind,
                iteration: int(2)? as usize,
                theta,
                energy: real(3, "energy")?,
                variance: real(4, "variance")?,
                shots: int(5)?,
                circuits: 0,
            });
        }
        Ok(VqeTrace { records })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        VqeTrace::parse_csv(&text, path)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvaluation {
    /// `(iteration, exact energy)`, one entry per distinct iteration in
    /// trace order, taken at the first record of that iteration.
    pub series: Vec<(usize, f64)>,
    pub minimum: Option<(usize, f64)>,
    /// Mean over the last `ceil(len/10)` entries.
    pub last_tenth_mean: Option<f64>,
}

impl TraceEvaluation {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,exact_energy\n");
        for (k, e) in &self.series {
            let _ = writeln!(out, "{k},{e}");
        }
        out
    }
}

/// Exact energies of every iterate in a trace.
pub fn reevaluate_trace(trace: &VqeTrace, h: &PauliSum, ansatz: &Circuit) -> Result<TraceEvaluation> {
    let p = ansatz.n_parameters();
    let mut series: Vec<(usize, f64)> = Vec::new();
    for r in &trace.records {
        if r.theta.len() != p {
            return Err(Error::Trace(format!(
                "record {} has {} parameters but the ansatz takes {p}",
                r.index,
                r.theta.len()
            )));
        }
        if series.last().is_some_and(|&(k, _)| k == r.iteration) {
            continue;
        }
        series.push((r.iteration, exact_expectation(h, ansatz, &r.theta)?));
    }
    let minimum = series.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1));
    let tail = series.len().div_ceil(10);
    let last_tenth_mean = (tail > 0).then(|| series[series.len() - tail..].iter().map(|e| e.1).sum::<f64>() / tail as f64);
    Ok(TraceEvaluation {
        series,
        minimum,
        last_tenth_mean,
    })
}
