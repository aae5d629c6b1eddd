//! Fermionic integral files.
//!
//! ```text
//! norb 4
//! nelec 1 1
//! core 0.7137
//! convention physicist
//! h 0 0 -1.2525
//! g 0 2 2 0 0.3372
//! ```
//!
//! `norb` counts spin orbitals (block ordering, spin-up first). `g p q r s v`
//! is the coefficient of `a†_p a†_q a_r a_s`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{FermionicOperator, ParticleSector};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct IntegralFile {
    pub operator: FermionicOperator,
    pub sector: Option<ParticleSector>,
}

enum Entry {
    One(usize, usize, f64),
    Two([usize; 4], f64),
}

pub fn parse_integral_file(text: &str, path: &Path) -> Result<IntegralFile> {
    let mut norb: Option<usize> = None;
    let mut sector = None;
    let mut core = None;
    let mut convention = None;
    let mut entries: Vec<(usize, Entry)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let err = |msg: String| Error::parse(path, line_no, msg);
        let int = |s: &str| s.parse::<usize>().map_err(|_| err(format!("expected an index, found '{s}'")));
        let real = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("expected a finite number, found '{s}'")))
        };
        match fields.as_slice() {
            ["norb", n] => norb = Some(int(n)?),
            ["nelec", a, b] => sector = Some(ParticleSector::new(int(a)?, int(b)?)),
            ["core", v] => core = Some(real(v)?),
            ["convention", c] => {
                if *c != "physicist" {
                    return Err(err(format!("unsupported integral convention '{c}'")));
                }
                convention = Some(());
            }
            ["h", p, q, v] => entries.push((line_no, Entry::One(int(p)?, int(q)?, real(v)?))),
            ["g", p, q, r, s, v] => entries.push((
                line_no,
                Entry::Two([int(p)?, int(q)?, int(r)?, int(s)?], real(v)?),
            )),
            _ => return Err(err(format!("unrecognised line '{line}'"))),
        }
    }

    let missing = |name: &str| Error::parse(path, 0, format!("missing '{name}' header"));
    let n = norb.ok_or_else(|| missing("norb"))?;
    if n == 0 {
        return Err(Error::parse(path, 0, "norb must be positive"));
    }
    convention.ok_or_else(|| missing("convention"))?;

    let mut op = FermionicOperator::zeros(n);
    op.set_core_energy(core.unwrap_or(0.0));
    for (line_no, entry) in entries {
        match entry {
            Entry::One(p, q, v) => {
                if p >= n || q >= n {
                    return Err(Error::parse(path, line_no, format!("index out of range for norb {n}")));
                }
                op.set_one_body(p, q, v);
            }
            Entry::Two([p, q, r, s], v) => {
                if [p, q, r, s].iter().any(|&k| k >= n) {
                    return Err(Error::parse(path, line_no, format!("index out of range for norb {n}")));
                }
                op.set_two_body(p, q, r, s, v);
            }
        }
    }
    op.validate().map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    if let Some(s) = sector {
        if s.total() > n {
            return Err(Error::Data(format!(
                "{}: {} electrons do not fit {n} spin orbitals",
                path.display(),
                s.total()
            )));
        }
    }
    Ok(IntegralFile {
        operator: op,
        sector,
    })
}

pub fn read_integral_file(path: &Path) -> Result<IntegralFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(PathBuf::from(path), e))?;
    parse_integral_file(&text, path)
}

pub fn write_integral_file(file: &IntegralFile) -> String {
    let op = &file.operator;
    let n = op.n_modes();
    let mut out = String::new();
    let _ = writeln!(out, "norb {n}");
    if let Some(s) = file.sector {
        let _ = writeln!(out, "nelec {} {}", s.n_alpha, s.n_beta);
    }
    let _ = writeln!(out, "core {:e}", op.core_energy());
    let _ = writeln!(out, "convention physicist");
    for p in 0..n {
        for q in 0..n {
            let v = op.one_body(p, q);
            if v != 0.0 {
                let _ = writeln!(out, "h {p} {q} {v:e}");
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = op.two_body(p, q, r, s);
                    if v != 0.0 {
                        let _ = writeln!(out, "g {p} {q} {r} {s} {v:e}");
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_file() {
        let text = "norb 1\nconvention physicist\ncore 0.5\nh 0 0 1.0\n";
        let f = parse_integral_file(text, Path::new("one.int")).unwrap();
        assert_eq!(f.operator.n_modes(), 1);
        assert_eq!(f.operator.one_body(0, 0), 1.0);
        assert_eq!(f.operator.core_energy(), 0.5);
        assert!(f.sector.is_none());
    }

    #[test]
    fn missing_norb_is_named() {
        let text = "convention physicist\nh 0 0 1.0\n";
        let e = parse_integral_file(text, Path::new("x.int")).unwrap_err();
        assert!(e.to_string().contains("norb"), "{e}");
    }

    #[test]
    fn bad_index_reports_line() {
        let text = "norb 2\nconvention physicist\n\nh 0 5 1.0\n";
        match parse_integral_file(text, Path::new("x.int")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn other_conventions_are_refused() {
        let text = "norb 2\nconvention chemist\n";
        assert!(parse_integral_file(text, Path::new("x.int")).is_err());
    }

    #[test]
    fn write_then_parse_preserves_tensors() {
        let op = crate::fermion::random_operator(4, 5, true);
        let file = IntegralFile {
            operator: op.clone(),
            sector: Some(ParticleSector::new(1, 1)),
        };
        let back = parse_integral_file(&write_integral_file(&file), Path::new("rt")).unwrap();
        assert_eq!(back.operator, op);
        assert_eq!(back.sector, Some(ParticleSector::new(1, 1)));
    }
}
