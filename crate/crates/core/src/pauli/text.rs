//! Line-oriented qubit-Hamiltonian files.
//!
//! ```text
//! # qubits 2
//! constant -1.05
//! 0.39 0.0 ZI
//! 0.18 0.0 XX
//! ```
//!
//! Each term line is `<real> <imag> <paulis>` with qubit 0 leftmost. The
//! `# qubits` comment is only consulted when the file has no term lines.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::{PauliString, PauliSum};
use crate::error::{Error, Result};

pub fn parse_qubit_hamiltonian(text: &str, path: &Path) -> Result<PauliSum> {
    let mut constant = 0.0;
    let mut declared: Option<usize> = None;
    let mut terms: Vec<(Complex64, PauliString)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let mut it = comment.split_whitespace();
            if it.next() == Some("qubits") {
                if let Some(Ok(n)) = it.next().map(str::parse::<usize>) {
                    declared = Some(n);
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let number = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::parse(path, line_no, format!("expected a number, found '{s}'")))
        };
        match fields.as_slice() {
            ["constant", value] => constant += number(value)?,
            [re, im, label] => {
                let p: PauliString = label
                    .parse()
                    .map_err(|e: Error| Error::parse(path, line_no, e.to_string()))?;
                terms.push((Complex64::new(number(re)?, number(im)?), p));
            }
            _ => {
                return Err(Error::parse(
                    path,
                    line_no,
                    "expected '<real> <imag> <paulis>' or 'constant <real>'",
                ))
            }
        }
    }

    let n = match terms.first() {
        Some((_, p)) => p.n_qubits(),
        None => declared.unwrap_or(0),
    };
    let mut h = PauliSum::zero(n);
    for (c, p) in terms {
        if p.n_qubits() != n {
            return Err(Error::Data(format!(
                "{}: term {p} has {} qubits, expected {n}",
                path.display(),
                p.n_qubits()
            )));
        }
        h.add_term(c, p)?;
    }
    if constant != 0.0 {
        h.add_term(Complex64::new(constant, 0.0), PauliString::identity(n))?;
    }
    h.prune();
    Ok(h)
}

pub fn read_qubit_hamiltonian(path: &Path) -> Result<PauliSum> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_qubit_hamiltonian(&text, path)
}

/// Render in the text format. Full `f64` precision is kept so the file
/// round-trips exactly.
pub fn write_qubit_hamiltonian(h: &PauliSum) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# qubits {}", h.n_qubits());
    let _ = writeln!(out, "# terms {}", h.len());
    let constant = h.constant();
    if constant != 0.0 {
        let _ = writeln!(out, "constant {constant:e}");
    }
    for (p, c) in h.terms() {
        if p.is_identity() {
            continue;
        }
        let _ = writeln!(out, "{:e} {:e} {p}", c.re, c.im);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_terms_and_constant() {
        let text = "# demo\nconstant -1.5\n0.25 0 ZI\n0.5 0.0 XX\n";
        let h = parse_qubit_hamiltonian(text, Path::new("h.txt")).unwrap();
        assert_eq!(h.n_qubits(), 2);
        assert_eq!(h.constant(), -1.5);
        assert_eq!(h.coefficient(&"XX".parse().unwrap()).re, 0.5);
    }

    #[test]
    fn reports_line_numbers() {
        let text = "0.1 0 ZZ\n0.1 zero XX\n";
        match parse_qubit_hamiltonian(text, Path::new("bad.txt")) {
            Err(Error::Parse { line, path, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(path, Path::new("bad.txt"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scalar_only_file_keeps_declared_width() {
        let h = PauliSum::identity(0, -0.75);
        let text = write_qubit_hamiltonian(&h);
        let back = parse_qubit_hamiltonian(&text, Path::new("s")).unwrap();
        assert_eq!(back.n_qubits(), 0);
        assert_eq!(back.constant(), -0.75);
    }

    #[test]
    fn round_trip_is_exact() {
        let h = PauliSum::from_labels(&[(0.1 + 0.2, "XY"), (-1.0 / 3.0, "ZI"), (7.25, "II")]).unwrap();
        let back = parse_qubit_hamiltonian(&write_qubit_hamiltonian(&h), Path::new("r")).unwrap();
        for (p, c) in h.terms() {
            assert_eq!(back.coefficient(p), *c);
        }
        assert_eq!(back.len(), h.len());
    }
}
