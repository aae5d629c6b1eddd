//! Parameterized circuits over the gate set {RY, RZ, SX, SX†, X, CNOT}.

use std::fmt;

use crate::error::{Error, Result};

/// Rotation angle: a constant, or `scale × θ[index]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Fixed(f64),
    Param { index: usize, scale: f64 },
}

impl Angle {
    pub fn param(index: usize) -> Self {
        Angle::Param { index, scale: 1.0 }
    }

    pub fn resolve(&self, values: &[f64]) -> f64 {
        match *self {
            Angle::Fixed(v) => v,
            Angle::Param { index, scale } => scale * values[index],
        }
    }

    fn negated(self) -> Self {
        match self {
            Angle::Fixed(v) => Angle::Fixed(-v),
            Angle::Param { index, scale } => Angle::Param {
                index,
                scale: -scale,
            },
        }
    }
}

/// Rotations use the half-angle convention, `R_P(θ) = exp(-iθP/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Ry { qubit: usize, angle: Angle },
    Rz { qubit: usize, angle: Angle },
    Sx { qubit: usize },
    SxDg { qubit: usize },
    X { qubit: usize },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::Ry { qubit, .. }
            | Gate::Rz { qubit, .. }
            | Gate::Sx { qubit }
            | Gate::SxDg { qubit }
            | Gate::X { qubit } => (qubit, None),
            Gate::Cnot { control, target } => (control, Some(target)),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Ry { qubit, angle } => Gate::Ry {
                qubit,
                angle: angle.negated(),
            },
            Gate::Rz { qubit, angle } => Gate::Rz {
                qubit,
                angle: angle.negated(),
            },
            Gate::Sx { qubit } => Gate::SxDg { qubit },
            Gate::SxDg { qubit } => Gate::Sx { qubit },
            g @ (Gate::X { .. } | Gate::Cnot { .. }) => g,
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Angle::Fixed(v) => write!(f, "{v}"),
            Angle::Param { index, scale } if scale == 1.0 => write!(f, "theta[{index}]"),
            Angle::Param { index, scale } => write!(f, "{scale}*theta[{index}]"),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Ry { qubit, angle } => write!(f, "ry q{qubit} {angle}"),
            Gate::Rz { qubit, angle } => write!(f, "rz q{qubit} {angle}"),
            Gate::Sx { qubit } => write!(f, "sx q{qubit}"),
            Gate::SxDg { qubit } => write!(f, "sxdg q{qubit}"),
            Gate::X { qubit } => write!(f, "x q{qubit}"),
            Gate::Cnot { control, target } => write!(f, "cx q{control} q{target}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    parameters: Vec<String>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
            parameters: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn parameters(&self) -> &[String] {
        &self.parameters
    }

    pub fn n_parameters(&self) -> usize {
        self.parameters.len()
    }

    pub fn add_parameter(&mut self, name: impl Into<String>) -> usize {
        self.parameters.push(name.into());
        self.parameters.len() - 1
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let (a, b) = gate.qubits();
        if a >= self.n_qubits || b.is_some_and(|b| b >= self.n_qubits) {
            return Err(Error::Argument(format!(
                "gate '{gate}' addresses a qubit outside 0..{}",
                self.n_qubits
            )));
        }
        if b == Some(a) {
            return Err(Error::Argument(format!("gate '{gate}' needs two distinct qubits")));
        }
        if let Gate::Ry { angle, .. } | Gate::Rz { angle, .. } = gate {
            if let Angle::Param { index, .. } = angle {
                if index >= self.parameters.len() {
                    return Err(Error::Argument(format!(
                        "gate '{gate}' references undeclared parameter {index}"
                    )));
                }
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn ry(&mut self, qubit: usize, angle: Angle) -> Result<()> {
        self.push(Gate::Ry { qubit, angle })
    }

    pub fn rz(&mut self, qubit: usize, angle: Angle) -> Result<()> {
        self.push(Gate::Rz { qubit, angle })
    }

    pub fn sx(&mut self, qubit: usize) -> Result<()> {
        self.push(Gate::Sx { qubit })
    }

    pub fn x(&mut self, qubit: usize) -> Result<()> {
        self.push(Gate::X { qubit })
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.push(Gate::Cnot { control, target })
    }

    /// Append all gates of `other`, which must act on the same register and
    /// use a parameter list that is a prefix of ours (or none at all).
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        if other.parameters.len() > self.parameters.len()
            || other.parameters[..] != self.parameters[..other.parameters.len()]
        {
            return Err(Error::Argument("appended circuit declares different parameters".into()));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            parameters: self.parameters.clone(),
        }
    }

    pub fn check_binding(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.parameters.len() {
            return Err(Error::Binding(format!(
                "circuit declares {} parameters, {} values supplied",
                self.parameters.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Binding(format!("parameter {} is not finite", self.parameters[i])));
        }
        Ok(())
    }

    pub fn count_two_qubit(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }
}

/// Global unitary folding: `C (C† C)^((scale-1)/2)`.
pub fn fold(c: &Circuit, scale: usize) -> Result<Circuit> {
    if scale == 0 || scale % 2 == 0 {
        return Err(Error::Argument(format!(
            "fold scale must be an odd positive integer, got {scale}"
        )));
    }
    let inverse = c.inverse();
    let mut out = c.clone();
    for _ in 0..(scale - 1) / 2 {
        out.gates.extend_from_slice(&inverse.gates);
        out.gates.extend_from_slice(&c.gates);
    }
    Ok(out)
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# qubits {}", self.n_qubits)?;
        writeln!(f, "# parameters {}", self.parameters.join(" "))?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}
