//! Circuit intermediate representation: CNOTs plus opaque single-qubit gates.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::gf2::BitMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("CNOT control and target are both qubit {0}")]
    SameQubit(usize),
    #[error("gate {index} ({label}) is not a CNOT")]
    NotCnot { index: usize, label: String },
    #[error("qubit count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Cnot {
        control: usize,
        target: usize,
    },
    /// Any single-qubit gate. The label is opaque to everything except the
    /// simulator.
    Single {
        label: String,
        params: Vec<f64>,
        qubit: usize,
    },
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn single(label: impl Into<String>, params: &[f64], qubit: usize) -> Self {
        Gate::Single {
            label: label.into(),
            params: params.to_vec(),
            qubit,
        }
    }

    pub fn is_cnot(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    /// Qubits touched, control first for CNOTs.
    pub fn qubits(&self) -> GateQubits {
        match *self {
            Gate::Cnot { control, target } => GateQubits::Two(control, target),
            Gate::Single { qubit, .. } => GateQubits::One(qubit),
        }
    }

    pub fn acts_on(&self, q: usize) -> bool {
        match *self {
            Gate::Cnot { control, target } => control == q || target == q,
            Gate::Single { qubit, .. } => qubit == q,
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Gate::Cnot { .. } => "cx",
            Gate::Single { label, .. } => label,
        }
    }

    /// Applies `f` to every qubit index.
    pub fn map_qubits(&self, mut f: impl FnMut(usize) -> usize) -> Gate {
        match self {
            Gate::Cnot { control, target } => Gate::Cnot {
                control: f(*control),
                target: f(*target),
            },
            Gate::Single {
                label,
                params,
                qubit,
            } => Gate::Single {
                label: label.clone(),
                params: params.clone(),
                qubit: f(*qubit),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateQubits {
    One(usize),
    Two(usize, usize),
}

impl GateQubits {
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let (a, b) = match self {
            GateQubits::One(a) => (a, None),
            GateQubits::Two(a, b) => (a, Some(b)),
        };
        core::iter::once(a).chain(b)
    }
}

/// An ordered gate list over `n_qubits` indexed qubits. Gate 0 runs first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut c = Circuit::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    fn check_qubit(&self, q: usize) -> Result<(), CircuitError> {
        if q >= self.n_qubits {
            Err(CircuitError::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n_qubits,
            })
        } else {
            Ok(())
        }
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        match gate {
            Gate::Cnot { control, target } => {
                self.check_qubit(control)?;
                self.check_qubit(target)?;
                if control == target {
                    return Err(CircuitError::SameQubit(control));
                }
            }
            Gate::Single { qubit, .. } => self.check_qubit(qubit)?,
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn push_cnot(&mut self, control: usize, target: usize) -> Result<(), CircuitError> {
        self.push(Gate::cnot(control, target))
    }

    pub fn push_single(
        &mut self,
        label: &str,
        params: &[f64],
        qubit: usize,
    ) -> Result<(), CircuitError> {
        self.push(Gate::single(label.to_string(), params, qubit))
    }

    /// Appends all gates of `other`, which must have the same width.
    pub fn extend_from(&mut self, other: &Circuit) -> Result<(), CircuitError> {
        if other.n_qubits != self.n_qubits {
            return Err(CircuitError::SizeMismatch(self.n_qubits, other.n_qubits));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// `(control, target)` of every CNOT in order.
    pub fn cnots(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.gates.iter().filter_map(|g| match *g {
            Gate::Cnot { control, target } => Some((control, target)),
            _ => None,
        })
    }

    pub fn cnot_count(&self) -> usize {
        self.cnots().count()
    }

    pub fn single_count(&self) -> usize {
        self.gates.len() - self.cnot_count()
    }

    pub fn is_cnot_only(&self) -> bool {
        self.gates.iter().all(Gate::is_cnot)
    }

    /// Parity matrix: start from the identity and apply `R(control, target)`
    /// for each CNOT in execution order.
    pub fn parity_matrix(&self) -> Result<BitMatrix, CircuitError> {
        let mut p = BitMatrix::identity(self.n_qubits);
        for (i, g) in self.gates.iter().enumerate() {
            match *g {
                Gate::Cnot { control, target } => p
                    .row_add(control, target)
                    .expect("gate indices validated on push"),
                Gate::Single { ref label, .. } => {
                    return Err(CircuitError::NotCnot {
                        index: i,
                        label: label.clone(),
                    })
                }
            }
        }
        Ok(p)
    }
}
