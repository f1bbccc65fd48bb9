//! Baseline: cut the circuit at every run of single-qubit gates and route
//! each CNOT slice independently with RowCol.

use alloc::vec::Vec;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate};
use crate::rowcol::{rowcol, RowColError};
use crate::topology::Topology;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SliceError {
    #[error("circuit has {n_qubits} qubits but the topology has {n_vertices} vertices")]
    SizeMismatch { n_qubits: usize, n_vertices: usize },
    #[error(transparent)]
    RowCol(#[from] RowColError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    /// A maximal run of CNOTs.
    Cnots(Circuit),
    /// A maximal run of single-qubit gates.
    Singles(Vec<Gate>),
}

/// Splits `c` into alternating maximal runs of CNOTs and single-qubit gates,
/// in gate-list order. No gate is moved across a cut.
pub fn slice(c: &Circuit) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    for g in c.gates() {
        match (g.is_cnot(), out.last_mut()) {
            (true, Some(Segment::Cnots(seg))) => seg.push(g.clone()).expect("same width"),
            (false, Some(Segment::Singles(run))) => run.push(g.clone()),
            (true, _) => {
                let mut seg = Circuit::new(c.n_qubits());
                seg.push(g.clone()).expect("same width");
                out.push(Segment::Cnots(seg));
            }
            (false, _) => out.push(Segment::Singles(alloc::vec![g.clone()])),
        }
    }
    out
}

/// Concatenates segments back into one circuit.
pub fn flatten(n_qubits: usize, segments: &[Segment]) -> Result<Circuit, CircuitError> {
    let mut c = Circuit::new(n_qubits);
    for s in segments {
        match s {
            Segment::Cnots(seg) => c.extend_from(seg)?,
            Segment::Singles(run) => {
                for g in run {
                    c.push(g.clone())?;
                }
            }
        }
    }
    Ok(c)
}

/// Routes every CNOT slice with RowCol on the full topology and keeps the
/// single-qubit gates where they were.
pub fn slice_route(c: &Circuit, g: &Topology) -> Result<Circuit, SliceError> {
    if c.n_qubits() != g.n_vertices() {
        return Err(SliceError::SizeMismatch {
            n_qubits: c.n_qubits(),
            n_vertices: g.n_vertices(),
        });
    }
    let routed = slice(c)
        .into_iter()
        .map(|s| match s {
            Segment::Cnots(seg) => Ok(Segment::Cnots(rowcol(&seg.parity_matrix()?, g)?)),
            other => Ok(other),
        })
        .collect::<Result<Vec<_>, SliceError>>()?;
    Ok(flatten(c.n_qubits(), &routed)?)
}
