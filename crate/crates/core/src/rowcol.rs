//! Topology-constrained CNOT synthesis by alternating column and row
//! elimination (RowCol).

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::circuit::Circuit;
use crate::gf2::{solve_xor_subset, BitMatrix, BitVec, Gf2Error};
use crate::topology::{root_tree, Topology, TopologyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RowColError {
    #[error("parity matrix is singular")]
    Singular,
    #[error("matrix is {n_rows}x{n_cols} but the topology has {n_vertices} vertices")]
    SizeMismatch {
        n_rows: usize,
        n_cols: usize,
        n_vertices: usize,
    },
    #[error("column {0} is zero on every active row")]
    ZeroColumn(usize),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// `R(src, dst)`: row `dst` becomes `row dst XOR row src`. Mirrors
/// `CNOT(src, dst)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowOp {
    pub src: usize,
    pub dst: usize,
}

impl RowOp {
    pub fn new(src: usize, dst: usize) -> Self {
        RowOp { src, dst }
    }

    pub fn apply(self, m: &mut BitMatrix) -> Result<(), Gf2Error> {
        m.row_add(self.src, self.dst)
    }
}

/// Rows of `p` and the topology vertex each one lives on.
struct RowMap {
    vertex_of: Vec<usize>,
    row_at: Vec<Option<usize>>,
}

impl RowMap {
    fn new(row_of: &[usize], n_vertices: usize) -> Self {
        let mut row_at = vec![None; n_vertices];
        for (r, &v) in row_of.iter().enumerate() {
            row_at[v] = Some(r);
        }
        RowMap {
            vertex_of: row_of.to_vec(),
            row_at,
        }
    }

    fn row(&self, v: usize) -> usize {
        self.row_at[v].expect("tree vertices carry rows")
    }
}

fn active_rows<'a>(map: &'a RowMap, active: &'a [bool]) -> impl Iterator<Item = usize> + 'a {
    (0..map.vertex_of.len()).filter(move |&r| active[map.vertex_of[r]])
}

fn apply(p: &mut BitMatrix, ops: &mut Vec<RowOp>, src: usize, dst: usize) {
    p.row_add(src, dst).expect("rows are distinct and in range");
    ops.push(RowOp::new(src, dst));
}

/// Clears column `pivot_col` on every active row except `pivot_row`, using
/// only row operations along topology edges.
///
/// The operations are applied to `p` in place and returned in application
/// order. `row_of[r]` names the vertex holding row `r`; `active` is a vertex
/// mask.
pub fn eliminate_column(
    p: &mut BitMatrix,
    g: &Topology,
    active: &[bool],
    pivot_row: usize,
    pivot_col: usize,
    row_of: &[usize],
) -> Result<Vec<RowOp>, RowColError> {
    let map = RowMap::new(row_of, g.n_vertices());
    let mut terminals = vec![row_of[pivot_row]];
    let mut any = false;
    for r in active_rows(&map, active) {
        if p.get(r, pivot_col) {
            any = true;
            if r != pivot_row {
                terminals.push(row_of[r]);
            }
        }
    }
    if !any {
        return Err(RowColError::ZeroColumn(pivot_col));
    }
    let tree = g.steiner_tree(active, &terminals)?;
    let edges = root_tree(&tree, row_of[pivot_row]);
    let mut ops = Vec::new();
    // bottom-up: put a 1 on every tree vertex
    for &(parent, child) in edges.iter().rev() {
        let (pr, cr) = (map.row(parent), map.row(child));
        if !p.get(pr, pivot_col) && p.get(cr, pivot_col) {
            apply(p, &mut ops, cr, pr);
        }
    }
    // bottom-up again: clear every vertex from its parent
    for &(parent, child) in edges.iter().rev() {
        let (pr, cr) = (map.row(parent), map.row(child));
        if p.get(cr, pivot_col) {
            apply(p, &mut ops, pr, cr);
        }
    }
    Ok(ops)
}

/// Turns row `pivot_row` into the unit vector at `pivot_col` by adding a
/// subset of the other active rows, routed through a Steiner tree.
///
/// Column `pivot_col` must already be a unit column on the active rows; it
/// stays one. Operations are applied in place and returned.
pub fn eliminate_row(
    p: &mut BitMatrix,
    g: &Topology,
    active: &[bool],
    pivot_row: usize,
    pivot_col: usize,
    row_of: &[usize],
) -> Result<Vec<RowOp>, RowColError> {
    let map = RowMap::new(row_of, g.n_vertices());
    let mut target = p.row(pivot_row).clone();
    target.set(pivot_col, !target.get(pivot_col));
    if target.is_zero() {
        return Ok(Vec::new());
    }
    let others: Vec<usize> = active_rows(&map, active)
        .filter(|&r| r != pivot_row)
        .collect();
    let candidates: Vec<BitVec> = others.iter().map(|&r| p.row(r).clone()).collect();
    let chosen = solve_xor_subset(&candidates, &target)?;
    let mut in_set = vec![false; g.n_vertices()];
    let mut terminals = vec![row_of[pivot_row]];
    for &i in &chosen {
        let v = row_of[others[i]];
        in_set[v] = true;
        terminals.push(v);
    }
    let tree = g.steiner_tree(active, &terminals)?;
    let edges = root_tree(&tree, row_of[pivot_row]);
    let mut ops = Vec::new();
    // top-down: each Steiner vertex is added to its parent once, which
    // cancels its contribution in the sweep below
    for &(parent, child) in &edges {
        if !in_set[child] {
            apply(p, &mut ops, map.row(child), map.row(parent));
        }
    }
    // bottom-up: accumulate subtree sums into the root
    for &(parent, child) in edges.iter().rev() {
        apply(p, &mut ops, map.row(child), map.row(parent));
    }
    debug_assert!(*p.row(pivot_row) == BitVec::unit(p.n_cols(), pivot_col));
    Ok(ops)
}

/// Row operations and vertex order from one RowCol run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowColTrace {
    /// Operations in elimination order, `F_1` first.
    pub ops: Vec<RowOp>,
    pub order: Vec<usize>,
}

/// Runs RowCol, removing the lowest-index non-cutting vertex each round.
pub fn rowcol_trace(p: &BitMatrix, g: &Topology) -> Result<RowColTrace, RowColError> {
    let n = g.n_vertices();
    if p.n_rows() != n || p.n_cols() != n {
        return Err(RowColError::SizeMismatch {
            n_rows: p.n_rows(),
            n_cols: p.n_cols(),
            n_vertices: n,
        });
    }
    if !p.is_invertible()? {
        return Err(RowColError::Singular);
    }
    let mut m = p.clone();
    let row_of: Vec<usize> = (0..n).collect();
    let mut active = vec![true; n];
    let mut trace = RowColTrace {
        ops: Vec::new(),
        order: Vec::with_capacity(n),
    };
    for _ in 0..n {
        let v = g.non_cutting_vertices(&active)?[0];
        trace
            .ops
            .extend(eliminate_column(&mut m, g, &active, v, v, &row_of)?);
        trace
            .ops
            .extend(eliminate_row(&mut m, g, &active, v, v, &row_of)?);
        active[v] = false;
        trace.order.push(v);
    }
    Ok(trace)
}

/// Synthesises a CNOT circuit with parity matrix `p` whose CNOTs all lie on
/// edges of `g`.
///
/// Elimination gives `F_k ... F_1 P = I`, so the circuit is the op list
/// reversed.
pub fn rowcol(p: &BitMatrix, g: &Topology) -> Result<Circuit, RowColError> {
    let trace = rowcol_trace(p, g)?;
    Ok(ops_to_circuit(g.n_vertices(), &trace.ops))
}

pub(crate) fn ops_to_circuit(n_qubits: usize, ops: &[RowOp]) -> Circuit {
    let mut c = Circuit::new(n_qubits);
    for op in ops.iter().rev() {
        c.push_cnot(op.src, op.dst).expect("ops are in range");
    }
    c
}
