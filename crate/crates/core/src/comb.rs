//! Quantum combs: CNOT circuits over temporal qubits with single-qubit holes.
//!
//! [`decompose`] cuts every single-qubit gate out of a circuit, leaving a
//! hole `(q1, q2)`: temporal qubit `q1` ends where the gate sat and `q2`
//! starts. [`compose`] plugs gates back in.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use thiserror::Error;

use crate::circuit::{Circuit, Gate};

/// `(q1, q2)`: `q1` ends directly before `q2` begins.
pub type Hole = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombError {
    #[error("hole ({0}, {1}) refers to a qubit outside the comb")]
    HoleOutOfRange(usize, usize),
    #[error("no plug for hole ({0}, {1})")]
    MissingPlug(usize, usize),
    #[error("gates cannot be ordered to respect hole ({0}, {1})")]
    Cyclic(usize, usize),
    #[error("renaming produced the hole ({0}, {0})")]
    SelfHole(usize),
    #[error("holes do not form {expected} linear chains")]
    BadChains { expected: usize },
}

/// A circuit over temporal qubits plus its holes, kept in cut order.
#[derive(Debug, Clone, PartialEq)]
pub struct Comb {
    circuit: Circuit,
    holes: Vec<Hole>,
}

impl Comb {
    pub fn new(circuit: Circuit, holes: Vec<Hole>) -> Result<Self, CombError> {
        let n = circuit.n_qubits();
        if let Some(&(a, b)) = holes.iter().find(|&&(a, b)| a >= n || b >= n) {
            return Err(CombError::HoleOutOfRange(a, b));
        }
        Ok(Comb { circuit, holes })
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn holes(&self) -> &[Hole] {
        &self.holes
    }

    pub fn n_temporal(&self) -> usize {
        self.circuit.n_qubits()
    }

    /// Number of logical qubits implied by the holes.
    pub fn n_logical(&self) -> usize {
        self.n_temporal() - self.holes.len()
    }

    pub fn into_parts(self) -> (Circuit, Vec<Hole>) {
        (self.circuit, self.holes)
    }
}

/// A single-qubit gate waiting to be plugged into a hole.
#[derive(Debug, Clone, PartialEq)]
pub struct Plug {
    pub label: String,
    pub params: Vec<f64>,
}

impl Plug {
    pub fn new(label: impl Into<String>, params: &[f64]) -> Self {
        Plug {
            label: label.into(),
            params: params.to_vec(),
        }
    }

    fn on(&self, qubit: usize) -> Gate {
        Gate::single(self.label.clone(), &self.params, qubit)
    }
}

/// Gate assignment for each hole.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PluggingMap {
    plugs: BTreeMap<Hole, Plug>,
}

impl PluggingMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, hole: Hole, plug: Plug) -> Option<Plug> {
        self.plugs.insert(hole, plug)
    }

    pub fn get(&self, hole: Hole) -> Option<&Plug> {
        self.plugs.get(&hole)
    }

    pub fn len(&self) -> usize {
        self.plugs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plugs.is_empty()
    }

    /// Entries in hole order.
    pub fn iter(&self) -> impl Iterator<Item = (Hole, &Plug)> {
        self.plugs.iter().map(|(&h, p)| (h, p))
    }
}

impl FromIterator<(Hole, Plug)> for PluggingMap {
    fn from_iter<I: IntoIterator<Item = (Hole, Plug)>>(iter: I) -> Self {
        PluggingMap {
            plugs: iter.into_iter().collect(),
        }
    }
}

/// Cuts every single-qubit gate out of `c`.
///
/// Logical qubit `q` keeps temporal label `q` until its first cut. Fresh
/// temporal qubits start at `n` and are numbered qubit by qubit: all cuts on
/// logical qubit 0 in time order, then those on qubit 1, and so on. Holes are
/// listed in the order the gates were cut.
pub fn decompose(c: &Circuit) -> (Comb, PluggingMap) {
    let n = c.n_qubits();
    let mut next_fresh = vec![0; n];
    for g in c.gates() {
        if let Gate::Single { qubit, .. } = g {
            next_fresh[*qubit] += 1;
        }
    }
    let mut offset = n;
    for slot in &mut next_fresh {
        let cuts = *slot;
        *slot = offset;
        offset += cuts;
    }
    let mut t: Vec<usize> = (0..n).collect();
    let mut circuit = Circuit::new(offset);
    let mut holes = Vec::new();
    let mut plugs = PluggingMap::new();
    for g in c.gates() {
        match g {
            Gate::Cnot { control, target } => circuit
                .push_cnot(t[*control], t[*target])
                .expect("temporal qubits are in range"),
            Gate::Single {
                label,
                params,
                qubit,
            } => {
                let fresh = next_fresh[*qubit];
                next_fresh[*qubit] += 1;
                let hole = (t[*qubit], fresh);
                holes.push(hole);
                plugs.insert(hole, Plug::new(label.clone(), params));
                t[*qubit] = fresh;
            }
        }
    }
    (Comb { circuit, holes }, plugs)
}

/// Stable topological order of `gates`: gates sharing a qubit keep their
/// relative order, and `extra` adds one more precedence edge. `None` on a
/// cycle.
fn reorder(gates: &[Gate], n_labels: usize, extra: Option<(usize, usize)>) -> Option<Vec<usize>> {
    let m = gates.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut indeg = vec![0usize; m];
    let mut last: Vec<Option<usize>> = vec![None; n_labels];
    for (i, g) in gates.iter().enumerate() {
        for q in g.qubits().iter() {
            if let Some(j) = last[q] {
                succ[j].push(i);
                indeg[i] += 1;
            }
            last[q] = Some(i);
        }
    }
    if let Some((a, b)) = extra {
        if a == b {
            return None;
        }
        succ[a].push(b);
        indeg[b] += 1;
    }
    let mut heap: BinaryHeap<Reverse<usize>> =
        (0..m).filter(|&i| indeg[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(Reverse(i)) = heap.pop() {
        order.push(i);
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                heap.push(Reverse(j));
            }
        }
    }
    (order.len() == m).then_some(order)
}

/// Plugs gates into every hole, processing holes in list order exactly as
/// the composition procedure prescribes: reorder so `q1` finishes before
/// `q2` starts, insert the plug before the first gate on `q2`, then rename
/// `q2` to `q1` everywhere. Surviving labels are finally renumbered
/// `0..k` in ascending order.
pub fn compose(comb: &Comb, plugs: &PluggingMap) -> Result<Circuit, CombError> {
    let n = comb.n_temporal();
    let mut gates: Vec<Gate> = comb.circuit.gates().to_vec();
    let mut holes = comb.holes.clone();
    let mut alive = vec![true; n];
    if let Some(&(q, _)) = holes.iter().find(|&&(a, b)| a == b) {
        return Err(CombError::SelfHole(q));
    }
    for i in 0..holes.len() {
        let (q1, q2) = holes[i];
        let orig = comb.holes[i];
        let plug = plugs
            .get(orig)
            .ok_or(CombError::MissingPlug(orig.0, orig.1))?;
        let last_q1 = gates.iter().rposition(|g| g.acts_on(q1));
        let first_q2 = gates.iter().position(|g| g.acts_on(q2));
        let order = reorder(&gates, n, last_q1.zip(first_q2)).ok_or(CombError::Cyclic(q1, q2))?;
        let mut reordered: Vec<Gate> = order.into_iter().map(|j| gates[j].clone()).collect();
        let at = reordered
            .iter()
            .position(|g| g.acts_on(q2))
            .unwrap_or(reordered.len());
        reordered.insert(at, plug.on(q1));
        gates = reordered
            .iter()
            .map(|g| g.map_qubits(|q| if q == q2 { q1 } else { q }))
            .collect();
        alive[q2] = false;
        for h in &mut holes[i + 1..] {
            for q in [&mut h.0, &mut h.1] {
                if *q == q2 {
                    *q = q1;
                }
            }
            if h.0 == h.1 {
                return Err(CombError::SelfHole(h.0));
            }
        }
    }
    let mut relabel = vec![usize::MAX; n];
    let mut k = 0;
    for (q, &a) in alive.iter().enumerate() {
        if a {
            relabel[q] = k;
            k += 1;
        }
    }
    let gates = gates.iter().map(|g| g.map_qubits(|q| relabel[q])).collect();
    Ok(Circuit::from_gates(k, gates).expect("relabelled gates stay in range"))
}

/// Whether composition succeeds for every plugging map.
///
/// Builds the dependency graph of gates and hole nodes that composition
/// implicitly enforces and checks it for cycles, without touching any gate
/// order. Agrees with [`compose`] on success.
pub fn validate(comb: &Comb) -> bool {
    let n = comb.n_temporal();
    let gates = comb.circuit.gates();
    let m = gates.len();
    let n_nodes = m + comb.holes.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    let mut first = vec![None; n];
    let mut last: Vec<Option<usize>> = vec![None; n];
    for (i, g) in gates.iter().enumerate() {
        for q in g.qubits().iter() {
            if let Some(j) = last[q] {
                succ[j].push(i);
            }
            last[q] = Some(i);
            first[q].get_or_insert(i);
        }
    }
    // classes of merged temporal qubits and the hole nodes inside them
    let mut class: Vec<usize> = (0..n).collect();
    let mut members: Vec<Vec<usize>> = (0..n).map(|q| vec![q]).collect();
    let mut hole_nodes: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (h, &(a, b)) in comb.holes.iter().enumerate() {
        let node = m + h;
        let (ca, cb) = (class[a], class[b]);
        if ca == cb {
            return false;
        }
        for &q in &members[ca] {
            if let Some(j) = last[q] {
                succ[j].push(node);
            }
        }
        for &j in &hole_nodes[ca] {
            succ[j].push(node);
        }
        for &q in &members[cb] {
            if let Some(j) = first[q] {
                succ[node].push(j);
            }
        }
        for &j in &hole_nodes[cb] {
            succ[node].push(j);
        }
        let moved = core::mem::take(&mut members[cb]);
        for &q in &moved {
            class[q] = ca;
        }
        members[ca].extend(moved);
        let moved = core::mem::take(&mut hole_nodes[cb]);
        hole_nodes[ca].extend(moved);
        hole_nodes[ca].push(node);
    }
    let mut indeg = vec![0usize; n_nodes];
    for list in &succ {
        for &j in list {
            indeg[j] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n_nodes).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(i) = stack.pop() {
        seen += 1;
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                stack.push(j);
            }
        }
    }
    seen == n_nodes
}

/// Hole chains of a comb: each logical qubit's temporal qubits in time
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chains {
    /// `chains[l]` lists logical qubit `l`'s temporal qubits, earliest first.
    pub chains: Vec<Vec<usize>>,
    /// Logical owner of each temporal qubit.
    pub owner: Vec<usize>,
}

/// Splits the temporal qubits into chains linked by holes. Chain roots (the
/// qubits that never appear second in a hole) are the logical qubits, in
/// ascending order.
pub fn chains(comb: &Comb, n_logical: usize) -> Result<Chains, CombError> {
    let n = comb.n_temporal();
    let bad = CombError::BadChains {
        expected: n_logical,
    };
    let mut next = vec![None; n];
    let mut has_prev = vec![false; n];
    for &(a, b) in &comb.holes {
        if a == b || next[a].is_some() || has_prev[b] {
            return Err(bad);
        }
        next[a] = Some(b);
        has_prev[b] = true;
    }
    let roots: Vec<usize> = (0..n).filter(|&q| !has_prev[q]).collect();
    if roots.len() != n_logical {
        return Err(bad);
    }
    let mut owner = vec![usize::MAX; n];
    let mut out = Vec::with_capacity(n_logical);
    for (l, &r) in roots.iter().enumerate() {
        let mut chain = vec![r];
        owner[r] = l;
        let mut q = r;
        while let Some(nq) = next[q] {
            chain.push(nq);
            owner[nq] = l;
            q = nq;
        }
        out.push(chain);
    }
    // qubits left unowned sit on cycles
    if owner.contains(&usize::MAX) {
        return Err(bad);
    }
    Ok(Chains { chains: out, owner })
}

/// The current frontier of a comb.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frontier {
    /// Temporal qubits that are not the first element of any hole, ascending.
    pub available: Vec<usize>,
    /// `t[l]`: the available temporal qubit of logical qubit `l`.
    pub t: Vec<usize>,
}

/// Available temporal qubits and the temporal map `t`, following each hole
/// chain to its end.
pub fn frontier(comb: &Comb, n_logical: usize) -> Result<Frontier, CombError> {
    if !validate(comb) {
        return Err(CombError::BadChains {
            expected: n_logical,
        });
    }
    let ch = chains(comb, n_logical)?;
    let t: Vec<usize> = ch
        .chains
        .iter()
        .map(|c| *c.last().expect("chains are non-empty"))
        .collect();
    let mut available = t.clone();
    available.sort_unstable();
    Ok(Frontier { available, t })
}
