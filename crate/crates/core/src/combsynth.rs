//! Comb-aware RowCol (CombSynth): resynthesises a CNOT comb one temporal
//! qubit at a time, only ever combining temporal qubits that are alive
//! together.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError};
use crate::comb::{chains, compose, decompose, validate, Comb, CombError};
use crate::gf2::{in_span, BitMatrix, BitVec};
use crate::rowcol::{eliminate_column, eliminate_row, RowColError, RowOp};
use crate::topology::Topology;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombSynthError {
    #[error("comb has {n_logical} logical qubits but the topology has {n_vertices} vertices")]
    SizeMismatch { n_logical: usize, n_vertices: usize },
    #[error("input is not a valid comb")]
    InvalidComb,
    #[error("no extractible temporal qubit at step {step}")]
    NoExtractible { step: usize },
    #[error("temporal qubit {qubit} cannot be extracted at step {step}")]
    Infeasible { step: usize, qubit: usize },
    #[error(transparent)]
    Comb(#[from] CombError),
    #[error(transparent)]
    RowCol(#[from] RowColError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// How the next temporal qubit to extract is chosen.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ExtractionPolicy {
    /// Qubits that start at the most recently cut hole first, then the
    /// highest temporal index.
    #[default]
    LatestCut,
    /// Greedy: the extractible qubit needing the fewest row operations now,
    /// ties broken as in `LatestCut`.
    MinCost,
    /// Replays a given extraction order.
    Fixed(Vec<usize>),
}

/// Elimination state across CombSynth iterations.
#[derive(Debug, Clone)]
pub struct ExtractionState {
    p: BitMatrix,
    live: Vec<bool>,
    t: Vec<usize>,
    active: Vec<bool>,
    owner: Vec<usize>,
    /// Predecessor of each temporal qubit through a remaining hole, with the
    /// hole's position in the hole list.
    pred: Vec<Option<(usize, usize)>>,
}

impl ExtractionState {
    pub fn new(comb: &Comb, n_logical: usize) -> Result<Self, CombSynthError> {
        if !validate(comb) {
            return Err(CombSynthError::InvalidComb);
        }
        let ch = chains(comb, n_logical)?;
        let n = comb.n_temporal();
        let mut pred = vec![None; n];
        for (i, &(a, b)) in comb.holes().iter().enumerate() {
            pred[b] = Some((a, i));
        }
        Ok(ExtractionState {
            p: comb.circuit().parity_matrix()?,
            live: vec![true; n],
            t: ch
                .chains
                .iter()
                .map(|c| *c.last().expect("non-empty"))
                .collect(),
            active: vec![true; n_logical],
            owner: ch.owner,
            pred,
        })
    }

    /// Full temporal parity matrix.
    pub fn p(&self) -> &BitMatrix {
        &self.p
    }

    pub fn t(&self) -> &[usize] {
        &self.t
    }

    pub fn active_logical(&self) -> &[bool] {
        &self.active
    }

    pub fn live_temporal(&self) -> &[bool] {
        &self.live
    }

    pub fn owner(&self, q: usize) -> usize {
        self.owner[q]
    }

    pub fn is_done(&self) -> bool {
        !self.active.contains(&true)
    }

    /// Available temporal qubits, by logical qubit.
    pub fn available(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.t.len())
            .filter(|&l| self.active[l])
            .map(|l| self.t[l])
    }

    /// One row per logical qubit: row `l` is the row of `t(l)`, or zero once
    /// `l` has left the topology. Columns are all temporal qubits.
    pub fn build_submatrix(&self) -> BitMatrix {
        let n_cols = self.p.n_cols();
        let rows = (0..self.t.len())
            .map(|l| {
                if self.active[l] {
                    self.p.row(self.t[l]).clone()
                } else {
                    BitVec::zeros(n_cols)
                }
            })
            .collect();
        BitMatrix::from_bitvecs(n_cols, rows).expect("rows share a width")
    }

    /// Whether `e` can be extracted now: it must be available, removing its
    /// logical vertex (when `e` is the last of its chain) must not cut the
    /// active topology, and its row and column must be reducible using only
    /// the available rows.
    pub fn is_extractible(&self, e: usize, g: &Topology) -> bool {
        let Some(&l) = self.owner.get(e) else {
            return false;
        };
        if !self.live[e] || !self.active[l] || self.t[l] != e {
            return false;
        }
        if self.pred[e].is_none() {
            match g.non_cutting_vertices(&self.active) {
                Ok(nc) if nc.contains(&l) => {}
                _ => return false,
            }
        }
        let mut is_avail = vec![false; self.live.len()];
        for q in self.available() {
            is_avail[q] = true;
        }
        let blocked =
            (0..self.live.len()).any(|q| self.live[q] && !is_avail[q] && self.p.get(q, e));
        if blocked {
            return false;
        }
        let rows: Vec<&BitVec> = self.available().map(|q| self.p.row(q)).collect();
        in_span(&rows, &BitVec::unit(self.p.n_cols(), e))
    }

    /// Row operations on the sub-matrix that would extract `e`, without
    /// changing the state.
    fn plan(&self, e: usize, g: &Topology) -> Result<(BitMatrix, Vec<RowOp>), CombSynthError> {
        let l = self.owner[e];
        let mut sub = self.build_submatrix();
        let row_of: Vec<usize> = (0..self.t.len()).collect();
        let mut ops = eliminate_column(&mut sub, g, &self.active, l, e, &row_of)?;
        ops.extend(eliminate_row(&mut sub, g, &self.active, l, e, &row_of)?);
        Ok((sub, ops))
    }

    /// Number of row operations extracting `e` would take.
    pub fn extraction_cost(&self, e: usize, g: &Topology) -> Result<usize, CombSynthError> {
        Ok(self.plan(e, g)?.1.len())
    }

    /// Extracts `e` and returns the row operations as temporal
    /// `(src, dst)` pairs in application order.
    pub fn extract(
        &mut self,
        e: usize,
        g: &Topology,
    ) -> Result<Vec<(usize, usize)>, CombSynthError> {
        let (sub, ops) = self.plan(e, g)?;
        let temporal: Vec<(usize, usize)> = ops
            .iter()
            .map(|op| (self.t[op.src], self.t[op.dst]))
            .collect();
        for l in 0..self.t.len() {
            if self.active[l] {
                self.p
                    .set_row(self.t[l], sub.row(l).clone())
                    .expect("row widths match");
            }
        }
        let l = self.owner[e];
        self.live[e] = false;
        match self.pred[e].take() {
            Some((prev, _)) => self.t[l] = prev,
            None => self.active[l] = false,
        }
        Ok(temporal)
    }

    fn rank_key(&self, e: usize) -> (bool, usize) {
        match self.pred[e] {
            Some((_, hole)) => (true, hole),
            None => (false, e),
        }
    }
}

/// Picks the next qubit under the latest-cut rule: a qubit entered through
/// the most recently cut hole, otherwise the highest temporal index.
pub fn choose_extractible(state: &ExtractionState, g: &Topology) -> Option<usize> {
    state
        .available()
        .filter(|&e| state.is_extractible(e, g))
        .max_by_key(|&e| state.rank_key(e))
}

fn choose_min_cost(state: &ExtractionState, g: &Topology) -> Result<Option<usize>, CombSynthError> {
    let mut best: Option<(usize, (bool, usize), usize)> = None;
    for e in state.available() {
        if !state.is_extractible(e, g) {
            continue;
        }
        let cost = state.extraction_cost(e, g)?;
        let key = state.rank_key(e);
        let better = match best {
            None => true,
            Some((c, k, _)) => cost < c || (cost == c && key > k),
        };
        if better {
            best = Some((cost, key, e));
        }
    }
    Ok(best.map(|b| b.2))
}

/// What happened during one CombSynth run.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CombSynthTrace {
    /// Temporal qubits in extraction order.
    pub order: Vec<usize>,
    /// Row operations used by each extraction.
    pub step_ops: Vec<usize>,
}

impl CombSynthTrace {
    pub fn total_ops(&self) -> usize {
        self.step_ops.iter().sum()
    }
}

/// Resynthesises `comb` on `g` with the default policy.
pub fn combsynth(comb: &Comb, g: &Topology) -> Result<Comb, CombSynthError> {
    combsynth_with(comb, g, &ExtractionPolicy::default()).map(|r| r.0)
}

/// Resynthesises `comb` on `g`. The output has the same holes and parity
/// matrix, and every CNOT joins simultaneously alive temporal qubits whose
/// logical owners are adjacent in `g`.
pub fn combsynth_with(
    comb: &Comb,
    g: &Topology,
    policy: &ExtractionPolicy,
) -> Result<(Comb, CombSynthTrace), CombSynthError> {
    let n_logical = comb.n_logical();
    if n_logical != g.n_vertices() {
        return Err(CombSynthError::SizeMismatch {
            n_logical,
            n_vertices: g.n_vertices(),
        });
    }
    let mut state = ExtractionState::new(comb, n_logical)?;
    let mut trace = CombSynthTrace::default();
    let mut ops = Vec::new();
    while !state.is_done() {
        let step = trace.order.len();
        let e = match policy {
            ExtractionPolicy::LatestCut => choose_extractible(&state, g),
            ExtractionPolicy::MinCost => choose_min_cost(&state, g)?,
            ExtractionPolicy::Fixed(order) => {
                let Some(&e) = order.get(step) else {
                    return Err(CombSynthError::NoExtractible { step });
                };
                if !state.is_extractible(e, g) {
                    return Err(CombSynthError::Infeasible { step, qubit: e });
                }
                Some(e)
            }
        }
        .ok_or(CombSynthError::NoExtractible { step })?;
        let step_ops = state.extract(e, g)?;
        trace.order.push(e);
        trace.step_ops.push(step_ops.len());
        ops.extend(step_ops);
    }
    let mut circuit = Circuit::new(comb.n_temporal());
    for &(a, b) in ops.iter().rev() {
        circuit.push_cnot(a, b)?;
    }
    Ok((Comb::new(circuit, comb.holes().to_vec())?, trace))
}

/// Routes a circuit of CNOTs and single-qubit gates onto `g`: cut the gates
/// out, resynthesise the comb, plug the gates back in.
pub fn route_circuit(c: &Circuit, g: &Topology) -> Result<Circuit, CombSynthError> {
    route_circuit_with(c, g, &ExtractionPolicy::default())
}

pub fn route_circuit_with(
    c: &Circuit,
    g: &Topology,
    policy: &ExtractionPolicy,
) -> Result<Circuit, CombSynthError> {
    let (comb, plugs) = decompose(c);
    let (routed, _) = combsynth_with(&comb, g, policy)?;
    Ok(compose(&routed, &plugs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rowcol::rowcol_trace;
    use crate::sim::{equivalent_up_to_phase, random_bindings, EQUIVALENCE_TOL};
    use crate::testutil::{example_circuit, example_holes, example_matrix, random_mixed};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn example_comb() -> Comb {
        decompose(&example_circuit()).0
    }

    fn ladder16() -> Topology {
        let top = [1, 2, 3, 4, 5, 6, 7, 8];
        let bottom = [0, 15, 14, 13, 12, 11, 10, 9];
        let mut edges = Vec::new();
        for w in top.windows(2).chain(bottom.windows(2)) {
            edges.push((w[0], w[1]));
        }
        for (a, b) in top.iter().zip(&bottom) {
            edges.push((*a, *b));
        }
        Topology::new("ladder", 16, &edges).unwrap()
    }

    /// Checks every output contract of CombSynth.
    fn check_output(input: &Comb, output: &Comb, g: &Topology) {
        assert_eq!(output.holes(), input.holes());
        assert_eq!(
            output.circuit().parity_matrix().unwrap(),
            input.circuit().parity_matrix().unwrap()
        );
        assert!(validate(output));
        let owner = chains(output, g.n_vertices()).unwrap().owner;
        for (a, b) in output.circuit().cnots() {
            assert!(g.has_edge(owner[a], owner[b]), "cx {a},{b}");
        }
    }

    #[test]
    fn example_submatrix() {
        let comb = example_comb();
        assert_eq!(comb.circuit().parity_matrix().unwrap(), example_matrix());
        assert_eq!(comb.holes(), &example_holes());
        let state = ExtractionState::new(&comb, 4).unwrap();
        let sub = state.build_submatrix();
        assert_eq!(sub.n_rows(), 4);
        assert_eq!(sub.n_cols(), 8);
        for (l, t) in [0, 5, 7, 3].into_iter().enumerate() {
            assert_eq!(sub.row(l), example_matrix().row(t));
        }
    }

    #[test]
    fn submatrix_without_holes_is_p() {
        let mut c = Circuit::new(3);
        c.push_cnot(0, 1).unwrap();
        c.push_cnot(2, 0).unwrap();
        let (comb, _) = decompose(&c);
        let state = ExtractionState::new(&comb, 3).unwrap();
        assert_eq!(state.build_submatrix(), c.parity_matrix().unwrap());
    }

    #[test]
    fn example_first_choice_is_5() {
        let state = ExtractionState::new(&example_comb(), 4).unwrap();
        assert_eq!(choose_extractible(&state, &Topology::complete(4)), Some(5));
    }

    #[test]
    fn single_qubit_comb() {
        let comb = Comb::new(Circuit::new(1), Vec::new()).unwrap();
        let state = ExtractionState::new(&comb, 1).unwrap();
        assert_eq!(choose_extractible(&state, &Topology::complete(1)), Some(0));
    }

    #[test]
    fn example_default_policy() {
        let k4 = Topology::complete(4);
        let (out, trace) =
            combsynth_with(&example_comb(), &k4, &ExtractionPolicy::LatestCut).unwrap();
        assert_eq!(trace.order, vec![5, 7, 6, 4, 3, 2, 1, 0]);
        assert_eq!(trace.step_ops, vec![0, 4, 2, 2, 1, 2, 1, 0]);
        assert_eq!(trace.total_ops(), 12);
        check_output(&example_comb(), &out, &k4);
    }

    #[test]
    fn reference_order_replays_with_expected_counts() {
        let k4 = Topology::complete(4);
        let policy = ExtractionPolicy::Fixed(vec![5, 7, 6, 3, 4, 0, 1, 2]);
        let (out, trace) = combsynth_with(&example_comb(), &k4, &policy).unwrap();
        assert_eq!(trace.step_ops, vec![0, 4, 2, 2, 1, 2, 1, 0]);
        check_output(&example_comb(), &out, &k4);
    }

    #[test]
    fn fixed_order_rejects_unavailable_qubits() {
        let k4 = Topology::complete(4);
        let policy = ExtractionPolicy::Fixed(vec![4]);
        assert_eq!(
            combsynth_with(&example_comb(), &k4, &policy).unwrap_err(),
            CombSynthError::Infeasible { step: 0, qubit: 4 }
        );
    }

    #[test]
    fn worked_example_routes_one_gate_smaller() {
        let c = example_circuit();
        let routed = route_circuit(&c, &Topology::complete(4)).unwrap();
        assert_eq!(routed.len() + 1, c.len());
        assert_eq!(routed.single_count(), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = random_bindings(&c, true, &mut rng);
        assert!(equivalent_up_to_phase(&c, &routed, &b, EQUIVALENCE_TOL).unwrap());
    }

    #[test]
    fn cnot_free_circuit_is_unchanged() {
        let mut c = Circuit::new(3);
        c.push_single("h", &[], 0).unwrap();
        c.push_single("x", &[], 2).unwrap();
        c.push_single("t", &[], 0).unwrap();
        assert_eq!(route_circuit(&c, &Topology::line(3)).unwrap(), c);
    }

    #[test]
    fn without_holes_matches_rowcol() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let g = Topology::grid(3, 3);
        for _ in 0..20 {
            let c = random_mixed(9, 40, 0, &mut rng);
            let (comb, _) = decompose(&c);
            let p = c.parity_matrix().unwrap();
            let rc = rowcol_trace(&p, &g).unwrap();
            let (out, trace) =
                combsynth_with(&comb, &g, &ExtractionPolicy::Fixed(rc.order.clone())).unwrap();
            assert_eq!(trace.total_ops(), rc.ops.len());
            assert_eq!(out.circuit(), &crate::rowcol::rowcol(&p, &g).unwrap());
        }
    }

    #[test]
    fn wrong_size_is_rejected() {
        assert!(matches!(
            combsynth(&example_comb(), &Topology::line(5)),
            Err(CombSynthError::SizeMismatch { .. })
        ));
    }

    /// Extracts on a copy and checks row and column `e` of the full matrix
    /// came out as unit vectors.
    fn extraction_works(state: &ExtractionState, e: usize, g: &Topology) -> bool {
        let mut s = state.clone();
        if s.extract(e, g).is_err() {
            return false;
        }
        let n = s.p.n_cols();
        *s.p.row(e) == BitVec::unit(n, e) && s.p.column(e) == BitVec::unit(n, e)
    }

    #[test]
    fn choices_satisfy_the_extraction_contract() {
        let g = Topology::grid(3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..30 {
            let c = random_mixed(9, 30, 12, &mut rng);
            let (comb, _) = decompose(&c);
            let mut state = ExtractionState::new(&comb, 9).unwrap();
            while !state.is_done() {
                for e in state.available().collect::<Vec<_>>() {
                    // the predicate is exact on an unconstrained graph
                    let k9 = Topology::complete(9);
                    assert_eq!(
                        state.is_extractible(e, &k9),
                        extraction_works(&state, e, &k9)
                    );
                }
                let e = choose_extractible(&state, &g).expect("an extractible qubit exists");
                assert!(extraction_works(&state, e, &g));
                let l = state.owner(e);
                if state.pred[e].is_none() {
                    let mut rest = state.active.clone();
                    rest[l] = false;
                    assert!(g.is_connected(&rest));
                }
                state.extract(e, &g).unwrap();
            }
        }
    }

    #[test]
    fn random_combs_on_a_ladder() {
        let g = ladder16();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let m = rng.gen_range(0..120);
            let k = rng.gen_range(0..40);
            let c = random_mixed(16, m, k, &mut rng);
            let (comb, _) = decompose(&c);
            let out = combsynth(&comb, &g).unwrap();
            check_output(&comb, &out, &g);
        }
    }

    #[test]
    fn min_cost_policy_is_valid_and_no_worse_on_worked_example() {
        let k4 = Topology::complete(4);
        let (out, trace) =
            combsynth_with(&example_comb(), &k4, &ExtractionPolicy::MinCost).unwrap();
        check_output(&example_comb(), &out, &k4);
        assert!(trace.total_ops() <= 12);
    }

    fn grid_minus_corner() -> Topology {
        let g = Topology::grid(3, 3);
        let edges: Vec<_> = g
            .edges()
            .iter()
            .copied()
            .filter(|&(a, b)| a != 8 && b != 8)
            .collect();
        Topology::new("grid-8", 8, &edges).unwrap()
    }

    #[test]
    fn routed_circuits_are_equivalent() {
        let g = grid_minus_corner();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let c = random_mixed(8, rng.gen_range(0..40), rng.gen_range(0..12), &mut rng);
            for policy in [ExtractionPolicy::LatestCut, ExtractionPolicy::MinCost] {
                let routed = route_circuit_with(&c, &g, &policy).unwrap();
                assert!(routed.cnots().all(|(a, b)| g.has_edge(a, b)));
                let b = random_bindings(&c, true, &mut rng);
                assert!(equivalent_up_to_phase(&c, &routed, &b, EQUIVALENCE_TOL).unwrap());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn combsynth_contracts_on_small_grids(seed in any::<u64>(), rows in 1usize..=3, cols in 2usize..=3, m in 0usize..40, k in 0usize..12) {
            let g = Topology::grid(rows, cols);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_mixed(g.n_vertices(), m, k, &mut rng);
            let (comb, _) = decompose(&c);
            let out = combsynth(&comb, &g).unwrap();
            check_output(&comb, &out, &g);
        }
    }
}
