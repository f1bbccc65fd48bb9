//! Undirected connectivity graphs, cut-vertex detection and Steiner trees.
//!
//! Most queries take an `active` mask: a slice of length `n_vertices` where
//! `true` marks the vertices of the induced subgraph being considered.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("vertex {vertex} out of range for {n_vertices} vertices")]
    VertexOutOfRange { vertex: usize, n_vertices: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("active vertex set is empty or not connected")]
    ActiveDisconnected,
    #[error("terminal {0} is not an active vertex")]
    InactiveTerminal(usize),
    #[error("active mask has length {got}, expected {expected}")]
    MaskLength { expected: usize, got: usize },
}

/// A connected undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    name: String,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

const UNREACHED: usize = usize::MAX;

impl Topology {
    /// Validates and builds a topology. Edges are stored as `(min, max)`
    /// pairs, sorted.
    pub fn new(
        name: impl Into<String>,
        n_vertices: usize,
        edges: &[(usize, usize)],
    ) -> Result<Self, TopologyError> {
        let mut adj = vec![Vec::new(); n_vertices];
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= n_vertices {
                    return Err(TopologyError::VertexOutOfRange {
                        vertex: v,
                        n_vertices,
                    });
                }
            }
            if a == b {
                return Err(TopologyError::SelfLoop(a));
            }
            let e = (a.min(b), a.max(b));
            if adj[e.0].contains(&e.1) {
                return Err(TopologyError::DuplicateEdge(e.0, e.1));
            }
            adj[a].push(b);
            adj[b].push(a);
            norm.push(e);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        norm.sort_unstable();
        let t = Topology {
            name: name.into(),
            adj,
            edges: norm,
        };
        if !t.is_connected(&vec![true; n_vertices]) {
            return Err(TopologyError::Disconnected);
        }
        Ok(t)
    }

    /// Every pair of vertices adjacent.
    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        Topology::new(format!("complete-{n}"), n, &edges).expect("complete graph is valid")
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn line(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Topology::new(format!("line-{n}"), n, &edges).expect("path graph is valid")
    }

    /// Row-major `rows x cols` grid.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        Topology::new(format!("grid-{rows}x{cols}"), rows * cols, &edges)
            .expect("grid graph is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_vertices(&self) -> usize {
        self.adj.len()
    }

    /// Sorted `(a, b)` pairs with `a < b`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbour list.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.adj.len() && self.adj[a].binary_search(&b).is_ok()
    }

    fn check_mask(&self, active: &[bool]) -> Result<(), TopologyError> {
        if active.len() != self.n_vertices() {
            return Err(TopologyError::MaskLength {
                expected: self.n_vertices(),
                got: active.len(),
            });
        }
        Ok(())
    }

    /// BFS distances and parents inside the active subgraph. Neighbours are
    /// visited in ascending order, so parents are deterministic.
    fn bfs(&self, active: &[bool], sources: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let n = self.n_vertices();
        let mut dist = vec![UNREACHED; n];
        let mut parent = vec![UNREACHED; n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == UNREACHED {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if active[w] && dist[w] == UNREACHED {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        (dist, parent)
    }

    /// Whether the subgraph induced by `active` is connected. The empty set
    /// counts as connected.
    pub fn is_connected(&self, active: &[bool]) -> bool {
        match active.iter().position(|&a| a) {
            None => true,
            Some(s) => {
                let (dist, _) = self.bfs(active, &[s]);
                active
                    .iter()
                    .zip(&dist)
                    .all(|(&a, &d)| !a || d != UNREACHED)
            }
        }
    }

    /// Active vertices whose removal leaves the rest of the active subgraph
    /// connected, in ascending order.
    pub fn non_cutting_vertices(&self, active: &[bool]) -> Result<Vec<usize>, TopologyError> {
        self.check_mask(active)?;
        let Some(root) = active.iter().position(|&a| a) else {
            return Err(TopologyError::ActiveDisconnected);
        };
        let n = self.n_vertices();
        // iterative Tarjan: disc/low times, articulation points
        let mut disc = vec![UNREACHED; n];
        let mut low = vec![0; n];
        let mut cut = vec![false; n];
        let mut root_children = 0;
        let mut time = 0;
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, UNREACHED, 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(&mut (v, parent, ref mut next)) = stack.last_mut() {
            if let Some(&w) = self.adj[v].get(*next) {
                *next += 1;
                if !active[w] || w == parent {
                    continue;
                }
                if disc[w] == UNREACHED {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != UNREACHED {
                    low[parent] = low[parent].min(low[v]);
                    if parent != root && low[v] >= disc[parent] {
                        cut[parent] = true;
                    }
                }
            }
        }
        if (0..n).any(|v| active[v] && disc[v] == UNREACHED) {
            return Err(TopologyError::ActiveDisconnected);
        }
        cut[root] = root_children > 1;
        Ok((0..n).filter(|&v| active[v] && !cut[v]).collect())
    }

    /// Edges of a tree inside the active subgraph spanning `terminals`.
    ///
    /// The first terminal is the root. Exact for up to four distinct
    /// terminals, with ties going to trees that branch at the root; larger
    /// sets use the nearest-terminal path heuristic of Takahashi and
    /// Matsuyama grown from the root, with lowest-index tie-breaking. Edges
    /// come back as sorted `(min, max)` pairs.
    pub fn steiner_tree(
        &self,
        active: &[bool],
        terminals: &[usize],
    ) -> Result<Vec<(usize, usize)>, TopologyError> {
        self.check_mask(active)?;
        let mut terms: Vec<usize> = Vec::with_capacity(terminals.len());
        if let Some(&root) = terminals.first() {
            let mut rest = terminals[1..].to_vec();
            rest.sort_unstable();
            rest.dedup();
            terms.push(root);
            terms.extend(rest.into_iter().filter(|&t| t != root));
        }
        for &t in &terms {
            if t >= self.n_vertices() {
                return Err(TopologyError::VertexOutOfRange {
                    vertex: t,
                    n_vertices: self.n_vertices(),
                });
            }
            if !active[t] {
                return Err(TopologyError::InactiveTerminal(t));
            }
        }
        if terms.len() <= 1 {
            return Ok(Vec::new());
        }
        if terms.len() <= 4 {
            self.steiner_small(active, &terms)
        } else {
            self.steiner_heuristic(active, &terms)
        }
    }

    fn steiner_heuristic(
        &self,
        active: &[bool],
        terms: &[usize],
    ) -> Result<Vec<(usize, usize)>, TopologyError> {
        let n = self.n_vertices();
        let mut in_tree = vec![false; n];
        let mut tree_vertices = vec![terms[0]];
        in_tree[terms[0]] = true;
        let mut edges = Vec::new();
        loop {
            let (dist, parent) = self.bfs(active, &tree_vertices);
            let next = terms
                .iter()
                .copied()
                .filter(|&t| !in_tree[t])
                .min_by_key(|&t| (dist[t], t));
            let Some(t) = next else { break };
            if dist[t] == UNREACHED {
                return Err(TopologyError::ActiveDisconnected);
            }
            let mut v = t;
            while !in_tree[v] {
                in_tree[v] = true;
                tree_vertices.push(v);
                let p = parent[v];
                edges.push((v.min(p), v.max(p)));
                v = p;
            }
        }
        edges.sort_unstable();
        Ok(edges)
    }

    /// Exact tree for 2 to 4 terminals. An optimal tree on at most four
    /// terminals has at most two branch vertices `u`, `v`, so it is found
    /// among unions of shortest paths `{a,b} - u - v - {c,d}`.
    fn steiner_small(
        &self,
        active: &[bool],
        terms: &[usize],
    ) -> Result<Vec<(usize, usize)>, TopologyError> {
        let n = self.n_vertices();
        // the root is tried first so that it wins ties
        let root = terms[0];
        let verts: Vec<usize> = core::iter::once(root)
            .chain((0..n).filter(|&v| active[v] && v != root))
            .collect();
        let mut dist = vec![Vec::new(); n];
        let mut parent = vec![Vec::new(); n];
        for &v in &verts {
            let (d, p) = self.bfs(active, &[v]);
            dist[v] = d;
            parent[v] = p;
        }
        if terms[1..].iter().any(|&t| dist[terms[0]][t] == UNREACHED) {
            return Err(TopologyError::ActiveDisconnected);
        }
        // each split puts the terminals into two groups hanging off u and v
        let splits: Vec<(Vec<usize>, Vec<usize>)> = if terms.len() < 4 {
            vec![(terms.to_vec(), Vec::new())]
        } else {
            let [a, b, c, d] = [terms[0], terms[1], terms[2], terms[3]];
            vec![
                (vec![a, b], vec![c, d]),
                (vec![a, c], vec![b, d]),
                (vec![a, d], vec![b, c]),
            ]
        };
        let mut best: Option<(usize, usize, usize, usize)> = None;
        for (si, (l, r)) in splits.iter().enumerate() {
            for &u in &verts {
                let lu: usize = l.iter().map(|&t| dist[u][t]).sum();
                for &v in core::iter::once(&u).chain(verts.iter().filter(|&&v| v != u)) {
                    if r.is_empty() && v != u {
                        break;
                    }
                    let cost = lu + dist[u][v] + r.iter().map(|&t| dist[v][t]).sum::<usize>();
                    if best.is_none_or(|b| cost < b.0) {
                        best = Some((cost, si, u, v));
                    }
                }
            }
        }
        let (_, si, u, v) = best.expect("at least one active vertex");
        let (l, r) = &splits[si];
        let mut union = vec![Vec::new(); n];
        let mut add_path = |from: usize, to: usize| {
            // walk from `to` back to `from` along the BFS tree of `from`
            let mut x = to;
            while x != from {
                let p = parent[from][x];
                if !union[x].contains(&p) {
                    union[x].push(p);
                    union[p].push(x);
                }
                x = p;
            }
        };
        for &t in l {
            add_path(u, t);
        }
        add_path(u, v);
        for &t in r {
            add_path(v, t);
        }
        Ok(prune_to_tree(union, terms))
    }
}

/// Spanning tree of a connected edge union (BFS from the first terminal),
/// with non-terminal leaves removed repeatedly.
fn prune_to_tree(mut union: Vec<Vec<usize>>, terms: &[usize]) -> Vec<(usize, usize)> {
    let n = union.len();
    for list in &mut union {
        list.sort_unstable();
    }
    let mut seen = vec![false; n];
    let mut tree = vec![Vec::new(); n];
    let mut queue = VecDeque::from([terms[0]]);
    seen[terms[0]] = true;
    while let Some(x) = queue.pop_front() {
        for &y in &union[x] {
            if !seen[y] {
                seen[y] = true;
                tree[x].push(y);
                tree[y].push(x);
                queue.push_back(y);
            }
        }
    }
    let mut is_term = vec![false; n];
    for &t in terms {
        is_term[t] = true;
    }
    let mut changed = true;
    while changed {
        changed = false;
        for x in 0..n {
            if !is_term[x] && tree[x].len() == 1 {
                let y = tree[x].pop().expect("leaf has a neighbour");
                tree[y].retain(|&z| z != x);
                changed = true;
            }
        }
    }
    let mut edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| {
            tree[x]
                .iter()
                .filter(move |&&y| x < y)
                .map(move |&y| (x, y))
        })
        .collect();
    edges.sort_unstable();
    edges
}

/// Orients a tree edge list away from `root`: returns `(parent, child)` edges
/// in breadth-first order, children ascending.
pub fn root_tree(edges: &[(usize, usize)], root: usize) -> Vec<(usize, usize)> {
    let n = edges
        .iter()
        .map(|&(a, b)| a.max(b) + 1)
        .max()
        .unwrap_or(0)
        .max(root + 1);
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut out = Vec::with_capacity(edges.len());
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                out.push((x, y));
                queue.push_back(y);
            }
        }
    }
    out
}
