//! Graph primitives for structure learning: DAGs, partially directed graphs,
//! undirected skeletons, d-separation, and the Meek orientation rules.
//!
//! Partially directed graphs store an undirected edge x - y as the two arcs
//! x -> y and y -> x; a strictly directed edge keeps a single arc. All edge
//! sets are kept in canonical (smaller index first) order so that dumps,
//! iteration, and rule application are deterministic.

mod dsep;
mod extend;
mod meek;

pub use dsep::{ancestors, d_separated, descendants};
pub use extend::{consistent_extensions, ExtendError};
pub use meek::{
    cpdag_from_dag, meek_closure, meek_closure_lenient, pattern_from_separators,
    pattern_from_separators_lenient,
};

use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

/// Index of a node; valid ids are `0..n` for a graph over `n` nodes.
pub type NodeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {node} out of range for a graph over {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("self loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge set contains a directed cycle")]
    Cyclic,
    #[error("orientation rules demand reversing the directed arc {x} -> {y}")]
    InconsistentOrientation { x: NodeId, y: NodeId },
}

fn check_node(node: NodeId, n: usize) -> Result<(), GraphError> {
    if node >= n {
        return Err(GraphError::NodeOutOfRange { node, n });
    }
    Ok(())
}

/// Directed acyclic graph over nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    n: usize,
    parents: Vec<Vec<NodeId>>,
    children: Vec<Vec<NodeId>>,
}

impl Dag {
    /// Builds a DAG from directed edges `(parent, child)`.
    ///
    /// Rejects out-of-range nodes, self loops, duplicate edges, and cycles.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for &(a, b) in edges {
            check_node(a, n)?;
            check_node(b, n)?;
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if children[a].contains(&b) {
                return Err(GraphError::DuplicateEdge(a, b));
            }
            children[a].push(b);
            parents[b].push(a);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let dag = Dag {
            n,
            parents,
            children,
        };
        if dag.kahn_order().is_none() {
            return Err(GraphError::Cyclic);
        }
        Ok(dag)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parents_of(&self, v: NodeId) -> &[NodeId] {
        &self.parents[v]
    }

    pub fn children_of(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.children[a].binary_search(&b).is_ok()
    }

    pub fn is_adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// All edges `(parent, child)` sorted by parent, then child.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for (a, kids) in self.children.iter().enumerate() {
            for &b in kids {
                out.push((a, b));
            }
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// Topological order, smallest index first among ready nodes.
    pub fn topological_order(&self) -> Vec<NodeId> {
        self.kahn_order().expect("constructed DAGs are acyclic")
    }

    fn kahn_order(&self) -> Option<Vec<NodeId>> {
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<NodeId> = (0..self.n).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(&v) = ready.iter().next() {
            ready.remove(&v);
            order.push(v);
            for &c in &self.children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }
}

/// Edge mark over an ordered node pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Absent,
    Undirected,
    /// Directed from the first node of the pair to the second.
    Forward,
    /// Directed from the second node of the pair to the first.
    Backward,
}

/// Partially directed graph in the two-arc representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pdag {
    n: usize,
    arc: Vec<bool>,
}

impl Pdag {
    pub fn empty(n: usize) -> Self {
        Pdag {
            n,
            arc: vec![false; n * n],
        }
    }

    /// Every skeleton edge becomes an undirected edge.
    pub fn from_skeleton(s: &Skeleton) -> Self {
        let mut p = Pdag::empty(s.n());
        for (a, b) in s.edges() {
            p.arc[a * s.n() + b] = true;
            p.arc[b * s.n() + a] = true;
        }
        p
    }

    /// Every DAG edge becomes a strictly directed edge.
    pub fn from_dag(d: &Dag) -> Self {
        let mut p = Pdag::empty(d.n());
        for (a, b) in d.edges() {
            p.arc[a * d.n() + b] = true;
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn idx(&self, a: NodeId, b: NodeId) -> usize {
        a * self.n + b
    }

    pub fn arc(&self, a: NodeId, b: NodeId) -> bool {
        self.arc[self.idx(a, b)]
    }

    pub fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.arc(a, b) || self.arc(b, a)
    }

    pub fn undirected(&self, a: NodeId, b: NodeId) -> bool {
        self.arc(a, b) && self.arc(b, a)
    }

    pub fn strictly_directed(&self, a: NodeId, b: NodeId) -> bool {
        self.arc(a, b) && !self.arc(b, a)
    }

    /// Adds the undirected edge a - b.
    pub fn add_undirected(&mut self, a: NodeId, b: NodeId) {
        assert_ne!(a, b, "self loops are not representable");
        let (i, j) = (self.idx(a, b), self.idx(b, a));
        self.arc[i] = true;
        self.arc[j] = true;
    }

    /// Adds the strictly directed edge a -> b, replacing any undirected edge
    /// on the pair.
    pub fn set_directed(&mut self, a: NodeId, b: NodeId) {
        assert_ne!(a, b, "self loops are not representable");
        let (i, j) = (self.idx(a, b), self.idx(b, a));
        self.arc[i] = true;
        self.arc[j] = false;
    }

    pub fn remove_pair(&mut self, a: NodeId, b: NodeId) {
        let (i, j) = (self.idx(a, b), self.idx(b, a));
        self.arc[i] = false;
        self.arc[j] = false;
    }

    pub fn mark(&self, a: NodeId, b: NodeId) -> Mark {
        match (self.arc(a, b), self.arc(b, a)) {
            (false, false) => Mark::Absent,
            (true, true) => Mark::Undirected,
            (true, false) => Mark::Forward,
            (false, true) => Mark::Backward,
        }
    }

    /// Nodes adjacent to `v` under any mark, ascending.
    pub fn neighbors(&self, v: NodeId) -> Vec<NodeId> {
        (0..self.n).filter(|&u| u != v && self.adjacent(v, u)).collect()
    }

    /// Nodes `p` with a strictly directed edge p -> v, ascending.
    pub fn strict_parents(&self, v: NodeId) -> Vec<NodeId> {
        (0..self.n)
            .filter(|&u| u != v && self.strictly_directed(u, v))
            .collect()
    }

    pub fn skeleton(&self) -> Skeleton {
        let mut s = Skeleton::new(self.n);
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                if self.adjacent(a, b) {
                    s.add_edge(a, b).expect("bounds already checked");
                }
            }
        }
        s
    }

    /// Canonical pairs currently undirected.
    pub fn undirected_pairs(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                if self.undirected(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        let mut count = 0;
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                if self.adjacent(a, b) {
                    count += 1;
                }
            }
        }
        count
    }

    /// True when the strictly directed subgraph has no directed cycle.
    pub fn directed_part_acyclic(&self) -> bool {
        let mut indeg = vec![0usize; self.n];
        for a in 0..self.n {
            for b in 0..self.n {
                if a != b && self.strictly_directed(a, b) {
                    indeg[b] += 1;
                }
            }
        }
        let mut ready: Vec<NodeId> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut peeled = 0;
        while let Some(v) = ready.pop() {
            peeled += 1;
            for u in 0..self.n {
                if u != v && self.strictly_directed(v, u) {
                    indeg[u] -= 1;
                    if indeg[u] == 0 {
                        ready.push(u);
                    }
                }
            }
        }
        peeled == self.n
    }

    /// True when a strictly directed path leads from `a` to `b`.
    pub fn strict_path_exists(&self, a: NodeId, b: NodeId) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![a];
        seen[a] = true;
        while let Some(v) = stack.pop() {
            if v == b {
                return true;
            }
            for u in 0..self.n {
                if !seen[u] && u != v && self.strictly_directed(v, u) {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        false
    }

    /// Plain-text adjacency dump: one line per edge, `i -> j` for directed
    /// arcs and `i -- j` for undirected edges, in canonical pair order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                match self.mark(a, b) {
                    Mark::Absent => {}
                    Mark::Undirected => writeln!(out, "{a} -- {b}").unwrap(),
                    Mark::Forward => writeln!(out, "{a} -> {b}").unwrap(),
                    Mark::Backward => writeln!(out, "{b} -> {a}").unwrap(),
                }
            }
        }
        out
    }

    /// Interprets a fully directed, acyclic Pdag as a Dag.
    pub fn to_dag(&self) -> Option<Dag> {
        let mut edges = Vec::new();
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                match self.mark(a, b) {
                    Mark::Absent => {}
                    Mark::Undirected => return None,
                    Mark::Forward => edges.push((a, b)),
                    Mark::Backward => edges.push((b, a)),
                }
            }
        }
        Dag::from_edges(self.n, &edges).ok()
    }
}

/// Undirected skeleton: a set of canonical node pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    n: usize,
    edges: BTreeSet<(NodeId, NodeId)>,
}

impl Skeleton {
    pub fn new(n: usize) -> Self {
        Skeleton {
            n,
            edges: BTreeSet::new(),
        }
    }

    /// Complete skeleton over `n` nodes.
    pub fn complete(n: usize) -> Self {
        let mut s = Skeleton::new(n);
        for a in 0..n {
            for b in (a + 1)..n {
                s.edges.insert((a, b));
            }
        }
        s
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, GraphError> {
        let mut s = Skeleton::new(n);
        for (a, b) in edges {
            s.add_edge(a, b)?;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, a: NodeId, b: NodeId) -> Result<(), GraphError> {
        check_node(a, self.n)?;
        check_node(b, self.n)?;
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        self.edges.insert((a.min(b), a.max(b)));
        Ok(())
    }

    pub fn remove_edge(&mut self, a: NodeId, b: NodeId) {
        self.edges.remove(&(a.min(b), a.max(b)));
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Canonical edge pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn neighbors(&self, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (a, b) in self.edges() {
            writeln!(out, "{a} -- {b}").unwrap();
        }
        out
    }
}

/// All unshielded triples (x, w, y) of a skeleton: x - w and w - y are edges,
/// x and y are not adjacent, and x < y. Sorted by (x, y, w).
pub fn unshielded_triples(s: &Skeleton) -> Vec<(NodeId, NodeId, NodeId)> {
    let mut out = Vec::new();
    for x in 0..s.n() {
        for y in (x + 1)..s.n() {
            if s.has_edge(x, y) {
                continue;
            }
            for w in 0..s.n() {
                if w != x && w != y && s.has_edge(x, w) && s.has_edge(w, y) {
                    out.push((x, y, w));
                }
            }
        }
    }
    // Reorder fields for the caller: triples travel as (x, w, y).
    out.sort_unstable();
    out.into_iter().map(|(x, y, w)| (x, w, y)).collect()
}
