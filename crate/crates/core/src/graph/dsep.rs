//! d-separation and reachability queries on DAGs.

use super::{Dag, NodeId};
use std::collections::BTreeSet;

/// Strict descendants of `x`: every node reachable from `x` along directed
/// edges, excluding `x` itself.
pub fn descendants(g: &Dag, x: NodeId) -> BTreeSet<NodeId> {
    let mut seen = vec![false; g.n()];
    let mut stack = vec![x];
    seen[x] = true;
    let mut out = BTreeSet::new();
    while let Some(v) = stack.pop() {
        for &c in g.children_of(v) {
            if !seen[c] {
                seen[c] = true;
                out.insert(c);
                stack.push(c);
            }
        }
    }
    out
}

/// Strict ancestors of `x`, excluding `x` itself.
pub fn ancestors(g: &Dag, x: NodeId) -> BTreeSet<NodeId> {
    let mut seen = vec![false; g.n()];
    let mut stack = vec![x];
    seen[x] = true;
    let mut out = BTreeSet::new();
    while let Some(v) = stack.pop() {
        for &p in g.parents_of(v) {
            if !seen[p] {
                seen[p] = true;
                out.insert(p);
                stack.push(p);
            }
        }
    }
    out
}

/// Ancestral closure (the seeds plus all their ancestors) as a membership mask.
fn ancestral_mask(g: &Dag, seeds: impl IntoIterator<Item = NodeId>) -> Vec<bool> {
    let mut mask = vec![false; g.n()];
    let mut stack: Vec<NodeId> = Vec::new();
    for s in seeds {
        if !mask[s] {
            mask[s] = true;
            stack.push(s);
        }
    }
    while let Some(v) = stack.pop() {
        for &p in g.parents_of(v) {
            if !mask[p] {
                mask[p] = true;
                stack.push(p);
            }
        }
    }
    mask
}

/// Tests whether `x` and `y` are d-separated by the conditioning set `z`.
///
/// A path is blocked by `z` when some non-collider on it lies in `z`, or some
/// collider on it is outside `z` and has no descendant in `z`; `x` and `y`
/// are d-separated when every path between them is blocked. The
/// implementation answers the query on the moralized ancestral subgraph of
/// `{x, y} ∪ z`, which is equivalent to checking every path directly.
///
/// `x` and `y` must be distinct and must not appear in `z`.
///
/// ```
/// use qacd_core::graph::{d_separated, Dag};
/// // Chain 0 -> 1 -> 2: conditioning on the mediator separates the ends.
/// let g = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
/// assert!(d_separated(&g, 0, 2, &[1]));
/// assert!(!d_separated(&g, 0, 2, &[]));
/// ```
pub fn d_separated(g: &Dag, x: NodeId, y: NodeId, z: &[NodeId]) -> bool {
    let n = g.n();
    assert!(x < n && y < n, "query nodes out of range");
    assert_ne!(x, y, "d-separation query needs distinct endpoints");
    let mut in_z = vec![false; n];
    for &v in z {
        assert!(v < n, "conditioning node out of range");
        assert!(v != x && v != y, "conditioning set must exclude the endpoints");
        in_z[v] = true;
    }

    let mask = ancestral_mask(g, [x, y].into_iter().chain(z.iter().copied()));

    // Moralized ancestral subgraph: parent-child links plus married co-parents,
    // restricted to the ancestral closure.
    let mut adj = vec![Vec::new(); n];
    let connect = |a: NodeId, b: NodeId, adj: &mut Vec<Vec<NodeId>>| {
        adj[a].push(b);
        adj[b].push(a);
    };
    for v in 0..n {
        if !mask[v] {
            continue;
        }
        let parents: Vec<NodeId> = g.parents_of(v).iter().copied().filter(|&p| mask[p]).collect();
        for &p in &parents {
            connect(p, v, &mut adj);
        }
        for i in 0..parents.len() {
            for j in (i + 1)..parents.len() {
                connect(parents[i], parents[j], &mut adj);
            }
        }
    }

    // Reachability in the moral graph with the conditioning set removed.
    let mut seen = vec![false; n];
    let mut stack = vec![x];
    seen[x] = true;
    while let Some(v) = stack.pop() {
        if v == y {
            return false;
        }
        for &u in &adj[v] {
            if !seen[u] && !in_z[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    true
}
