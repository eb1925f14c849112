//! Structural intervention distance by checking adjustment sets path by path.

use std::collections::BTreeSet;

use qacd_core::graph::{Dag, NodeId};

use crate::dsep::{path_active, reach_down, simple_paths};

fn reach_down_incl(g: &Dag, x: NodeId) -> BTreeSet<NodeId> {
    let mut s = reach_down(g, x);
    s.insert(x);
    s
}

/// Nodes other than `i` that sit on some directed path `i -> .. -> j`,
/// collected by walking every such path.
fn causal_path_nodes(g: &Dag, i: NodeId, j: NodeId) -> BTreeSet<NodeId> {
    fn go(
        g: &Dag,
        j: NodeId,
        path: &mut Vec<NodeId>,
        on_path: &mut [bool],
        out: &mut BTreeSet<NodeId>,
    ) {
        let v = *path.last().unwrap();
        if v == j {
            out.extend(path[1..].iter().copied());
            return;
        }
        for &c in g.children_of(v) {
            if !on_path[c] {
                on_path[c] = true;
                path.push(c);
                go(g, j, path, on_path, out);
                path.pop();
                on_path[c] = false;
            }
        }
    }
    let mut out = BTreeSet::new();
    let mut path = vec![i];
    let mut on_path = vec![false; g.n()];
    on_path[i] = true;
    go(g, j, &mut path, &mut on_path, &mut out);
    out
}

fn forbidden(g: &Dag, i: NodeId, j: NodeId) -> BTreeSet<NodeId> {
    let mut out = BTreeSet::new();
    for c in causal_path_nodes(g, i, j) {
        out.extend(reach_down_incl(g, c));
    }
    out
}

fn is_causal(g: &Dag, path: &[NodeId]) -> bool {
    path.windows(2).all(|w| g.has_edge(w[0], w[1]))
}

/// Adjustment criterion, checked literally: `z` avoids the forbidden nodes
/// and blocks every non-causal path from `i` to `j`.
fn adjustment_valid(g: &Dag, i: NodeId, j: NodeId, z: &BTreeSet<NodeId>) -> bool {
    if !forbidden(g, i, j).is_disjoint(z) {
        return false;
    }
    for p in simple_paths(g, i, j) {
        if !is_causal(g, &p) && path_active(g, &p, z) {
            return false;
        }
    }
    true
}

/// Counts ordered pairs (i, j) whose interventional distribution comes out
/// wrong when `est`'s parent set of i is used as the adjustment set in
/// `truth`. A pair with j among the estimated parents is wrong exactly when
/// j really descends from i.
pub fn sid_by_paths(truth: &Dag, est: &Dag) -> usize {
    let n = truth.n();
    assert_eq!(n, est.n());
    let mut bad = 0;
    for i in 0..n {
        let z: BTreeSet<NodeId> = est.parents_of(i).iter().copied().collect();
        let de = reach_down(truth, i);
        for j in 0..n {
            if i == j {
                continue;
            }
            let ok = if z.contains(&j) {
                !de.contains(&j)
            } else {
                adjustment_valid(truth, i, j, &z)
            };
            if !ok {
                bad += 1;
            }
        }
    }
    bad
}
