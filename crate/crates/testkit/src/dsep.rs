//! d-separation decided the slow way, straight from the path definition.

use std::collections::BTreeSet;

use qacd_core::graph::{Dag, NodeId};

/// Strict descendants of `x`.
pub(crate) fn reach_down(g: &Dag, x: NodeId) -> BTreeSet<NodeId> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![x];
    while let Some(v) = stack.pop() {
        for &c in g.children_of(v) {
            if seen.insert(c) {
                stack.push(c);
            }
        }
    }
    seen
}

/// Every simple path between `x` and `y` in the skeleton of `g`.
pub(crate) fn simple_paths(g: &Dag, x: NodeId, y: NodeId) -> Vec<Vec<NodeId>> {
    fn go(
        g: &Dag,
        y: NodeId,
        path: &mut Vec<NodeId>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<NodeId>>,
    ) {
        let v = *path.last().unwrap();
        if v == y {
            out.push(path.clone());
            return;
        }
        for u in 0..g.n() {
            if !on_path[u] && g.is_adjacent(v, u) {
                on_path[u] = true;
                path.push(u);
                go(g, y, path, on_path, out);
                path.pop();
                on_path[u] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut path = vec![x];
    let mut on_path = vec![false; g.n()];
    on_path[x] = true;
    go(g, y, &mut path, &mut on_path, &mut out);
    out
}

/// A path is active when every collider on it is opened by `z` (itself or a
/// descendant conditioned on) and no other inner node lies in `z`.
pub(crate) fn path_active(g: &Dag, path: &[NodeId], z: &BTreeSet<NodeId>) -> bool {
    for k in 1..path.len().saturating_sub(1) {
        let (a, b, c) = (path[k - 1], path[k], path[k + 1]);
        let collider = g.has_edge(a, b) && g.has_edge(c, b);
        if collider {
            let opened = z.contains(&b) || reach_down(g, b).iter().any(|d| z.contains(d));
            if !opened {
                return false;
            }
        } else if z.contains(&b) {
            return false;
        }
    }
    true
}

/// True when `z` blocks every simple path between `x` and `y`.
pub fn d_separated_by_paths(g: &Dag, x: NodeId, y: NodeId, z: &[NodeId]) -> bool {
    assert!(x != y);
    let zs: BTreeSet<NodeId> = z.iter().copied().collect();
    assert!(!zs.contains(&x) && !zs.contains(&y));
    simple_paths(g, x, y).iter().all(|p| !path_active(g, p, &zs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_and_collider() {
        let chain = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(!d_separated_by_paths(&chain, 0, 2, &[]));
        assert!(d_separated_by_paths(&chain, 0, 2, &[1]));

        let coll = Dag::from_edges(3, &[(0, 2), (1, 2)]).unwrap();
        assert!(d_separated_by_paths(&coll, 0, 1, &[]));
        assert!(!d_separated_by_paths(&coll, 0, 1, &[2]));
    }

    #[test]
    fn collider_descendant_opens() {
        let g = Dag::from_edges(4, &[(0, 2), (1, 2), (2, 3)]).unwrap();
        assert!(d_separated_by_paths(&g, 0, 1, &[]));
        assert!(!d_separated_by_paths(&g, 0, 1, &[3]));
    }

    #[test]
    fn path_listing_is_complete() {
        // diamond 0 -> 1 -> 3, 0 -> 2 -> 3
        let g = Dag::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let mut ps = simple_paths(&g, 0, 3);
        ps.sort();
        assert_eq!(ps, vec![vec![0, 1, 3], vec![0, 2, 3]]);
    }
}
