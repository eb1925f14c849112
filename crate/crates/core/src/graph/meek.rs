//! Meek orientation rules, CPDAG construction, and collider placement.

use super::{unshielded_triples, Dag, GraphError, NodeId, Pdag, Skeleton};

/// Which orientation a single rule demands for the ordered pair (a, b),
/// given the rest of the graph. The pair's own mark is resolved by the
/// caller.
fn rule_demands(g: &Pdag, rule: u8, a: NodeId, b: NodeId) -> bool {
    let n = g.n();
    match rule {
        // Chain propagation: c -> a, a - b, c and b non-adjacent.
        1 => (0..n).any(|c| {
            c != a && c != b && g.strictly_directed(c, a) && !g.adjacent(c, b)
        }),
        // Cycle avoidance: a -> w -> b forces a -> b on an adjacent pair.
        2 => (0..n).any(|w| {
            w != a && w != b && g.strictly_directed(a, w) && g.strictly_directed(w, b)
        }),
        // Double triangle: a - w1, a - w2, w1 -> b, w2 -> b, w1 and w2
        // non-adjacent.
        3 => {
            for w1 in 0..n {
                if w1 == a || w1 == b || !g.undirected(a, w1) || !g.strictly_directed(w1, b) {
                    continue;
                }
                for w2 in (w1 + 1)..n {
                    if w2 == a
                        || w2 == b
                        || !g.undirected(a, w2)
                        || !g.strictly_directed(w2, b)
                        || g.adjacent(w1, w2)
                    {
                        continue;
                    }
                    return true;
                }
            }
            false
        }
        // Triangle chain: a - w1, w1 -> w2 -> b, w1 and b non-adjacent.
        4 => {
            for w1 in 0..n {
                if w1 == a || w1 == b || !g.undirected(a, w1) || g.adjacent(w1, b) {
                    continue;
                }
                for w2 in 0..n {
                    if w2 == a || w2 == b || w2 == w1 {
                        continue;
                    }
                    if g.strictly_directed(w1, w2) && g.strictly_directed(w2, b) {
                        return true;
                    }
                }
            }
            false
        }
        _ => unreachable!("rules are numbered 1 through 4"),
    }
}

/// Closes a partially directed graph under the four Meek rules.
///
/// Rules are tried in a fixed order (chain propagation, cycle avoidance,
/// double triangle, triangle chain) over node pairs in canonical index order
/// until no rule fires. Only undirected pairs are eligible targets; edges
/// that are already strictly directed are left alone. Fails when the strictly
/// directed subgraph carries a cycle or when an orientation would close one.
pub fn meek_closure(p: &Pdag) -> Result<Pdag, GraphError> {
    let mut g = p.clone();
    let n = g.n();
    if !g.directed_part_acyclic() {
        return Err(GraphError::Cyclic);
    }
    loop {
        let mut changed = false;
        for rule in 1..=4u8 {
            for i in 0..n {
                for j in (i + 1)..n {
                    if !g.undirected(i, j) {
                        continue;
                    }
                    for (a, b) in [(i, j), (j, i)] {
                        if !rule_demands(&g, rule, a, b) {
                            continue;
                        }
                        // Orient a -> b, rejecting orientations that close a
                        // directed cycle through the new arc.
                        g.set_directed(a, b);
                        if g.strict_path_exists(b, a) {
                            return Err(GraphError::Cyclic);
                        }
                        changed = true;
                        break;
                    }
                }
            }
        }
        if !changed {
            return Ok(g);
        }
    }
}

/// The CPDAG (pattern) of a DAG: its skeleton with every v-structure kept
/// directed and all orientations forced by the Meek rules applied.
pub fn cpdag_from_dag(d: &Dag) -> Pdag {
    let n = d.n();
    let mut p = Pdag::empty(n);
    for (a, b) in d.edges() {
        p.add_undirected(a, b);
    }
    for w in 0..n {
        let parents = d.parents_of(w);
        for (i, &x) in parents.iter().enumerate() {
            for &y in &parents[i + 1..] {
                if !d.is_adjacent(x, y) {
                    p.set_directed(x, w);
                    p.set_directed(y, w);
                }
            }
        }
    }
    meek_closure(&p).expect("the pattern of a DAG closes without conflicts")
}

/// Meek closure that tolerates contradictory inputs.
///
/// Same rule loop as `meek_closure`, but an orientation whose new arc would
/// close a directed cycle is skipped (and blocked from re-firing) instead of
/// failing. Collider placements from noisy separating sets can demand cyclic
/// orientations, and the discovery pipeline needs a total closure there; the
/// strict variant stays the right tool wherever a conflict means a bug.
pub fn meek_closure_lenient(p: &Pdag) -> Pdag {
    let mut g = p.clone();
    let n = g.n();
    let mut blocked = vec![false; n * n];
    loop {
        let mut changed = false;
        for rule in 1..=4u8 {
            for i in 0..n {
                for j in (i + 1)..n {
                    if !g.undirected(i, j) {
                        continue;
                    }
                    for (a, b) in [(i, j), (j, i)] {
                        if blocked[a * n + b] || !rule_demands(&g, rule, a, b) {
                            continue;
                        }
                        // The new arc a -> b cannot itself lie on a path from
                        // b back to a, so testing reachability before placing
                        // it decides whether the orientation closes a cycle.
                        if g.strict_path_exists(b, a) {
                            blocked[a * n + b] = true;
                            log::debug!(
                                "meek rule {rule} orientation {a} -> {b} skipped: closes a cycle"
                            );
                            continue;
                        }
                        g.set_directed(a, b);
                        changed = true;
                        break;
                    }
                }
            }
        }
        if !changed {
            return g;
        }
    }
}

fn place_colliders(
    skel: &Skeleton,
    in_separator: impl Fn(NodeId, NodeId, NodeId) -> bool,
) -> Pdag {
    let mut p = Pdag::from_skeleton(skel);
    for (x, w, y) in unshielded_triples(skel) {
        if in_separator(x, y, w) {
            continue;
        }
        for a in [x, y] {
            if p.strictly_directed(w, a) {
                log::debug!("collider arm {a} -> {w} skipped: already oriented {w} -> {a}");
            } else {
                p.set_directed(a, w);
            }
        }
    }
    p
}

/// Orients a skeleton from separator information and closes under the Meek
/// rules.
///
/// For every unshielded triple (x, w, y), in canonical order, the collider
/// x -> w <- y is placed exactly when `in_separator(x, y, w)` is false. A
/// placement that would reverse an arc directed by an earlier triple is
/// skipped and logged rather than applied.
pub fn pattern_from_separators(
    skel: &Skeleton,
    in_separator: impl Fn(NodeId, NodeId, NodeId) -> bool,
) -> Result<Pdag, GraphError> {
    meek_closure(&place_colliders(skel, in_separator))
}

/// `pattern_from_separators` with the lenient closure: contradictions from
/// noisy separator information degrade to skipped orientations instead of
/// errors.
pub fn pattern_from_separators_lenient(
    skel: &Skeleton,
    in_separator: impl Fn(NodeId, NodeId, NodeId) -> bool,
) -> Pdag {
    meek_closure_lenient(&place_colliders(skel, in_separator))
}
