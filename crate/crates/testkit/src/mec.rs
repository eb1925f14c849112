//! Markov equivalence classes by exhaustive enumeration.

use std::collections::BTreeSet;

use qacd_core::graph::{Dag, NodeId, Pdag};

/// Every DAG on `n` nodes, obtained by assigning each of the C(n, 2) vertex
/// pairs one of {absent, forward, backward} and keeping the acyclic results.
/// Exponential; intended for n up to 5.
pub fn enumerate_dags(n: usize) -> Vec<Dag> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut edges = Vec::new();
        for &(i, j) in &pairs {
            match c % 3 {
                1 => edges.push((i, j)),
                2 => edges.push((j, i)),
                _ => {}
            }
            c /= 3;
        }
        if let Ok(d) = Dag::from_edges(n, &edges) {
            out.push(d);
        }
    }
    out
}

fn skeleton_pairs(d: &Dag) -> BTreeSet<(NodeId, NodeId)> {
    d.edges().into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect()
}

fn v_structures(d: &Dag) -> BTreeSet<(NodeId, NodeId, NodeId)> {
    let mut out = BTreeSet::new();
    for w in 0..d.n() {
        let pa = d.parents_of(w);
        for (ai, &a) in pa.iter().enumerate() {
            for &b in &pa[ai + 1..] {
                if !d.is_adjacent(a, b) {
                    out.insert((a.min(b), w, a.max(b)));
                }
            }
        }
    }
    out
}

/// Verma-Pearl criterion: same skeleton, same v-structures.
pub fn same_mec(a: &Dag, b: &Dag) -> bool {
    skeleton_pairs(a) == skeleton_pairs(b) && v_structures(a) == v_structures(b)
}

/// The pattern of `d` from first principles: filter `all` (expected to hold
/// every DAG on d.n() nodes) down to the equivalence class of `d` and keep an
/// arc directed only when the whole class agrees on it.
pub fn mec_pattern(d: &Dag, all: &[Dag]) -> Pdag {
    let members: Vec<&Dag> = all.iter().filter(|m| same_mec(d, m)).collect();
    assert!(!members.is_empty(), "class contains at least d itself");
    let mut p = Pdag::empty(d.n());
    for (u, v) in d.edges() {
        if members.iter().all(|m| m.has_edge(u, v)) {
            p.set_directed(u, v);
        } else {
            p.add_undirected(u, v);
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use qacd_core::graph::Mark;

    #[test]
    fn dag_counts_match_the_series() {
        // OEIS A003024
        assert_eq!(enumerate_dags(1).len(), 1);
        assert_eq!(enumerate_dags(2).len(), 3);
        assert_eq!(enumerate_dags(3).len(), 25);
        assert_eq!(enumerate_dags(4).len(), 543);
    }

    #[test]
    fn chain_class_has_three_members() {
        let all = enumerate_dags(3);
        let chain = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let members = all.iter().filter(|m| same_mec(&chain, m)).count();
        assert_eq!(members, 3);
        let p = mec_pattern(&chain, &all);
        assert_eq!(p.mark(0, 1), Mark::Undirected);
        assert_eq!(p.mark(1, 2), Mark::Undirected);
        assert_eq!(p.mark(0, 2), Mark::Absent);
    }

    #[test]
    fn collider_class_is_a_singleton() {
        let all = enumerate_dags(3);
        let coll = Dag::from_edges(3, &[(0, 2), (1, 2)]).unwrap();
        let members = all.iter().filter(|m| same_mec(&coll, m)).count();
        assert_eq!(members, 1);
        let p = mec_pattern(&coll, &all);
        assert_eq!(p.mark(0, 2), Mark::Forward);
        assert_eq!(p.mark(1, 2), Mark::Forward);
    }
}
