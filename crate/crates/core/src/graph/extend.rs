//! Enumeration of the consistent DAG extensions of a partially directed
//! graph.

use super::{Dag, NodeId, Pdag};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtendError {
    #[error("more than {cap} consistent extensions")]
    CapExceeded { cap: usize },
    #[error("graph admits no consistent extension")]
    NoExtension,
}

/// All DAGs obtained by orienting the undirected edges of `g` without
/// creating a directed cycle or a new v-structure. Strictly directed edges
/// are kept as they are.
///
/// Fails with [`ExtendError::CapExceeded`] as soon as more than `cap`
/// extensions exist, and with [`ExtendError::NoExtension`] when no
/// orientation works (for example when the directed part already carries a
/// cycle).
pub fn consistent_extensions(g: &Pdag, cap: usize) -> Result<Vec<Dag>, ExtendError> {
    if !g.directed_part_acyclic() {
        return Err(ExtendError::NoExtension);
    }
    let pairs = g.undirected_pairs();
    let mut work = g.clone();
    let mut out = Vec::new();
    search(&mut work, &pairs, 0, cap, &mut out)?;
    if out.is_empty() {
        return Err(ExtendError::NoExtension);
    }
    Ok(out)
}

fn search(
    g: &mut Pdag,
    pairs: &[(NodeId, NodeId)],
    at: usize,
    cap: usize,
    out: &mut Vec<Dag>,
) -> Result<(), ExtendError> {
    if at == pairs.len() {
        if out.len() == cap {
            return Err(ExtendError::CapExceeded { cap });
        }
        let dag = g
            .to_dag()
            .expect("all pairs oriented and every step was checked acyclic");
        out.push(dag);
        return Ok(());
    }
    let (i, j) = pairs[at];
    for (u, v) in [(i, j), (j, i)] {
        if !orientation_allowed(g, u, v) {
            continue;
        }
        g.set_directed(u, v);
        let res = search(g, pairs, at + 1, cap, out);
        g.add_undirected(i, j);
        res?;
    }
    Ok(())
}

/// Whether u -> v can be placed now: it must not close a directed cycle and
/// must not create a v-structure with an existing strict parent of v.
fn orientation_allowed(g: &Pdag, u: NodeId, v: NodeId) -> bool {
    if g.strict_path_exists(v, u) {
        return false;
    }
    for p in g.strict_parents(v) {
        if p != u && !g.adjacent(p, u) {
            return false;
        }
    }
    true
}
