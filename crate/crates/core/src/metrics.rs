//! Structural and interventional distance metrics: skeleton F1, SHD/NSHD,
//! and SID with CPDAG lower/upper bounds via extension enumeration.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    consistent_extensions, d_separated, descendants, Dag, ExtendError, NodeId, Pdag, Skeleton,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("normalization requires a nonempty true edge set")]
    ZeroTrueEdges,
}

/// Precision/recall/F1 of an estimated skeleton against the true one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkeletonReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// True when a 0/0 ratio was forced to zero.
    pub degenerate: bool,
}

pub fn skeleton_f1(est: &Skeleton, truth: &Skeleton) -> SkeletonReport {
    assert_eq!(est.n(), truth.n(), "variable counts differ");
    let mut tp = 0;
    let mut fp = 0;
    for (x, y) in est.edges() {
        if truth.has_edge(x, y) {
            tp += 1;
        } else {
            fp += 1;
        }
    }
    let fn_ = truth.n_edges() - tp;
    let mut degenerate = false;
    let mut ratio = |num: usize, den: usize| {
        if den == 0 {
            degenerate = true;
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        degenerate = true;
        0.0
    };
    SkeletonReport { precision, recall, f1, tp, fp, fn_, degenerate }
}

/// Structural Hamming distance: one count per unordered pair whose mark
/// (absent, undirected, or either direction) differs between the graphs.
pub fn shd(est: &Pdag, truth: &Pdag) -> usize {
    assert_eq!(est.n(), truth.n(), "variable counts differ");
    let n = est.n();
    let mut d = 0;
    for x in 0..n {
        for y in (x + 1)..n {
            if est.mark(x, y) != truth.mark(x, y) {
                d += 1;
            }
        }
    }
    d
}

/// SHD divided by the number of true edges. May exceed 1.
pub fn nshd(est: &Pdag, truth: &Pdag, n_true_edges: usize) -> Result<f64, MetricsError> {
    if n_true_edges == 0 {
        return Err(MetricsError::ZeroTrueEdges);
    }
    Ok(shd(est, truth) as f64 / n_true_edges as f64)
}

/// Nodes other than `i` lying on a directed path from `i` to `j`.
fn causal_nodes(truth: &Dag, i: NodeId, j: NodeId) -> BTreeSet<NodeId> {
    let de = descendants(truth, i);
    if !de.contains(&j) {
        return BTreeSet::new();
    }
    // w is on such a path iff i reaches w and w reaches j
    let mut cn = BTreeSet::new();
    for &w in &de {
        if w == j || descendants(truth, w).contains(&j) {
            cn.insert(w);
        }
    }
    cn
}

/// Is the parent set of `i` in `est` a valid adjustment set for (i, j) in
/// `truth`? Assumes j is not in the set.
fn parents_adjust_correctly(est: &Dag, truth: &Dag, i: NodeId, j: NodeId) -> bool {
    let z: BTreeSet<NodeId> = est.parents_of(i).iter().copied().collect();
    let cn = causal_nodes(truth, i, j);
    // forbidden: the causal nodes and all their descendants
    for &w in &cn {
        if z.contains(&w) || descendants(truth, w).iter().any(|d| z.contains(d)) {
            return false;
        }
    }
    // proper backdoor graph: drop the first edge of every causal path
    let pruned: Vec<(NodeId, NodeId)> = truth
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| !(a == i && cn.contains(&b)))
        .collect();
    let pbd = Dag::from_edges(truth.n(), &pruned).expect("subgraph of a DAG");
    let z_vec: Vec<NodeId> = z.into_iter().collect();
    d_separated(&pbd, i, j, &z_vec)
}

/// Structural intervention distance: the number of ordered pairs (i, j)
/// whose interventional distribution is inferred incorrectly when adjusting
/// for the estimated parents of i.
pub fn sid_dag(est: &Dag, truth: &Dag) -> usize {
    assert_eq!(est.n(), truth.n(), "variable counts differ");
    let n = est.n();
    let mut wrong = 0;
    for i in 0..n {
        let z: BTreeSet<NodeId> = est.parents_of(i).iter().copied().collect();
        let de = descendants(truth, i);
        for j in 0..n {
            if j == i {
                continue;
            }
            let correct = if z.contains(&j) {
                !de.contains(&j)
            } else {
                parents_adjust_correctly(est, truth, i, j)
            };
            if !correct {
                wrong += 1;
            }
        }
    }
    wrong
}

/// SID range over the consistent extensions of a PDAG estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidBounds {
    pub low: usize,
    pub high: usize,
    pub extensions_used: usize,
}

pub fn sid_bounds(est: &Pdag, truth: &Dag, cap: usize) -> Result<SidBounds, ExtendError> {
    let exts = consistent_extensions(est, cap)?;
    let mut low = usize::MAX;
    let mut high = 0;
    for ext in &exts {
        let s = sid_dag(ext, truth);
        low = low.min(s);
        high = high.max(s);
    }
    Ok(SidBounds { low, high, extensions_used: exts.len() })
}

/// Both SID bounds divided by the number of true edges.
pub fn nsid(bounds: &SidBounds, n_true_edges: usize) -> Result<(f64, f64), MetricsError> {
    if n_true_edges == 0 {
        return Err(MetricsError::ZeroTrueEdges);
    }
    let e = n_true_edges as f64;
    Ok((bounds.low as f64 / e, bounds.high as f64 / e))
}
