//! PC-stable baseline sharing the CI providers and the orientation
//! machinery used by QACD.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::ci::{CiProvider, CiQuery};
use crate::graph::{pattern_from_separators_lenient, GraphError, NodeId, Pdag, Skeleton};

/// Separating sets recorded during skeleton search, one per removed pair.
#[derive(Debug, Clone, Default)]
pub struct SepsetMap {
    map: HashMap<(NodeId, NodeId), Vec<NodeId>>,
}

impl SepsetMap {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(x: NodeId, y: NodeId) -> (NodeId, NodeId) {
        if x < y {
            (x, y)
        } else {
            (y, x)
        }
    }

    fn insert(&mut self, x: NodeId, y: NodeId, z: Vec<NodeId>) {
        self.map.insert(Self::key(x, y), z);
    }

    pub fn get(&self, x: NodeId, y: NodeId) -> Option<&[NodeId]> {
        self.map.get(&Self::key(x, y)).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PcParams {
    pub alpha: f64,
    /// Largest conditioning-set size; `None` means n_vars - 2.
    pub max_k: Option<usize>,
}

impl Default for PcParams {
    fn default() -> Self {
        PcParams { alpha: 0.05, max_k: None }
    }
}

/// All k-subsets of `items` in lexicographic order.
fn k_subsets(items: &[NodeId], k: usize) -> Vec<Vec<NodeId>> {
    if k > items.len() {
        return Vec::new();
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut out = Vec::new();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance the rightmost index that still has room
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != items.len() - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// PC-stable skeleton search. Adjacency sets are frozen per level, so the
/// result does not depend on the order pairs are visited in.
///
/// Only effective tests can separate a pair: a degenerate test (zero degrees
/// of freedom after stratum cleanup) reports p = 1 as a no-evidence
/// convention, and deleting an edge on no evidence would disconnect children
/// of deterministic gates.
pub fn pc_stable_skeleton(
    provider: &dyn CiProvider,
    n_vars: usize,
    alpha: f64,
    max_k: usize,
) -> (Skeleton, SepsetMap) {
    let mut skel = Skeleton::complete(n_vars);
    let mut seps = SepsetMap::new();
    for ell in 0..=max_k {
        let frozen: Vec<Vec<NodeId>> = (0..n_vars).map(|v| skel.neighbors(v)).collect();
        if !frozen.iter().any(|adj| adj.len() > ell) {
            break;
        }
        for x in 0..n_vars {
            for y in (x + 1)..n_vars {
                if !skel.has_edge(x, y) {
                    continue;
                }
                let from_x: Vec<NodeId> =
                    frozen[x].iter().copied().filter(|&v| v != y).collect();
                let mut separated = None;
                for z in k_subsets(&from_x, ell) {
                    let r = provider.query(&CiQuery::new(x, y, &z));
                    if r.effective && r.p_value >= alpha {
                        separated = Some(z);
                        break;
                    }
                }
                if separated.is_none() {
                    let x_pool: BTreeSet<NodeId> = from_x.iter().copied().collect();
                    let from_y: Vec<NodeId> =
                        frozen[y].iter().copied().filter(|&v| v != x).collect();
                    for z in k_subsets(&from_y, ell) {
                        if z.iter().all(|v| x_pool.contains(v)) {
                            continue; // already tested from the other side
                        }
                        let r = provider.query(&CiQuery::new(x, y, &z));
                        if r.effective && r.p_value >= alpha {
                            separated = Some(z);
                            break;
                        }
                    }
                }
                if let Some(z) = separated {
                    skel.remove_edge(x, y);
                    seps.insert(x, y, z);
                }
            }
        }
    }
    (skel, seps)
}

/// Collider placement from the recorded separating sets, then Meek closure.
/// Conflicting demands from noisy sepsets degrade to skipped arcs; the
/// Result stays for interface stability.
pub fn pc_orient(skel: &Skeleton, sepsets: &SepsetMap) -> Result<Pdag, GraphError> {
    Ok(pattern_from_separators_lenient(skel, |x, y, w| {
        match sepsets.get(x, y) {
            Some(z) => z.contains(&w),
            None => {
                debug_assert!(false, "no sepset recorded for removed pair ({x}, {y})");
                true
            }
        }
    }))
}

/// The full baseline: PC-stable skeleton search, then orientation.
pub fn pc_discover(
    provider: &dyn CiProvider,
    n_vars: usize,
    params: &PcParams,
) -> Result<(Pdag, SepsetMap), GraphError> {
    let max_k = params.max_k.unwrap_or(n_vars.saturating_sub(2));
    let (skel, seps) = pc_stable_skeleton(provider, n_vars, params.alpha, max_k);
    let pdag = pc_orient(&skel, &seps)?;
    Ok((pdag, seps))
}
