//! The QACD method: candidate generation from a pool of representative CI
//! arguments (Phase I), dialectical fixed-point revision of edge
//! acceptability (Phase II), thresholding, and CPDAG recovery.

use serde::{Deserialize, Serialize};

use crate::ci::{CiProvider, CiQuery};
use crate::graph::{pattern_from_separators_lenient, GraphError, NodeId, Pdag, Skeleton};
use crate::util::splitmix64;

/// Tuning knobs for a discovery run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct QacdParams {
    /// Significance level for the base-strength mapping.
    pub alpha: f64,
    /// A pair stays a candidate edge while some test rejects independence at
    /// this level.
    pub delta_cand: f64,
    /// Final acceptability threshold for keeping an edge.
    pub delta0: f64,
    /// Largest conditioning-set size searched in Phase I.
    pub k_max: usize,
    /// Attack aggressiveness in [0, 1].
    pub lambda: f64,
    /// Iteration budget for Phase II.
    pub t_max: usize,
    /// Convergence tolerance on the max-norm of the iteration change.
    pub epsilon: f64,
    /// Cap on conditioning sets evaluated per size per pair.
    pub max_sets_per_size: usize,
    /// Seed for the conditioning-set sampler.
    pub seed: u64,
    /// Apply propagated attenuation from every pool argument (the default),
    /// or only from arguments whose own pair is a candidate edge.
    pub propagate_noncandidate_tau: bool,
    /// Keep a copy of the acceptability matrix after every iteration.
    pub record_snapshots: bool,
}

impl Default for QacdParams {
    fn default() -> Self {
        QacdParams {
            alpha: 0.05,
            delta_cand: 0.05,
            delta0: 0.05,
            k_max: 3,
            lambda: 0.5,
            t_max: 20,
            epsilon: 1e-4,
            max_sets_per_size: 50,
            seed: 0,
            propagate_noncandidate_tau: true,
            record_snapshots: false,
        }
    }
}

/// The representative independence argument for one unordered pair: the
/// tested conditioning set with the largest p-value.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceArgument {
    pub x: NodeId,
    pub y: NodeId,
    /// The argmax-p conditioning set (ties broken toward the smaller, then
    /// lexicographically smaller, set).
    pub z_star: Vec<NodeId>,
    pub p: f64,
    pub sigma0: f64,
}

/// One representative argument per unordered pair.
#[derive(Debug, Clone)]
pub struct CiPool {
    n: usize,
    args: Vec<IndependenceArgument>,
}

impl CiPool {
    /// Builds a pool from explicit arguments, one per unordered pair in
    /// lexicographic (x, y) order. Panics when the layout disagrees.
    pub fn from_arguments(n: usize, args: Vec<IndependenceArgument>) -> Self {
        assert_eq!(args.len(), n * n.saturating_sub(1) / 2, "one argument per pair");
        let pool = CiPool { n, args };
        for x in 0..n {
            for y in (x + 1)..n {
                let a = pool.get(x, y);
                assert_eq!((a.x, a.y), (x, y), "arguments must be in pair order");
            }
        }
        pool
    }

    fn index(&self, x: NodeId, y: NodeId) -> usize {
        let (x, y) = if x < y { (x, y) } else { (y, x) };
        x * self.n - x * (x + 1) / 2 + (y - x - 1)
    }

    pub fn get(&self, x: NodeId, y: NodeId) -> &IndependenceArgument {
        &self.args[self.index(x, y)]
    }

    pub fn arguments(&self) -> &[IndependenceArgument] {
        &self.args
    }
}

/// Symmetric matrix of edge acceptabilities in [0, 1] with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptabilityMatrix {
    n: usize,
    data: Vec<f64>,
}

impl AcceptabilityMatrix {
    pub fn zeros(n: usize) -> Self {
        AcceptabilityMatrix { n, data: vec![0.0; n * n] }
    }

    /// 1.0 on the edges of `cand`, 0.0 elsewhere.
    pub fn from_candidates(cand: &Skeleton) -> Self {
        let mut m = Self::zeros(cand.n());
        for (x, y) in cand.edges() {
            m.set(x, y, 1.0);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: NodeId, y: NodeId) -> f64 {
        self.data[x * self.n + y]
    }

    /// Sets both (x, y) and (y, x).
    pub fn set(&mut self, x: NodeId, y: NodeId, v: f64) {
        assert_ne!(x, y);
        self.data[x * self.n + y] = v;
        self.data[y * self.n + x] = v;
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Row-major copy of the entries.
    pub fn row_major(&self) -> &[f64] {
        &self.data
    }
}

/// A length-2 connection x - w - y over candidate edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessTriple {
    pub x: NodeId,
    pub w: NodeId,
    pub y: NodeId,
}

/// What happened during Phase II.
#[derive(Debug, Clone)]
pub struct QacdTrace {
    /// Max-norm change of each iteration actually performed.
    pub max_change_per_iter: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Present when snapshot recording was requested.
    pub snapshots: Option<Vec<AcceptabilityMatrix>>,
}

/// JSON-facing view of a finished Phase II run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Phase2Report {
    /// Final acceptability matrix, row-major.
    pub s_final: Vec<f64>,
    pub max_change_per_iter: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

pub fn phase2_report(s: &AcceptabilityMatrix, trace: &QacdTrace) -> Phase2Report {
    Phase2Report {
        s_final: s.row_major().to_vec(),
        max_change_per_iter: trace.max_change_per_iter.clone(),
        converged: trace.converged,
        iterations: trace.iterations,
    }
}

/// Base strength of a CI claim: 0 below the significance level, scaled
/// excess above it otherwise.
pub fn base_strength(p: f64, alpha: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    if p < alpha {
        0.0
    } else {
        (p - alpha) / (1.0 - alpha)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

/// The combination of `items` with lexicographic rank `r` among all
/// k-subsets.
fn unrank_combination(mut r: u128, items: &[NodeId], k: usize) -> Vec<NodeId> {
    let m = items.len();
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    let mut left = k;
    while left > 0 {
        for a in start..m {
            let c = binomial(m - a - 1, left - 1);
            if r < c {
                out.push(items[a]);
                start = a + 1;
                left -= 1;
                break;
            }
            r -= c;
        }
    }
    out
}

/// The k-subsets of `items` to test for one pair: all of them (in
/// lexicographic order) when there are at most `cap`, otherwise `cap`
/// distinct subsets drawn uniformly with the given seed.
fn conditioning_sets(items: &[NodeId], k: usize, cap: usize, seed: u64) -> Vec<Vec<NodeId>> {
    use rand::Rng;
    use rand::SeedableRng;

    let total = binomial(items.len(), k);
    if total <= cap as u128 {
        let mut out = Vec::with_capacity(total as usize);
        for r in 0..total {
            out.push(unrank_combination(r, items, k));
        }
        return out;
    }
    // Floyd's sampling of `cap` distinct ranks
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut ranks = std::collections::BTreeSet::new();
    for j in (total - cap as u128)..total {
        let t = rng.random_range(0..=j);
        if !ranks.insert(t) {
            ranks.insert(j);
        }
    }
    ranks.into_iter().map(|r| unrank_combination(r, items, k)).collect()
}

fn sampler_seed(seed: u64, x: NodeId, y: NodeId, k: usize) -> u64 {
    let mut h = seed;
    for v in [x as u64, y as u64, k as u64] {
        h = splitmix64(h ^ v);
    }
    h
}

/// Phase I: per-pair conditioning-set search. A pair stays a candidate edge
/// while any tested set rejects independence below `delta_cand`; the pool
/// keeps the argmax-p test as the pair's representative argument.
///
/// Degenerate tests (`effective == false`, i.e. zero degrees of freedom after
/// stratum cleanup) report p = 1 as a no-evidence convention. Letting them win
/// the argmax would hand full attack strength to pairs that merely became
/// constant under conditioning, e.g. a child of a deterministic gate, so the
/// representative is chosen among effective tests whenever any exist.
pub fn phase1_candidates(
    provider: &dyn CiProvider,
    n_vars: usize,
    params: &QacdParams,
) -> (Skeleton, CiPool) {
    let mut skel = Skeleton::new(n_vars);
    let mut args = Vec::with_capacity(n_vars * (n_vars.saturating_sub(1)) / 2);
    for x in 0..n_vars {
        for y in (x + 1)..n_vars {
            let others: Vec<NodeId> = (0..n_vars).filter(|&v| v != x && v != y).collect();
            let mut p_min = f64::INFINITY;
            let mut best_p = f64::NEG_INFINITY;
            let mut best_z: Vec<NodeId> = Vec::new();
            let mut best_effective = false;
            let mut consider = |z: &[NodeId]| {
                let r = provider.query(&CiQuery::new(x, y, z));
                p_min = p_min.min(r.p_value);
                let better = if r.effective != best_effective {
                    r.effective
                } else {
                    r.p_value > best_p
                        || (r.p_value == best_p
                            && (z.len(), z) < (best_z.len(), best_z.as_slice()))
                };
                if better {
                    best_p = r.p_value;
                    best_z = z.to_vec();
                    best_effective = r.effective;
                }
            };
            consider(&[]);
            for k in 1..=params.k_max.min(others.len()) {
                let sets = conditioning_sets(
                    &others,
                    k,
                    params.max_sets_per_size,
                    sampler_seed(params.seed, x, y, k),
                );
                for z in &sets {
                    consider(z);
                }
            }
            if p_min < params.delta_cand {
                skel.add_edge(x, y).expect("pair indices are in range");
            }
            args.push(IndependenceArgument {
                x,
                y,
                z_star: best_z,
                p: best_p,
                sigma0: base_strength(best_p, params.alpha),
            });
        }
    }
    (skel, CiPool { n: n_vars, args })
}

/// All length-2 connections over the candidate skeleton, in canonical
/// (x, y, w) order. Fixed for the whole of Phase II.
pub fn witness_triples(cand: &Skeleton) -> Vec<WitnessTriple> {
    let n = cand.n();
    let mut out = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            for w in 0..n {
                if w != x && w != y && cand.has_edge(x, w) && cand.has_edge(w, y) {
                    out.push(WitnessTriple { x, w, y });
                }
            }
        }
    }
    out
}

/// One round of attack evaluation against the current acceptabilities.
///
/// Every pool argument attenuates its own pair directly; every witness
/// triple whose witness is outside the argument's separating set attenuates
/// both bridging edges, weighted by how acceptable the bridges currently
/// are. Factors combine multiplicatively and an empty product is 1.
pub fn build_attenuation(
    s: &AcceptabilityMatrix,
    triples: &[WitnessTriple],
    pool: &CiPool,
    params: &QacdParams,
) -> AcceptabilityMatrix {
    let n = s.n();
    let mut a = AcceptabilityMatrix::zeros(n);
    for x in 0..n {
        for y in (x + 1)..n {
            a.set(x, y, 1.0);
        }
    }
    for arg in pool.arguments() {
        if arg.sigma0 == 0.0 {
            continue;
        }
        let f = a.get(arg.x, arg.y) * (1.0 - params.lambda * arg.sigma0);
        a.set(arg.x, arg.y, f);
    }
    for t in triples {
        let arg = pool.get(t.x, t.y);
        if arg.sigma0 == 0.0 || arg.z_star.contains(&t.w) {
            continue;
        }
        let f = 1.0 - 0.5 * params.lambda * arg.sigma0 * s.get(t.x, t.w) * s.get(t.w, t.y);
        a.set(t.x, t.w, a.get(t.x, t.w) * f);
        a.set(t.w, t.y, a.get(t.w, t.y) * f);
    }
    a
}

/// Entrywise product of the current acceptabilities and an attenuation
/// matrix.
pub fn dialectical_update(
    s: &AcceptabilityMatrix,
    a: &AcceptabilityMatrix,
) -> AcceptabilityMatrix {
    assert_eq!(s.n(), a.n());
    let mut out = s.clone();
    for (o, f) in out.data.iter_mut().zip(&a.data) {
        *o *= f;
    }
    out
}

/// Phase II: iterate attack evaluation and revision until the max-norm
/// change drops below epsilon or the budget runs out.
pub fn run_phase2(
    s0: &AcceptabilityMatrix,
    cand: &Skeleton,
    pool: &CiPool,
    params: &QacdParams,
) -> (AcceptabilityMatrix, QacdTrace) {
    let mut triples = witness_triples(cand);
    if !params.propagate_noncandidate_tau {
        triples.retain(|t| cand.has_edge(t.x, t.y));
    }
    let mut s = s0.clone();
    let mut trace = QacdTrace {
        max_change_per_iter: Vec::new(),
        converged: false,
        iterations: 0,
        snapshots: params.record_snapshots.then(Vec::new),
    };
    for _ in 0..params.t_max {
        let a = build_attenuation(&s, &triples, pool, params);
        let next = dialectical_update(&s, &a);
        let change = next.max_abs_diff(&s);
        trace.max_change_per_iter.push(change);
        trace.iterations += 1;
        if let Some(snaps) = &mut trace.snapshots {
            snaps.push(next.clone());
        }
        s = next;
        if change < params.epsilon {
            trace.converged = true;
            break;
        }
    }
    (s, trace)
}

/// Edges whose final acceptability clears the threshold (non-strict).
pub fn threshold_skeleton(s: &AcceptabilityMatrix, delta0: f64) -> Skeleton {
    let mut skel = Skeleton::new(s.n());
    for x in 0..s.n() {
        for y in (x + 1)..s.n() {
            if s.get(x, y) >= delta0 {
                skel.add_edge(x, y).expect("indices in range");
            }
        }
    }
    skel
}

/// Collider orientation from the pool's separating sets, then Meek closure:
/// an unshielded x - w - y becomes x -> w <- y exactly when w is outside
/// z_star of the pair's representative argument. Noisy pools can demand
/// contradictory orientations, so conflicts degrade to skipped arcs rather
/// than errors; the Result stays for interface stability.
pub fn orient(skel: &Skeleton, pool: &CiPool) -> Result<Pdag, GraphError> {
    Ok(pattern_from_separators_lenient(skel, |x, y, w| {
        pool.get(x, y).z_star.contains(&w)
    }))
}

/// The whole pipeline. Deterministic given the provider and params.
pub fn qacd_discover(
    provider: &dyn CiProvider,
    n_vars: usize,
    params: &QacdParams,
) -> Result<(Pdag, QacdTrace), GraphError> {
    let (cand, pool) = phase1_candidates(provider, n_vars, params);
    let s0 = AcceptabilityMatrix::from_candidates(&cand);
    let (s, trace) = run_phase2(&s0, &cand, &pool, params);
    let skel = threshold_skeleton(&s, params.delta0);
    let pdag = orient(&skel, &pool)?;
    Ok((pdag, trace))
}
