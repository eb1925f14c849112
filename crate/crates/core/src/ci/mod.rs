//! Conditional-independence testing: canonical queries, a provider
//! abstraction over data-driven and oracle answers, and caching.

mod gamma;
mod table;

pub use gamma::{chi_square_sf, gamma_q, ln_gamma};
pub use table::{chi_square_ci, contingency_counts, ContingencyTable};

use std::collections::HashMap;
use std::sync::RwLock;

use crate::bn::{oracle_ci, BayesNet, Dataset};
use crate::graph::NodeId;

/// Is x independent of y given z? Stored canonically: endpoints ordered,
/// conditioning set sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CiQuery {
    x: NodeId,
    y: NodeId,
    z: Vec<NodeId>,
}

impl CiQuery {
    /// # Panics
    ///
    /// If x == y or the conditioning set touches an endpoint.
    pub fn new(x: NodeId, y: NodeId, z: &[NodeId]) -> Self {
        assert_ne!(x, y, "cannot test a variable against itself");
        let (x, y) = if x < y { (x, y) } else { (y, x) };
        let mut z = z.to_vec();
        z.sort_unstable();
        z.dedup();
        assert!(
            !z.contains(&x) && !z.contains(&y),
            "conditioning set must be disjoint from the tested pair"
        );
        CiQuery { x, y, z }
    }

    pub fn x(&self) -> NodeId {
        self.x
    }

    pub fn y(&self) -> NodeId {
        self.y
    }

    pub fn z(&self) -> &[NodeId] {
        &self.z
    }
}

/// Outcome of one CI test. `effective` is false when the data carried no
/// usable evidence (zero degrees of freedom after degeneracy handling).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiResult {
    pub p_value: f64,
    pub statistic: f64,
    pub dof: u64,
    pub effective: bool,
}

/// A deterministic source of conditional-independence answers.
pub trait CiProvider: Sync {
    /// Number of variables queries may range over.
    fn n_vars(&self) -> usize;

    fn query(&self, q: &CiQuery) -> CiResult;
}

/// Pearson chi-square tests over a dataset.
pub struct ChiSquareProvider<'a> {
    data: &'a Dataset,
    min_stratum: u64,
}

impl<'a> ChiSquareProvider<'a> {
    pub fn new(data: &'a Dataset) -> Self {
        ChiSquareProvider { data, min_stratum: 0 }
    }

    /// Drop strata with fewer than `min_stratum` rows before testing.
    pub fn with_min_stratum(data: &'a Dataset, min_stratum: u64) -> Self {
        ChiSquareProvider { data, min_stratum }
    }
}

impl CiProvider for ChiSquareProvider<'_> {
    fn n_vars(&self) -> usize {
        self.data.n_vars()
    }

    fn query(&self, q: &CiQuery) -> CiResult {
        chi_square_ci(self.data, q, self.min_stratum)
    }
}

/// Answers queries exactly from a network's structure via d-separation:
/// p = 1 for independence, p = 0 otherwise.
pub struct OracleProvider<'a> {
    net: &'a BayesNet,
}

impl<'a> OracleProvider<'a> {
    pub fn new(net: &'a BayesNet) -> Self {
        OracleProvider { net }
    }
}

impl CiProvider for OracleProvider<'_> {
    fn n_vars(&self) -> usize {
        self.net.n()
    }

    fn query(&self, q: &CiQuery) -> CiResult {
        let p = oracle_ci(self.net, q.x(), q.y(), q.z());
        CiResult { p_value: p, statistic: 0.0, dof: 0, effective: true }
    }
}

/// Concurrent query cache. All writers compute identical values for a given
/// key, so a racing double insert is benign.
#[derive(Default)]
pub struct CiCache {
    map: RwLock<HashMap<CiQuery, CiResult>>,
}

impl CiCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, q: &CiQuery) -> Option<CiResult> {
        self.map.read().unwrap().get(q).copied()
    }

    pub fn insert(&self, q: CiQuery, r: CiResult) {
        self.map.write().unwrap().insert(q, r);
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Memoizing wrapper with behavior identical to the wrapped provider.
pub struct Cached<P> {
    inner: P,
    cache: CiCache,
}

impl<P: CiProvider> Cached<P> {
    pub fn new(inner: P) -> Self {
        cached(inner, CiCache::new())
    }

    pub fn cache(&self) -> &CiCache {
        &self.cache
    }
}

/// Wraps `provider` so repeated queries are served from `cache`.
pub fn cached<P: CiProvider>(provider: P, cache: CiCache) -> Cached<P> {
    Cached { inner: provider, cache }
}

impl<P: CiProvider> CiProvider for Cached<P> {
    fn n_vars(&self) -> usize {
        self.inner.n_vars()
    }

    fn query(&self, q: &CiQuery) -> CiResult {
        if let Some(r) = self.cache.get(q) {
            return r;
        }
        let r = self.inner.query(q);
        self.cache.insert(q.clone(), r);
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{forward_sample, parse_bif};
    use std::sync::atomic::{AtomicUsize, Ordering};

    const CHAIN_BIF: &str = r#"
network chain {
}
variable A { type discrete [ 2 ] { a0, a1 }; }
variable B { type discrete [ 2 ] { b0, b1 }; }
variable C { type discrete [ 2 ] { c0, c1 }; }
probability ( A ) { table 0.4, 0.6; }
probability ( B | A ) { (a0) 0.85, 0.15; (a1) 0.15, 0.85; }
probability ( C | B ) { (b0) 0.85, 0.15; (b1) 0.15, 0.85; }
"#;

    struct Counting<'a> {
        inner: ChiSquareProvider<'a>,
        calls: AtomicUsize,
    }

    impl CiProvider for Counting<'_> {
        fn n_vars(&self) -> usize {
            self.inner.n_vars()
        }
        fn query(&self, q: &CiQuery) -> CiResult {
            self.calls.fetch_add(1, Ordering::Relaxed);
            self.inner.query(q)
        }
    }

    #[test]
    fn query_canonicalization() {
        assert_eq!(CiQuery::new(3, 1, &[0, 2]), CiQuery::new(1, 3, &[2, 0, 2]));
        let q = CiQuery::new(5, 2, &[4, 0]);
        assert_eq!((q.x(), q.y()), (2, 5));
        assert_eq!(q.z(), &[0, 4]);
    }

    #[test]
    #[should_panic]
    fn conditioning_on_an_endpoint_is_rejected() {
        CiQuery::new(0, 1, &[1]);
    }

    #[test]
    fn cache_serves_repeats_without_recomputation() {
        let net = parse_bif(CHAIN_BIF).unwrap();
        let data = forward_sample(&net, 2000, 3);
        let counting = Counting {
            inner: ChiSquareProvider::new(&data),
            calls: AtomicUsize::new(0),
        };
        let provider = Cached::new(counting);
        let q = CiQuery::new(0, 2, &[1]);
        let first = provider.query(&q);
        let second = provider.query(&CiQuery::new(2, 0, &[1]));
        assert_eq!(first, second);
        assert_eq!(provider.inner.calls.load(Ordering::Relaxed), 1);
        assert_eq!(provider.cache().len(), 1);
    }

    #[test]
    fn cached_provider_is_transparent() {
        let net = parse_bif(CHAIN_BIF).unwrap();
        let data = forward_sample(&net, 1000, 11);
        let plain = ChiSquareProvider::new(&data);
        let wrapped = Cached::new(ChiSquareProvider::new(&data));
        let mut queries = Vec::new();
        for x in 0..3usize {
            for y in 0..3usize {
                if x == y {
                    continue;
                }
                let rest: Vec<usize> = (0..3).filter(|v| *v != x && *v != y).collect();
                queries.push(CiQuery::new(x, y, &[]));
                queries.push(CiQuery::new(x, y, &rest));
            }
        }
        for _ in 0..3 {
            for q in &queries {
                assert_eq!(plain.query(q), wrapped.query(q));
            }
        }
    }

    #[test]
    fn oracle_provider_reads_the_structure() {
        let net = parse_bif(CHAIN_BIF).unwrap();
        let oracle = OracleProvider::new(&net);
        assert_eq!(oracle.n_vars(), 3);
        assert_eq!(oracle.query(&CiQuery::new(0, 2, &[1])).p_value, 1.0);
        assert_eq!(oracle.query(&CiQuery::new(0, 2, &[])).p_value, 0.0);
        assert_eq!(oracle.query(&CiQuery::new(0, 1, &[2])).p_value, 0.0);
    }

    #[test]
    fn chain_data_separates_and_links_as_expected() {
        // A -> B -> C with strong links: A ⊥ C | B should be retained and
        // A ⊥ C rejected in nearly all seeds.
        let net = parse_bif(CHAIN_BIF).unwrap();
        let mut hold = 0;
        let mut reject = 0;
        let trials = 20;
        for seed in 0..trials {
            let data = forward_sample(&net, 50_000, seed);
            let p = ChiSquareProvider::new(&data);
            if p.query(&CiQuery::new(0, 2, &[1])).p_value >= 0.05 {
                hold += 1;
            }
            if p.query(&CiQuery::new(0, 2, &[])).p_value < 0.05 {
                reject += 1;
            }
        }
        assert!(hold >= 18, "conditional independence held in {hold}/{trials}");
        assert!(reject >= 18, "marginal dependence detected in {reject}/{trials}");
    }
}
