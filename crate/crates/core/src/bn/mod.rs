//! Discrete Bayesian networks: the model type, BIF ingestion, forward
//! sampling, and exact conditional-independence answers from the structure.

mod bif;

pub use bif::{emit_bif, parse_bif, BifError};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{cpdag_from_dag, d_separated, Dag, NodeId, Pdag};

/// A named categorical variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    /// State labels in declaration order; the category code of a label is its
    /// position here.
    pub states: Vec<String>,
}

impl Variable {
    pub fn cardinality(&self) -> usize {
        self.states.len()
    }
}

/// Conditional probability table of one node given its parents.
///
/// Rows are indexed by the mixed-radix code of the parent states, with the
/// last parent in `parents` varying fastest. Each row is a distribution over
/// the child's states.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    pub child: NodeId,
    pub parents: Vec<NodeId>,
    pub table: Vec<Vec<f64>>,
}

impl Cpt {
    /// Index of the row holding the distribution for the given parent states
    /// (in `parents` order).
    pub fn row_index(&self, parent_states: &[usize], cards: &[usize]) -> usize {
        debug_assert_eq!(parent_states.len(), self.parents.len());
        let mut idx = 0;
        for (k, &p) in self.parents.iter().enumerate() {
            idx = idx * cards[p] + parent_states[k];
        }
        idx
    }
}

/// A discrete Bayesian network: variables, structure, and one CPT per node.
#[derive(Debug, Clone)]
pub struct BayesNet {
    pub name: String,
    pub variables: Vec<Variable>,
    pub dag: Dag,
    pub cpts: Vec<Cpt>,
}

impl BayesNet {
    pub fn n(&self) -> usize {
        self.variables.len()
    }

    pub fn node_index(&self, name: &str) -> Option<NodeId> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.variables.iter().map(|v| v.cardinality()).collect()
    }

    /// Number of free parameters: for each node, (cardinality - 1) per
    /// parent configuration.
    pub fn n_parameters(&self) -> usize {
        let cards = self.cardinalities();
        self.cpts
            .iter()
            .map(|c| {
                let rows: usize = c.parents.iter().map(|&p| cards[p]).product();
                rows * (cards[c.child] - 1)
            })
            .sum()
    }
}

/// Column-major table of sampled category codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub n_rows: usize,
    /// columns[v][r] is the category of variable v in row r.
    pub columns: Vec<Vec<u32>>,
    pub cardinalities: Vec<u32>,
}

impl Dataset {
    pub fn n_vars(&self) -> usize {
        self.columns.len()
    }

    #[inline]
    pub fn value(&self, row: usize, var: usize) -> u32 {
        self.columns[var][row]
    }
}

/// Ancestral sampling: draws `n` i.i.d. rows, filling each row in topological
/// order by inverse-CDF lookup in the node's CPT row. Deterministic in
/// `seed` across platforms.
pub fn forward_sample(net: &BayesNet, n: usize, seed: u64) -> Dataset {
    let order = net.dag.topological_order();
    let cards = net.cardinalities();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns: Vec<Vec<u32>> = cards.iter().map(|_| vec![0u32; n]).collect();
    let mut state = vec![0usize; net.n()];
    let mut parent_states = Vec::new();
    for row in 0..n {
        for &v in &order {
            let cpt = &net.cpts[v];
            parent_states.clear();
            parent_states.extend(cpt.parents.iter().map(|&p| state[p]));
            let dist = &cpt.table[cpt.row_index(&parent_states, &cards)];
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut drawn = dist.len() - 1;
            for (k, &p) in dist.iter().enumerate() {
                acc += p;
                if u < acc {
                    drawn = k;
                    break;
                }
            }
            state[v] = drawn;
            columns[v][row] = drawn as u32;
        }
    }
    Dataset {
        n_rows: n,
        columns,
        cardinalities: cards.iter().map(|&c| c as u32).collect(),
    }
}

/// Exact CI answer read off the structure: 1.0 when x and y are d-separated
/// by z, else 0.0.
pub fn oracle_ci(net: &BayesNet, x: NodeId, y: NodeId, z: &[NodeId]) -> f64 {
    if d_separated(&net.dag, x, y, z) {
        1.0
    } else {
        0.0
    }
}

/// The pattern of the network's DAG.
pub fn true_cpdag(net: &BayesNet) -> Pdag {
    cpdag_from_dag(&net.dag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coin_chain() -> BayesNet {
        // A -> B with strong coupling
        BayesNet {
            name: "coin".into(),
            variables: vec![
                Variable { name: "a".into(), states: vec!["t".into(), "f".into()] },
                Variable { name: "b".into(), states: vec!["t".into(), "f".into()] },
            ],
            dag: Dag::from_edges(2, &[(0, 1)]).unwrap(),
            cpts: vec![
                Cpt { child: 0, parents: vec![], table: vec![vec![0.3, 0.7]] },
                Cpt { child: 1, parents: vec![0], table: vec![vec![0.9, 0.1], vec![0.2, 0.8]] },
            ],
        }
    }

    #[test]
    fn deterministic_cpts_force_rows() {
        let net = BayesNet {
            name: "det".into(),
            variables: vec![
                Variable { name: "a".into(), states: vec!["x".into(), "y".into()] },
                Variable { name: "b".into(), states: vec!["x".into(), "y".into()] },
            ],
            dag: Dag::from_edges(2, &[(0, 1)]).unwrap(),
            cpts: vec![
                Cpt { child: 0, parents: vec![], table: vec![vec![0.0, 1.0]] },
                Cpt { child: 1, parents: vec![0], table: vec![vec![0.0, 1.0], vec![1.0, 0.0]] },
            ],
        };
        let d = forward_sample(&net, 64, 9);
        assert!(d.columns[0].iter().all(|&v| v == 1));
        assert!(d.columns[1].iter().all(|&v| v == 0));
    }

    #[test]
    fn same_seed_same_rows() {
        let net = coin_chain();
        assert_eq!(forward_sample(&net, 500, 42), forward_sample(&net, 500, 42));
        assert_ne!(forward_sample(&net, 500, 42), forward_sample(&net, 500, 43));
    }

    #[test]
    fn root_marginal_concentrates() {
        let net = coin_chain();
        let d = forward_sample(&net, 100_000, 1);
        let freq = d.columns[0].iter().filter(|&&v| v == 0).count() as f64 / 1e5;
        assert!((freq - 0.3).abs() < 0.01, "got {freq}");
    }

    #[test]
    fn oracle_answers_match_structure() {
        let net = BayesNet {
            name: "chain".into(),
            variables: (0..3)
                .map(|i| Variable {
                    name: format!("v{i}"),
                    states: vec!["0".into(), "1".into()],
                })
                .collect(),
            dag: Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap(),
            cpts: vec![
                Cpt { child: 0, parents: vec![], table: vec![vec![0.5, 0.5]] },
                Cpt { child: 1, parents: vec![0], table: vec![vec![0.8, 0.2], vec![0.2, 0.8]] },
                Cpt { child: 2, parents: vec![1], table: vec![vec![0.8, 0.2], vec![0.2, 0.8]] },
            ],
        };
        assert_eq!(oracle_ci(&net, 0, 2, &[1]), 1.0);
        assert_eq!(oracle_ci(&net, 0, 2, &[]), 0.0);
        assert_eq!(oracle_ci(&net, 2, 0, &[1]), oracle_ci(&net, 0, 2, &[1]));
        let p = true_cpdag(&net);
        assert!(p.undirected(0, 1) && p.undirected(1, 2));
    }

    #[test]
    fn parameter_count_formula() {
        let net = coin_chain();
        assert_eq!(net.n_parameters(), 1 + 2);
    }

    #[test]
    fn cpt_row_indexing_is_last_parent_fastest() {
        let cpt = Cpt { child: 3, parents: vec![1, 0], table: vec![] };
        let cards = vec![2, 3, 2, 2];
        // parents (1,0): radix 3 then 2
        assert_eq!(cpt.row_index(&[0, 0], &cards), 0);
        assert_eq!(cpt.row_index(&[0, 1], &cards), 1);
        assert_eq!(cpt.row_index(&[1, 0], &cards), 2);
        assert_eq!(cpt.row_index(&[2, 1], &cards), 5);
    }
}
