//! Random structures for property and differential tests.

use qacd_core::graph::Dag;
use rand::seq::SliceRandom;
use rand::Rng;

/// A DAG drawn by shuffling the vertices into a hidden order and keeping each
/// forward pair with probability `density`.
pub fn random_dag(n: usize, density: f64, rng: &mut impl Rng) -> Dag {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.random::<f64>() < density {
                edges.push((order[a], order[b]));
            }
        }
    }
    Dag::from_edges(n, &edges).expect("forward edges along an order are acyclic")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn densities_hit_the_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(random_dag(6, 0.0, &mut rng).n_edges(), 0);
        assert_eq!(random_dag(6, 1.0, &mut rng).n_edges(), 15);
        let mid = random_dag(30, 0.5, &mut rng).n_edges();
        assert!(mid > 120 && mid < 320);
    }
}
