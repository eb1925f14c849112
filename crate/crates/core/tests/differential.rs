//! Cross-checks of the core graph algorithms against the independent
//! reference implementations in qacd-testkit.

use qacd_core::graph::{
    consistent_extensions, cpdag_from_dag, d_separated, Dag, Pdag,
};
use qacd_core::metrics::sid_dag;
use qacd_testkit::dsep::d_separated_by_paths;
use qacd_testkit::gen::random_dag;
use qacd_testkit::mec::{enumerate_dags, mec_pattern, same_mec};
use qacd_testkit::sid::sid_by_paths;
use rand::prelude::IndexedRandom;
use rand::SeedableRng;

type Rng = rand_chacha::ChaCha8Rng;

fn subsets_up_to(pool: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for k in 1..=max.min(pool.len()) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.iter().map(|&i| pool[i]).collect());
            let mut i = k;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if idx[i] != pool.len() - k + i {
                    break;
                }
            }
            idx[i] += 1;
            for j in (i + 1)..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

#[test]
fn d_separation_agrees_with_path_enumeration() {
    let mut rng = Rng::seed_from_u64(101);
    for round in 0..60 {
        let n = 4 + (round % 3);
        let dag = random_dag(n, 0.4, &mut rng);
        for x in 0..n {
            for y in (x + 1)..n {
                let pool: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
                for z in subsets_up_to(&pool, 3) {
                    assert_eq!(
                        d_separated(&dag, x, y, &z),
                        d_separated_by_paths(&dag, x, y, &z),
                        "round {round}: disagree on ({x}, {y} | {z:?}) in {:?}",
                        dag.edges()
                    );
                }
            }
        }
    }
}

#[test]
fn cpdag_matches_exhaustive_mec_pattern_up_to_four_nodes() {
    for n in 1..=4 {
        let all = enumerate_dags(n);
        for d in &all {
            let expected = mec_pattern(d, &all);
            let got = cpdag_from_dag(d);
            assert_eq!(
                got.dump(),
                expected.dump(),
                "n={n}, dag={:?}",
                d.edges()
            );
        }
    }
}

#[test]
fn cpdag_extensions_are_exactly_the_mec() {
    let all = enumerate_dags(4);
    let mut rng = Rng::seed_from_u64(7);
    for _ in 0..40 {
        let d = all.choose(&mut rng).unwrap();
        let cpdag = cpdag_from_dag(d);
        let mut exts: Vec<String> = consistent_extensions(&cpdag, 10_000)
            .unwrap()
            .iter()
            .map(|e| format!("{:?}", e.edges()))
            .collect();
        exts.sort();
        let mut mec: Vec<String> = all
            .iter()
            .filter(|m| same_mec(d, m))
            .map(|m| format!("{:?}", m.edges()))
            .collect();
        mec.sort();
        assert_eq!(exts, mec, "dag={:?}", d.edges());
    }
}

#[test]
fn sid_agrees_with_adjustment_criterion_oracle() {
    let mut rng = Rng::seed_from_u64(55);
    for round in 0..120 {
        let n = 3 + (round % 4);
        let truth = random_dag(n, 0.45, &mut rng);
        let est = random_dag(n, 0.45, &mut rng);
        assert_eq!(
            sid_dag(&est, &truth),
            sid_by_paths(&truth, &est),
            "round {round}: est={:?}, truth={:?}",
            est.edges(),
            truth.edges()
        );
    }
}

#[test]
fn pdag_of_a_dag_extends_to_itself() {
    let mut rng = Rng::seed_from_u64(9);
    for _ in 0..30 {
        let d = random_dag(5, 0.4, &mut rng);
        let exts = consistent_extensions(&Pdag::from_dag(&d), 10).unwrap();
        assert_eq!(exts.len(), 1);
        assert_eq!(exts[0], d);
    }
}

#[test]
fn cpdag_skeletons_and_colliders_survive_the_round_trip() {
    let mut rng = Rng::seed_from_u64(13);
    for _ in 0..30 {
        let d = random_dag(6, 0.35, &mut rng);
        let cpdag = cpdag_from_dag(&d);
        assert_eq!(cpdag.skeleton().edges().count(), d.n_edges());
        for ext in consistent_extensions(&cpdag, 10_000).unwrap() {
            assert!(same_mec(&d, &ext), "extension left the class");
        }
    }
}

#[test]
fn dag_conversions_are_consistent() {
    let edges = [(0usize, 1usize), (0, 2), (1, 3), (2, 3)];
    let d = Dag::from_edges(4, &edges.iter().copied().collect::<Vec<_>>()[..]).unwrap();
    let p = Pdag::from_dag(&d);
    assert_eq!(p.to_dag().unwrap(), d);
}
