//! Stratified contingency tables and the Pearson chi-square test.

use std::collections::BTreeMap;

use crate::bn::Dataset;
use crate::ci::gamma::chi_square_sf;
use crate::ci::{CiQuery, CiResult};

/// Joint counts of x against y within one configuration of the conditioning
/// variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// The conditioning configuration, aligned with the query's z.
    pub config: Vec<u32>,
    /// counts[i][j]: x in state i, y in state j.
    pub counts: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

/// Splits the rows by conditioning configuration and tabulates x against y
/// inside each stratum. Only configurations that actually occur are
/// returned, in lexicographic order.
pub fn contingency_counts(d: &Dataset, q: &CiQuery) -> Vec<ContingencyTable> {
    let cx = d.cardinalities[q.x()] as usize;
    let cy = d.cardinalities[q.y()] as usize;
    let mut strata: BTreeMap<Vec<u32>, Vec<Vec<u64>>> = BTreeMap::new();
    let mut key = Vec::with_capacity(q.z().len());
    for r in 0..d.n_rows {
        key.clear();
        key.extend(q.z().iter().map(|&v| d.value(r, v)));
        let t = strata
            .entry(key.clone())
            .or_insert_with(|| vec![vec![0u64; cy]; cx]);
        t[d.value(r, q.x()) as usize][d.value(r, q.y()) as usize] += 1;
    }
    strata
        .into_iter()
        .map(|(config, counts)| ContingencyTable { config, counts })
        .collect()
}

/// Pearson chi-square test of x independent of y given z.
///
/// Strata with fewer than `min_stratum` rows are dropped. Within a stratum,
/// cells whose expected count is zero are skipped and the degrees of freedom
/// count only rows and columns with positive marginals. A test left with
/// zero degrees of freedom reports p = 1 and is flagged non-effective.
pub fn chi_square_ci(d: &Dataset, q: &CiQuery, min_stratum: u64) -> CiResult {
    let mut statistic = 0.0;
    let mut dof: u64 = 0;
    for t in contingency_counts(d, q) {
        let total = t.total();
        if total < min_stratum {
            continue;
        }
        let nx = t.counts.len();
        let ny = t.counts[0].len();
        let row_totals: Vec<u64> = t.counts.iter().map(|r| r.iter().sum()).collect();
        let col_totals: Vec<u64> =
            (0..ny).map(|j| t.counts.iter().map(|r| r[j]).sum()).collect();
        let rows_pos = row_totals.iter().filter(|&&v| v > 0).count() as u64;
        let cols_pos = col_totals.iter().filter(|&&v| v > 0).count() as u64;
        dof += (rows_pos - 1) * (cols_pos - 1);
        for i in 0..nx {
            if row_totals[i] == 0 {
                continue;
            }
            for j in 0..ny {
                if col_totals[j] == 0 {
                    continue;
                }
                let expected = row_totals[i] as f64 * col_totals[j] as f64 / total as f64;
                let diff = t.counts[i][j] as f64 - expected;
                statistic += diff * diff / expected;
            }
        }
    }
    if dof == 0 {
        return CiResult { p_value: 1.0, statistic, dof: 0, effective: false };
    }
    CiResult {
        p_value: chi_square_sf(statistic, dof),
        statistic,
        dof,
        effective: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Builds a dataset from explicit rows.
    fn dataset(cards: &[u32], rows: &[&[u32]]) -> Dataset {
        let mut columns = vec![Vec::with_capacity(rows.len()); cards.len()];
        for row in rows {
            assert_eq!(row.len(), cards.len());
            for (v, &val) in row.iter().enumerate() {
                columns[v].push(val);
            }
        }
        Dataset { n_rows: rows.len(), columns, cardinalities: cards.to_vec() }
    }

    fn repeat_rows(spec: &[(&[u32], usize)]) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        for &(row, times) in spec {
            for _ in 0..times {
                out.push(row.to_vec());
            }
        }
        out
    }

    #[test]
    fn unconditional_counts_are_the_joint_matrix() {
        let d = dataset(
            &[2, 2],
            &[&[0, 0], &[0, 1], &[1, 0], &[0, 0], &[1, 1], &[1, 1]],
        );
        let tables = contingency_counts(&d, &CiQuery::new(0, 1, &[]));
        assert_eq!(tables.len(), 1);
        assert_eq!(tables[0].config, Vec::<u32>::new());
        assert_eq!(tables[0].counts, vec![vec![2, 1], vec![1, 2]]);
    }

    #[test]
    fn binary_conditioner_partitions_the_rows() {
        let d = dataset(
            &[2, 2, 2],
            &[&[0, 0, 0], &[0, 1, 0], &[1, 0, 0], &[0, 0, 1], &[1, 1, 1], &[1, 1, 1]],
        );
        let tables = contingency_counts(&d, &CiQuery::new(0, 1, &[2]));
        assert_eq!(tables.len(), 2);
        assert_eq!(tables[0].config, vec![0]);
        assert_eq!(tables[0].counts, vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(tables[1].config, vec![1]);
        assert_eq!(tables[1].counts, vec![vec![1, 0], vec![0, 2]]);
        assert_eq!(tables.iter().map(|t| t.total()).sum::<u64>(), 6);
    }

    #[test]
    fn exactly_independent_table_scores_zero() {
        let rows = repeat_rows(&[
            (&[0, 0], 25),
            (&[0, 1], 25),
            (&[1, 0], 25),
            (&[1, 1], 25),
        ]);
        let refs: Vec<&[u32]> = rows.iter().map(|r| r.as_slice()).collect();
        let d = dataset(&[2, 2], &refs);
        let r = chi_square_ci(&d, &CiQuery::new(0, 1, &[]), 0);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.dof, 1);
        assert!(r.effective);
    }

    #[test]
    fn perfectly_dependent_table_scores_n() {
        let rows = repeat_rows(&[(&[0, 0], 50), (&[1, 1], 50)]);
        let refs: Vec<&[u32]> = rows.iter().map(|r| r.as_slice()).collect();
        let d = dataset(&[2, 2], &refs);
        let r = chi_square_ci(&d, &CiQuery::new(0, 1, &[]), 0);
        assert!((r.statistic - 100.0).abs() < 1e-9);
        assert_eq!(r.dof, 1);
        assert!(r.p_value < 1e-20);
    }

    #[test]
    fn constant_column_is_degenerate() {
        let rows = repeat_rows(&[(&[0, 0], 5), (&[0, 1], 5)]);
        let refs: Vec<&[u32]> = rows.iter().map(|r| r.as_slice()).collect();
        let d = dataset(&[2, 2], &refs);
        let r = chi_square_ci(&d, &CiQuery::new(0, 1, &[]), 0);
        assert!(!r.effective);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.dof, 0);
        assert_eq!(r.statistic, 0.0);
    }

    #[test]
    fn hand_checked_stratified_statistic() {
        // z = 0 stratum: [[20, 10], [10, 20]], n = 60, expected 15 each,
        // statistic = 4 * 25/15 = 20/3. z = 1 stratum: [[5, 5], [5, 5]],
        // statistic 0. Total dof 2.
        let rows = repeat_rows(&[
            (&[0, 0, 0], 20),
            (&[0, 1, 0], 10),
            (&[1, 0, 0], 10),
            (&[1, 1, 0], 20),
            (&[0, 0, 1], 5),
            (&[0, 1, 1], 5),
            (&[1, 0, 1], 5),
            (&[1, 1, 1], 5),
        ]);
        let refs: Vec<&[u32]> = rows.iter().map(|r| r.as_slice()).collect();
        let d = dataset(&[2, 2, 2], &refs);
        let r = chi_square_ci(&d, &CiQuery::new(0, 1, &[2]), 0);
        assert!((r.statistic - 20.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.dof, 2);
        assert!((r.p_value - chi_square_sf(20.0 / 3.0, 2)).abs() < 1e-15);
    }

    #[test]
    fn min_stratum_drops_small_tables() {
        let rows = repeat_rows(&[
            (&[0, 0, 0], 20),
            (&[0, 1, 0], 10),
            (&[1, 0, 0], 10),
            (&[1, 1, 0], 20),
            (&[0, 0, 1], 2),
            (&[1, 1, 1], 2),
        ]);
        let refs: Vec<&[u32]> = rows.iter().map(|r| r.as_slice()).collect();
        let d = dataset(&[2, 2, 2], &refs);
        let keep_all = chi_square_ci(&d, &CiQuery::new(0, 1, &[2]), 0);
        let dropped = chi_square_ci(&d, &CiQuery::new(0, 1, &[2]), 5);
        assert_eq!(keep_all.dof, 2);
        assert_eq!(dropped.dof, 1);
        assert!(dropped.statistic < keep_all.statistic);
    }

    #[test]
    fn row_order_does_not_matter() {
        let rows = repeat_rows(&[
            (&[0, 0, 1], 7),
            (&[1, 1, 0], 9),
            (&[0, 1, 0], 4),
            (&[1, 0, 1], 13),
            (&[0, 0, 0], 21),
        ]);
        let mut rev = rows.clone();
        rev.reverse();
        let refs: Vec<&[u32]> = rows.iter().map(|r| r.as_slice()).collect();
        let refs_rev: Vec<&[u32]> = rev.iter().map(|r| r.as_slice()).collect();
        let q = CiQuery::new(0, 1, &[2]);
        let a = chi_square_ci(&dataset(&[2, 2, 2], &refs), &q, 0);
        let b = chi_square_ci(&dataset(&[2, 2, 2], &refs_rev), &q, 0);
        assert_eq!(a, b);
    }
}
