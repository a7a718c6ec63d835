//! Clustering quality and constraint-faithfulness metrics.

use crate::graph::SparseGraph;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

/// Co-occurrence counts between two labelings, with marginals.
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    counts: Vec<Vec<usize>>,
    row_marginals: Vec<usize>,
    col_marginals: Vec<usize>,
    total: usize,
}

impl ContingencyTable {
    pub fn new(a: &[usize], b: &[usize]) -> Result<Self, MetricsError> {
        if a.len() != b.len() {
            return Err(MetricsError::LengthMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        let ka = a.iter().max().map_or(0, |&m| m + 1);
        let kb = b.iter().max().map_or(0, |&m| m + 1);
        let mut counts = vec![vec![0usize; kb]; ka];
        for (&x, &y) in a.iter().zip(b) {
            counts[x][y] += 1;
        }
        let row_marginals: Vec<usize> = counts.iter().map(|r| r.iter().sum()).collect();
        let col_marginals: Vec<usize> = (0..kb)
            .map(|j| counts.iter().map(|r| r[j]).sum())
            .collect();
        Ok(ContingencyTable {
            counts,
            row_marginals,
            col_marginals,
            total: a.len(),
        })
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn row_marginals(&self) -> &[usize] {
        &self.row_marginals
    }

    pub fn col_marginals(&self) -> &[usize] {
        &self.col_marginals
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// True when the two labelings induce the same partition (the table is a
    /// permutation structure: one nonzero per row and per column).
    fn is_relabeling(&self) -> bool {
        let rows_ok = self
            .counts
            .iter()
            .all(|r| r.iter().filter(|&&c| c > 0).count() <= 1);
        let cols_ok = (0..self.col_marginals.len())
            .all(|j| self.counts.iter().filter(|r| r[j] > 0).count() <= 1);
        rows_ok && cols_ok
    }
}

fn comb2(x: usize) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

/// Hubert–Arabie adjusted Rand index between two labelings. 1 means the
/// partitions agree up to a relabeling; values can go as low as −0.5.
pub fn ari(a: &[usize], b: &[usize]) -> Result<f64, MetricsError> {
    let table = ContingencyTable::new(a, b)?;
    if table.is_relabeling() {
        return Ok(1.0);
    }
    let sum_cells: f64 = table
        .counts()
        .iter()
        .flat_map(|r| r.iter())
        .map(|&c| comb2(c))
        .sum();
    let sum_rows: f64 = table.row_marginals().iter().map(|&c| comb2(c)).sum();
    let sum_cols: f64 = table.col_marginals().iter().map(|&c| comb2(c)).sum();
    let pairs = comb2(table.total());
    if pairs == 0.0 {
        return Ok(1.0);
    }
    let expected = sum_rows * sum_cols / pairs;
    let max_index = 0.5 * (sum_rows + sum_cols);
    let denom = max_index - expected;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((sum_cells - expected) / denom)
}

/// `KL(p ‖ q) = Σ_j p_j ln(p_j / q_j)` with `0·ln 0 = 0`; returns `+∞` when
/// `q` vanishes somewhere `p` does not.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64, MetricsError> {
    if p.len() != q.len() {
        return Err(MetricsError::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut kl = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(f64::INFINITY);
        }
        kl += pi * (pi / qi).ln();
    }
    Ok(kl)
}

/// Number of clusters a labeling spans (max label + 1).
fn label_count(assignment: &[usize]) -> usize {
    assignment.iter().max().map_or(0, |&m| m + 1)
}

/// Per-cluster cut weights: entry `j` sums the weight of edges leaving
/// cluster `j`, so each cross edge contributes to the terms of both its
/// endpoints' clusters.
fn cluster_cuts(g: &SparseGraph, assignment: &[usize]) -> Vec<f64> {
    assert_eq!(assignment.len(), g.n(), "one label per node");
    let k = label_count(assignment);
    let mut cuts = vec![0.0; k];
    for (i, j, w) in g.entries() {
        if i != j && assignment[i] != assignment[j] {
            cuts[assignment[i]] += w;
        }
    }
    cuts
}

/// Total cut value `Σ_j cut(A_j)`.
pub fn cut_value(g: &SparseGraph, assignment: &[usize]) -> f64 {
    cluster_cuts(g, assignment).iter().sum()
}

/// Normalized cut: each cluster's cut divided by its volume (sum of member
/// degrees). Empty clusters contribute 0.
pub fn ncut_value(g: &SparseGraph, assignment: &[usize]) -> f64 {
    let cuts = cluster_cuts(g, assignment);
    let degrees = g.degrees();
    let mut volumes = vec![0.0; cuts.len()];
    for (i, &a) in assignment.iter().enumerate() {
        volumes[a] += degrees[i];
    }
    normalized_sum(&cuts, &volumes)
}

/// Ratio cut: each cluster's cut divided by its cardinality. Empty clusters
/// contribute 0.
pub fn rcut_value(g: &SparseGraph, assignment: &[usize]) -> f64 {
    let cuts = cluster_cuts(g, assignment);
    let mut sizes = vec![0.0; cuts.len()];
    for &a in assignment {
        sizes[a] += 1.0;
    }
    normalized_sum(&cuts, &sizes)
}

fn normalized_sum(cuts: &[f64], denoms: &[f64]) -> f64 {
    let mut total = 0.0;
    for (j, (&c, &d)) in cuts.iter().zip(denoms).enumerate() {
        if d > 0.0 {
            total += c / d;
        } else if c > 0.0 {
            log::warn!("cluster {j} is empty but has cut weight; treating its term as 0");
        } else {
            log::warn!("cluster {j} is empty; treating its term as 0");
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Laplacian, LaplacianKind};
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Pair-counting reference: agreement over all C(n,2) pairs, adjusted.
    fn ari_pair_oracle(a: &[usize], b: &[usize]) -> f64 {
        let n = a.len();
        let (mut n11, mut n00, mut n10, mut n01) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for i in 0..n {
            for j in i + 1..n {
                let same_a = a[i] == a[j];
                let same_b = b[i] == b[j];
                match (same_a, same_b) {
                    (true, true) => n11 += 1.0,
                    (false, false) => n00 += 1.0,
                    (true, false) => n10 += 1.0,
                    (false, true) => n01 += 1.0,
                }
            }
        }
        let total = n11 + n00 + n10 + n01;
        let expected = (n11 + n10) * (n11 + n01) / total;
        let max_index = 0.5 * ((n11 + n10) + (n11 + n01));
        if max_index - expected == 0.0 {
            return if n10 + n01 == 0.0 { 1.0 } else { 0.0 };
        }
        (n11 - expected) / (max_index - expected)
    }

    #[test]
    fn contingency_marginals_consistent() {
        let t = ContingencyTable::new(&[0, 0, 1, 2, 2], &[1, 1, 0, 0, 1]).unwrap();
        assert_eq!(t.total(), 5);
        assert_eq!(t.row_marginals().iter().sum::<usize>(), 5);
        assert_eq!(t.col_marginals().iter().sum::<usize>(), 5);
        for (i, row) in t.counts().iter().enumerate() {
            assert_eq!(row.iter().sum::<usize>(), t.row_marginals()[i]);
        }
        for j in 0..t.col_marginals().len() {
            let col: usize = t.counts().iter().map(|r| r[j]).sum();
            assert_eq!(col, t.col_marginals()[j]);
        }
    }

    #[test]
    fn ari_examples() {
        assert_eq!(ari(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap(), 1.0);
        assert_eq!(ari(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 1.0);
        let crossing = ari(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap();
        assert_abs_diff_eq!(
            crossing,
            ari_pair_oracle(&[0, 0, 1, 1], &[0, 1, 0, 1]),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(crossing, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn ari_matches_pair_oracle_randomly() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let n = rng.gen_range(2..30);
            let ka = rng.gen_range(1..5);
            let kb = rng.gen_range(1..5);
            let a: Vec<usize> = (0..n).map(|_| rng.gen_range(0..ka)).collect();
            let b: Vec<usize> = (0..n).map(|_| rng.gen_range(0..kb)).collect();
            let fast = ari(&a, &b).unwrap();
            let slow = ari_pair_oracle(&a, &b);
            assert_abs_diff_eq!(fast, slow, epsilon = 1e-10);
            // symmetry
            assert_abs_diff_eq!(fast, ari(&b, &a).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn ari_relabel_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let n = rng.gen_range(3..25);
            let a: Vec<usize> = (0..n).map(|_| rng.gen_range(0..4)).collect();
            let b: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            // relabel a through a fixed permutation of {0..3}
            let perm = [2usize, 0, 3, 1];
            let a2: Vec<usize> = a.iter().map(|&x| perm[x]).collect();
            assert_eq!(ari(&a, &b).unwrap(), ari(&a2, &b).unwrap());
        }
    }

    #[test]
    fn ari_degenerate_cases() {
        // both all-one-cluster: identical up to relabeling
        assert_eq!(ari(&[0, 0, 0], &[1, 1, 1]).unwrap(), 1.0);
        // one flat, one split: zero denominator guard
        assert_eq!(ari(&[0, 0, 0, 0], &[0, 0, 1, 1]).unwrap(), 0.0);
        // length mismatch
        assert!(matches!(
            ari(&[0, 1], &[0, 1, 1]),
            Err(MetricsError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_divergence(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        assert_abs_diff_eq!(
            kl_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap(),
            2.0f64.ln(),
            epsilon = 1e-15
        );
        assert_eq!(
            kl_divergence(&[0.5, 0.5], &[1.0, 0.0]).unwrap(),
            f64::INFINITY
        );
        let p = [0.2, 0.3, 0.5];
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        assert!(matches!(
            kl_divergence(&[1.0], &[0.5, 0.5]),
            Err(MetricsError::LengthMismatch { .. })
        ));
    }

    fn two_cliques_bridge(w: f64) -> SparseGraph {
        SparseGraph::from_undirected_edges(4, &[(0, 1, 1.0), (2, 3, 1.0), (1, 2, w)]).unwrap()
    }

    #[test]
    fn cut_examples() {
        let disjoint =
            SparseGraph::from_undirected_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let split = [0, 0, 1, 1];
        assert_eq!(cut_value(&disjoint, &split), 0.0);
        assert_eq!(ncut_value(&disjoint, &split), 0.0);
        assert_eq!(rcut_value(&disjoint, &split), 0.0);

        // bridge counted once from each side
        let bridged = two_cliques_bridge(0.75);
        assert_abs_diff_eq!(cut_value(&bridged, &split), 1.5, epsilon = 1e-15);

        // unit bridge: volume 3 per side (degrees 1 + 2), so ncut = 2/3
        let unit = two_cliques_bridge(1.0);
        assert_abs_diff_eq!(ncut_value(&unit, &split), 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rcut_value(&unit, &split), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_cluster_contributes_zero() {
        let g = two_cliques_bridge(1.0);
        // labels only use clusters 0 and 2; cluster 1 is empty
        let labels = [0, 0, 2, 2];
        assert_abs_diff_eq!(ncut_value(&g, &labels), 2.0 / 3.0, epsilon = 1e-12);
        let flat = [0, 0, 0, 0];
        assert_eq!(cut_value(&g, &flat), 0.0);
        assert_eq!(ncut_value(&g, &flat), 0.0);
    }

    #[test]
    fn cut_equals_indicator_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.gen_range(4..30);
            let g = crate::graph::synth::erdos_renyi(n, 0.3, rng.gen());
            let k = rng.gen_range(2..5);
            let assignment: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let lap = Laplacian::build(&g, LaplacianKind::Unnormalized);
            let mut x = Array2::zeros((n, k));
            for (i, &a) in assignment.iter().enumerate() {
                x[[i, a]] = 1.0;
            }
            let trace = crate::solver::objective(&lap, x.view(), 0.0).unwrap();
            let cut = cut_value(&g, &assignment);
            assert!(
                (trace - cut).abs() <= 1e-9,
                "trace {trace} vs cut {cut} at n={n}, k={k}"
            );
        }
    }

    #[test]
    fn cut_metrics_relabel_invariant() {
        let g = two_cliques_bridge(1.0);
        let a = [0, 0, 1, 1];
        let b = [1, 1, 0, 0];
        assert_eq!(cut_value(&g, &a), cut_value(&g, &b));
        assert_eq!(ncut_value(&g, &a), ncut_value(&g, &b));
        assert_eq!(rcut_value(&g, &a), rcut_value(&g, &b));
    }
}
