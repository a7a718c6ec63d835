//! Sparse symmetric graphs and their Laplacians.
//!
//! Graphs are immutable once constructed: every constructor validates weights
//! and symmetry up front so downstream code can rely on the invariants without
//! re-checking. Both orientations of each undirected edge are stored in CSR
//! form, which makes degree computation and Laplacian products cheap.

pub mod io;
pub mod synth;

use ndarray::Array2;
use thiserror::Error;

/// Errors from graph construction and file ingestion.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("negative weight {weight} on edge ({i}, {j})")]
    NegativeWeight { i: usize, j: usize, weight: f64 },
    #[error("asymmetric input: weight({i}, {j}) = {forward} but weight({j}, {i}) = {backward}")]
    AsymmetricInput {
        i: usize,
        j: usize,
        forward: f64,
        backward: f64,
    },
    #[error("graph has no positive-weight edges")]
    EmptyGraph,
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("node index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Which Laplacian to build from an adjacency structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianKind {
    /// `L = D − W`.
    Unnormalized,
    /// `L = I − D^{-1/2} W D^{-1/2}`, identity rows for isolated nodes.
    SymNormalized,
}

/// A weighted undirected graph stored as a symmetric CSR adjacency.
///
/// Invariants (enforced at construction):
/// - all weights are finite and nonnegative,
/// - `weight(i, j) == weight(j, i)` exactly,
/// - no duplicate `(i, j)` entries.
#[derive(Debug, Clone)]
pub struct SparseGraph {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    weights: Vec<f64>,
}

impl SparseGraph {
    /// Builds a graph from an undirected edge list. Each `(i, j, w)` entry
    /// stands for one undirected edge; duplicates are summed. Self-loops are
    /// allowed and stored once on the diagonal.
    pub fn from_undirected_edges(
        n: usize,
        edges: &[(usize, usize, f64)],
    ) -> Result<Self, GraphError> {
        let mut triplets = Vec::with_capacity(edges.len() * 2);
        for &(i, j, w) in edges {
            check_entry(n, i, j, w)?;
            if i == j {
                triplets.push((i, j, w));
            } else {
                triplets.push((i, j, w));
                triplets.push((j, i, w));
            }
        }
        Ok(Self::from_accumulated(n, triplets))
    }

    /// Builds a graph from directed triplets that must already describe a
    /// symmetric matrix. Duplicate same-direction entries are summed before
    /// the symmetry check; an exact mismatch is an error.
    pub fn from_directed_triplets(
        n: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, GraphError> {
        for &(i, j, w) in triplets {
            check_entry(n, i, j, w)?;
        }
        let g = Self::from_accumulated(n, triplets.to_vec());
        // exact symmetry: every stored (i, j) must have an equal (j, i)
        for (i, j, w) in g.entries() {
            let back = g.weight(j, i);
            if back != w {
                return Err(GraphError::AsymmetricInput {
                    i,
                    j,
                    forward: w,
                    backward: back,
                });
            }
        }
        Ok(g)
    }

    /// Sorts, deduplicates (summing), and packs triplets into CSR.
    fn from_accumulated(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (i, j, w) in triplets {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += w,
                _ => merged.push((i, j, w)),
            }
        }
        let (row_ptr, col_idx, weights) = pack_csr(n, &merged);
        SparseGraph {
            n,
            row_ptr,
            col_idx,
            weights,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored (directed) entries.
    pub fn stored_entries(&self) -> usize {
        self.weights.len()
    }

    /// Number of undirected edges (self-loops count once).
    pub fn edge_count(&self) -> usize {
        self.entries().filter(|&(i, j, _)| i <= j).count()
    }

    /// Weighted degree of each node, `d_i = Σ_j w_ij`.
    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.weights[self.row_ptr[i]..self.row_ptr[i + 1]].iter().sum())
            .collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Iterates all stored directed entries `(i, j, w)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (i, self.col_idx[p], self.weights[p]))
        })
    }

    /// Neighbors of node `i` with weights.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (self.col_idx[p], self.weights[p]))
    }

    /// Weight of the `(i, j)` entry, 0 if absent.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let row = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&j) {
            Ok(p) => self.weights[self.row_ptr[i] + p],
            Err(_) => 0.0,
        }
    }
}

/// Packs row-major sorted, duplicate-free triplets into CSR arrays.
fn pack_csr(n: usize, triplets: &[(usize, usize, f64)]) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
    let mut row_ptr = vec![0usize; n + 1];
    let mut col_idx = Vec::with_capacity(triplets.len());
    let mut values = Vec::with_capacity(triplets.len());
    for &(i, j, v) in triplets {
        col_idx.push(j);
        values.push(v);
        row_ptr[i + 1] = values.len();
    }
    for i in 0..n {
        if row_ptr[i + 1] < row_ptr[i] {
            row_ptr[i + 1] = row_ptr[i];
        }
    }
    (row_ptr, col_idx, values)
}

fn check_entry(n: usize, i: usize, j: usize, w: f64) -> Result<(), GraphError> {
    if i >= n {
        return Err(GraphError::IndexOutOfRange { index: i, n });
    }
    if j >= n {
        return Err(GraphError::IndexOutOfRange { index: j, n });
    }
    if !(w >= 0.0) || !w.is_finite() {
        return Err(GraphError::NegativeWeight { i, j, weight: w });
    }
    Ok(())
}

/// A graph Laplacian in sparse symmetric CSR form with its degree vector.
#[derive(Debug, Clone)]
pub struct Laplacian {
    kind: LaplacianKind,
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    degrees: Vec<f64>,
}

impl Laplacian {
    /// Builds the requested Laplacian. Isolated nodes under the normalized
    /// variant get an identity row (and a warning) so dimensions stay stable.
    pub fn build(g: &SparseGraph, kind: LaplacianKind) -> Laplacian {
        let n = g.n();
        let degrees = g.degrees();

        let isolated = degrees.iter().filter(|&&d| d <= 0.0).count();
        if kind == LaplacianKind::SymNormalized && isolated > 0 {
            log::warn!("normalized Laplacian: {isolated} isolated node(s) assigned identity rows");
        }

        let mut triplets = Vec::with_capacity(g.stored_entries() + n);
        for i in 0..n {
            let d_i = degrees[i];
            let self_loop = g.weight(i, i);
            triplets.push((i, i, diag(kind, self_loop, d_i)));
            for (j, w) in g.neighbors(i) {
                if j != i {
                    let v = off_diag(kind, w, d_i, degrees[j]);
                    if v != 0.0 {
                        triplets.push((i, j, v));
                    }
                }
            }
        }
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let (row_ptr, col_idx, values) = pack_csr(n, &triplets);

        Laplacian {
            kind,
            n,
            row_ptr,
            col_idx,
            values,
            degrees,
        }
    }

    pub fn kind(&self) -> LaplacianKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Iterates all stored entries `(i, j, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (i, self.col_idx[p], self.values[p]))
        })
    }

    /// Dense product `L · X` for an `n×k` matrix.
    pub fn matmul(&self, x: &Array2<f64>) -> Array2<f64> {
        assert_eq!(x.nrows(), self.n, "matrix row count must equal node count");
        let k = x.ncols();
        let mut y = Array2::zeros((self.n, k));
        for i in 0..self.n {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[p];
                let v = self.values[p];
                for c in 0..k {
                    y[[i, c]] += v * x[[j, c]];
                }
            }
        }
        y
    }

    /// `L · v` for a dense vector.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                y[i] += self.values[p] * v[self.col_idx[p]];
            }
        }
        y
    }

    /// `xᵀ L x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut m = Array2::zeros((self.n, self.n));
        for (i, j, v) in self.entries() {
            m[[i, j]] = v;
        }
        m
    }

    /// Power-iteration estimate of the largest eigenvalue. Deterministic:
    /// the start vector comes from a fixed seed. Returns 0 for a zero matrix.
    pub fn largest_eigenvalue_estimate(&self, iters: usize) -> f64 {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x07c0_7e57);
        let mut v: Vec<f64> = (0..self.n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let norm = |u: &[f64]| u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nv = norm(&v);
        if nv == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        for _ in 0..iters.max(1) {
            let w = self.matvec(&v);
            let nw = norm(&w);
            if nw < 1e-300 {
                return 0.0;
            }
            v = w;
            v.iter_mut().for_each(|x| *x /= nw);
        }
        // Rayleigh quotient of the final unit vector
        self.quadratic_form(&v)
    }
}

fn diag(kind: LaplacianKind, self_loop: f64, d: f64) -> f64 {
    match kind {
        LaplacianKind::Unnormalized => d - self_loop,
        LaplacianKind::SymNormalized => {
            if d > 0.0 {
                1.0 - self_loop / d
            } else {
                1.0
            }
        }
    }
}

fn off_diag(kind: LaplacianKind, w: f64, d_i: f64, d_j: f64) -> f64 {
    match kind {
        LaplacianKind::Unnormalized => -w,
        LaplacianKind::SymNormalized => {
            if d_i > 0.0 && d_j > 0.0 {
                -w / (d_i * d_j).sqrt()
            } else {
                0.0
            }
        }
    }
}

/// Node-size distribution proportional to weighted degrees,
/// `π_i = d_i / Σ_j d_j`, renormalized to sum to 1.
pub fn degree_distribution(g: &SparseGraph) -> Result<Vec<f64>, GraphError> {
    let degrees = g.degrees();
    let total: f64 = degrees.iter().sum();
    if total <= 0.0 {
        return Err(GraphError::EmptyGraph);
    }
    let mut p: Vec<f64> = degrees.iter().map(|&d| d / total).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    Ok(p)
}

/// The uniform distribution `𝟙/n`.
pub fn uniform_distribution(n: usize) -> Vec<f64> {
    assert!(n > 0, "distribution needs at least one entry");
    vec![1.0 / n as f64; n]
}
