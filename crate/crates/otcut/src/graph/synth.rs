//! Synthetic point clouds and the graphs built from them.
//!
//! Generator constants are fixed so files and tests are reproducible:
//! - two moons: unit-radius half circles, the second shifted by (1, −0.5)
//!   and flipped, with isotropic Gaussian noise of the given standard
//!   deviation added to every coordinate;
//! - two circles: concentric circles of radius 1 and `factor`, same noise
//!   model;
//! - k-NN graphs keep an edge when either endpoint selects the other
//!   (union rule) with weight 1;
//! - RBF graphs are dense with `w_ij = exp(−gamma · ‖p_i − p_j‖²)` and a
//!   zero diagonal.

use super::SparseGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Standard normal draw via Box–Muller.
fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Two interleaved half-moons with labels 0 (outer) and 1 (inner).
pub fn two_moons(n: usize, noise: f64, seed: u64) -> (Vec<[f64; 2]>, Vec<usize>) {
    assert!(n >= 4, "two_moons needs at least 4 points");
    let n_out = n - n / 2;
    let n_in = n / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n_out {
        let t = PI * i as f64 / (n_out - 1) as f64;
        points.push([t.cos(), t.sin()]);
        labels.push(0);
    }
    for i in 0..n_in {
        let t = PI * i as f64 / (n_in - 1) as f64;
        points.push([1.0 - t.cos(), 1.0 - t.sin() - 0.5]);
        labels.push(1);
    }
    for p in &mut points {
        p[0] += noise * gauss(&mut rng);
        p[1] += noise * gauss(&mut rng);
    }
    (points, labels)
}

/// Two concentric circles with labels 0 (outer, radius 1) and 1 (inner,
/// radius `factor`).
pub fn two_circles(n: usize, noise: f64, factor: f64, seed: u64) -> (Vec<[f64; 2]>, Vec<usize>) {
    assert!(n >= 4, "two_circles needs at least 4 points");
    assert!(factor > 0.0 && factor < 1.0, "factor must lie in (0, 1)");
    let n_out = n - n / 2;
    let n_in = n / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n_out {
        let t = 2.0 * PI * i as f64 / n_out as f64;
        points.push([t.cos(), t.sin()]);
        labels.push(0);
    }
    for i in 0..n_in {
        let t = 2.0 * PI * i as f64 / n_in as f64;
        points.push([factor * t.cos(), factor * t.sin()]);
        labels.push(1);
    }
    for p in &mut points {
        p[0] += noise * gauss(&mut rng);
        p[1] += noise * gauss(&mut rng);
    }
    (points, labels)
}

fn sq_dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Symmetric k-nearest-neighbor graph: an edge exists when either endpoint
/// ranks the other among its `k` closest points (ties broken by index).
pub fn knn_graph(points: &[[f64; 2]], k: usize) -> SparseGraph {
    let n = points.len();
    assert!(k >= 1, "need at least one neighbor");
    assert!(n >= 2, "need at least two points");
    let mut edges = std::collections::BTreeSet::new();
    let mut dists: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        dists.clear();
        for j in 0..n {
            if j != i {
                dists.push((sq_dist(points[i], points[j]), j));
            }
        }
        dists.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        for &(_, j) in dists.iter().take(k) {
            edges.insert((i.min(j), i.max(j)));
        }
    }
    let triplets: Vec<_> = edges.into_iter().map(|(i, j)| (i, j, 1.0)).collect();
    SparseGraph::from_undirected_edges(n, &triplets).unwrap()
}

/// Dense RBF similarity graph with zero diagonal.
pub fn rbf_graph(points: &[[f64; 2]], gamma: f64) -> SparseGraph {
    assert!(gamma > 0.0, "gamma must be positive");
    let n = points.len();
    let mut triplets = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            triplets.push((i, j, (-gamma * sq_dist(points[i], points[j])).exp()));
        }
    }
    SparseGraph::from_undirected_edges(n, &triplets).unwrap()
}

/// Two-moons point cloud turned into a k-NN graph; returns the graph and
/// the generator labels.
pub fn make_two_moons_knn(
    n: usize,
    noise: f64,
    k_neighbors: usize,
    seed: u64,
) -> (SparseGraph, Vec<usize>) {
    let (points, labels) = two_moons(n, noise, seed);
    (knn_graph(&points, k_neighbors), labels)
}

/// Concentric-circles point cloud turned into a dense RBF graph.
pub fn make_two_circles_rbf(
    n: usize,
    noise: f64,
    factor: f64,
    gamma: f64,
    seed: u64,
) -> (SparseGraph, Vec<usize>) {
    let (points, labels) = two_circles(n, noise, factor, seed);
    (rbf_graph(&points, gamma), labels)
}

/// Erdős–Rényi G(n, p) graph with unit weights.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> SparseGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p {
                triplets.push((i, j, 1.0));
            }
        }
    }
    SparseGraph::from_undirected_edges(n, &triplets).unwrap()
}
