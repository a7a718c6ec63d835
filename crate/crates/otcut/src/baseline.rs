//! Dense spectral clustering reference.
//!
//! Kept intentionally simple for comparison at desk scale: a cyclic Jacobi
//! eigensolver on the densified Laplacian plus Lloyd's k-means with k-means++
//! seeding on the embedding rows. Row normalization is applied in the
//! normalized-cut variant only.

use crate::graph::{Laplacian, LaplacianKind, SparseGraph};
use crate::solver::Partition;
use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest instance the dense eigensolver accepts.
pub const DENSE_EIGEN_CAP: usize = 3000;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("graph has {n} nodes, above the dense eigensolver cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("k = {k} exceeds the node count {n}")]
    TooManyClusters { k: usize, n: usize },
}

/// The `k` smallest eigenpairs of a Laplacian.
#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    /// Eigenvectors as columns, `n×k`, orthonormal.
    pub vectors: Array2<f64>,
    /// Ascending eigenvalues, length `k`.
    pub eigenvalues: Vec<f64>,
}

/// Full symmetric eigendecomposition by cyclic Jacobi sweeps.
/// Returns eigenvalues ascending with matching eigenvector columns.
fn jacobi_eigen(mut a: Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    let mut v = Array2::eye(n);
    if n <= 1 {
        return (a.diag().to_vec(), v);
    }
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = 1e-14 * frob.max(f64::MIN_POSITIVE);

    for _sweep in 0..60 {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    s += a[[p, q]] * a[[p, q]];
                }
            }
            s.sqrt()
        };
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[[p, q]];
                if apq.abs() <= tol / (n as f64) {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                let app = a[[p, p]];
                let aqq = a[[q, q]];
                a[[p, p]] = app - t * apq;
                a[[q, q]] = aqq + t * apq;
                a[[p, q]] = 0.0;
                a[[q, p]] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[[r, p]];
                        let arq = a[[r, q]];
                        a[[r, p]] = c * arp - s * arq;
                        a[[p, r]] = a[[r, p]];
                        a[[r, q]] = s * arp + c * arq;
                        a[[q, r]] = a[[r, q]];
                    }
                }
                for r in 0..n {
                    let vrp = v[[r, p]];
                    let vrq = v[[r, q]];
                    v[[r, p]] = c * vrp - s * vrq;
                    v[[r, q]] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].partial_cmp(&a[[j, j]]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[[i, i]]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[[r, dst]] = v[[r, src]];
        }
    }
    (eigenvalues, vectors)
}

/// The `k` smallest eigenpairs of the Laplacian via dense Jacobi
/// diagonalization. Rejects graphs above [`DENSE_EIGEN_CAP`] nodes.
pub fn spectral_embed(lap: &Laplacian, k: usize) -> Result<SpectralEmbedding, BaselineError> {
    let n = lap.n();
    if n > DENSE_EIGEN_CAP {
        return Err(BaselineError::TooLarge {
            n,
            cap: DENSE_EIGEN_CAP,
        });
    }
    if k > n {
        return Err(BaselineError::TooManyClusters { k, n });
    }
    let (eigenvalues, vectors) = jacobi_eigen(lap.to_dense());
    Ok(SpectralEmbedding {
        vectors: vectors.slice(ndarray::s![.., ..k]).to_owned(),
        eigenvalues: eigenvalues[..k].to_vec(),
    })
}

/// Lloyd's algorithm with k-means++ seeding; returns the best of `restarts`
/// runs by inertia together with that inertia.
pub fn kmeans(points: ArrayView2<f64>, k: usize, seed: u64, restarts: usize) -> (Partition, f64) {
    let n = points.nrows();
    assert!(k >= 1 && k <= n, "need 1 <= k <= n");
    let mut best: Option<(Vec<usize>, f64)> = None;
    for r in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let (assignment, inertia) = lloyd(points, k, &mut rng);
        if best.as_ref().is_none_or(|(_, bi)| inertia < *bi) {
            best = Some((assignment, inertia));
        }
    }
    let (assignment, inertia) = best.unwrap();
    (Partition::new(assignment, k).unwrap(), inertia)
}

fn sq_dist(a: ndarray::ArrayView1<f64>, b: ndarray::ArrayView1<f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn lloyd(points: ArrayView2<f64>, k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64) {
    let n = points.nrows();
    let d = points.ncols();

    // k-means++ seeding
    let mut centers = Array2::zeros((k, d));
    centers.row_mut(0).assign(&points.row(rng.gen_range(0..n)));
    let mut dist = vec![f64::INFINITY; n];
    for c in 1..k {
        for i in 0..n {
            dist[i] = dist[i].min(sq_dist(points.row(i), centers.row(c - 1)));
        }
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in dist.iter().enumerate() {
                u -= w;
                if u <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centers.row_mut(c).assign(&points.row(pick));
    }

    let mut assignment = vec![0usize; n];
    let mut prev_inertia = f64::INFINITY;
    for _ in 0..300 {
        let mut changed = false;
        for i in 0..n {
            let mut best_j = 0;
            let mut best_d = f64::INFINITY;
            for j in 0..k {
                let dij = sq_dist(points.row(i), centers.row(j));
                if dij < best_d {
                    best_d = dij;
                    best_j = j;
                }
            }
            if assignment[i] != best_j {
                assignment[i] = best_j;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut counts = vec![0usize; k];
        let mut sums = Array2::<f64>::zeros((k, d));
        for i in 0..n {
            counts[assignment[i]] += 1;
            let row = points.row(i);
            for c in 0..d {
                sums[[assignment[i], c]] += row[c];
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                for c in 0..d {
                    centers[[j, c]] = sums[[j, c]] / counts[j] as f64;
                }
            }
            // empty clusters keep their previous center
        }
        if cfg!(debug_assertions) {
            let inertia: f64 = (0..n)
                .map(|i| sq_dist(points.row(i), centers.row(assignment[i])))
                .sum();
            debug_assert!(
                inertia <= prev_inertia + 1e-9 * prev_inertia.abs().max(1.0),
                "Lloyd inertia rose: {prev_inertia} -> {inertia}"
            );
            prev_inertia = inertia;
        }
    }
    let _ = prev_inertia;

    let inertia: f64 = (0..n)
        .map(|i| sq_dist(points.row(i), centers.row(assignment[i])))
        .sum();
    (assignment, inertia)
}

/// Spectral variant: which Laplacian feeds the embedding and whether rows
/// are length-normalized before k-means.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralVariant {
    NCut,
    RCut,
}

/// End-to-end spectral clustering: embed, optionally row-normalize, k-means.
pub fn spectral_cluster(
    g: &SparseGraph,
    k: usize,
    variant: SpectralVariant,
    seed: u64,
    restarts: usize,
) -> Result<(Partition, SpectralEmbedding, f64), BaselineError> {
    let kind = match variant {
        SpectralVariant::NCut => LaplacianKind::SymNormalized,
        SpectralVariant::RCut => LaplacianKind::Unnormalized,
    };
    let lap = Laplacian::build(g, kind);
    let embedding = spectral_embed(&lap, k)?;
    let points = match variant {
        SpectralVariant::NCut => row_normalized(&embedding.vectors),
        SpectralVariant::RCut => embedding.vectors.clone(),
    };
    let (partition, inertia) = kmeans(points.view(), k, seed, restarts);
    Ok((partition, embedding, inertia))
}

fn row_normalized(m: &Array2<f64>) -> Array2<f64> {
    let mut out = m.clone();
    for mut row in out.rows_mut() {
        let norm: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.mapv_inplace(|x| x / norm);
        }
    }
    out
}
