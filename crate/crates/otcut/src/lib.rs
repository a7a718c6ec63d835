//! Graph partitioning under arbitrary cluster-size constraints.
//!
//! This crate partitions weighted undirected graphs by minimizing the trace
//! cut objective `Tr(XᵀLX) − λ‖X‖²` over a transportation polytope, where the
//! row marginals describe per-node sizes and the column marginals describe the
//! desired cluster sizes. The concave regularizer drives solutions to vertices
//! of the polytope, which have at most `n + k − 1` nonzero entries and round
//! cleanly to hard partitions.
//!
//! The minimization runs an accelerated proximal gradient loop; each prox step
//! reduces to an exact discrete optimal transport problem solved with a
//! network simplex specialized to the dense transportation structure.
//!
//! Modules:
//! - [`graph`] — sparse symmetric graphs, Laplacians, synthetic datasets, file I/O
//! - [`transport`] — exact earth mover's distance solver over size constraints
//! - [`solver`] — the constrained-cut objective and the accelerated prox loop
//! - [`metrics`] — ARI, KL divergence, and cut/ncut/rcut values
//! - [`baseline`] — dense spectral clustering reference (eigenvectors + k-means)

pub mod baseline;
pub mod graph;
pub mod metrics;
pub mod solver;
pub mod transport;

pub use graph::{
    degree_distribution, uniform_distribution, GraphError, Laplacian, LaplacianKind, SparseGraph,
};
pub use solver::{
    solve, Partition, SolveOutput, SolveTrace, SolverConfig, SolverError, StopReason, Variant,
};
pub use transport::{solve_emd, SizeConstraints, TransportError, TransportPlan};
