//! Command-line argument definitions.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "otcut",
    version,
    about = "Partition weighted graphs under arbitrary cluster-size constraints"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the transport-based partitioner and emit a run report.
    Partition(PartitionArgs),
    /// Generate a toy dataset as an edge-list file plus ground-truth labels.
    Toy(ToyArgs),
    /// Score a partition file against labels (and optionally a graph).
    Metrics(MetricsArgs),
    /// Run a reference clustering method and emit a run report.
    Baseline(BaselineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Edgelist,
    Mtx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Ncut,
    Rcut,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LaplacianArg {
    /// D − W
    Unnormalized,
    /// I − D^{-1/2} W D^{-1/2}
    Sym,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    /// Graph file to partition.
    #[arg(long)]
    pub graph: PathBuf,
    /// Input format; inferred from a .mtx extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<GraphFormat>,
    /// Number of clusters.
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "ncut")]
    pub variant: VariantArg,
    /// Cluster-size distribution file (one probability per line); required
    /// for --variant custom.
    #[arg(long)]
    pub target_dist: Option<PathBuf>,
    /// Node-size distribution file for --variant custom; uniform if omitted.
    #[arg(long)]
    pub source_dist: Option<PathBuf>,
    /// Prox step size; the regularization weight is always 1/(2·alpha).
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 30)]
    pub iters: usize,
    /// Relative objective-change stopping threshold (0 disables).
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "sym")]
    pub laplacian: LaplacianArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    /// Clamp alpha below the estimated smoothness bound for guaranteed
    /// monotone descent.
    #[arg(long)]
    pub safe_step: bool,
    /// Ground-truth labels file; adds ARI to the report.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Debug: dump the final transport plan as sparse `i j mass` triplets.
    #[arg(long)]
    pub dump_plan: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ToyDataset {
    Moons,
    Circles,
}

#[derive(Debug, Args)]
pub struct ToyArgs {
    #[arg(long, value_enum)]
    pub dataset: ToyDataset,
    /// Number of points (at least 4).
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Gaussian noise standard deviation; defaults to 0.05 for moons and
    /// 0.02 for circles.
    #[arg(long)]
    pub noise: Option<f64>,
    /// Neighbors per node for the moons k-NN graph.
    #[arg(long)]
    pub knn: Option<usize>,
    /// RBF width for the circles graph.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Inner/outer radius ratio for circles.
    #[arg(long)]
    pub factor: Option<f64>,
    /// Output prefix; writes PREFIX.edges and PREFIX.labels.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Partition file: one cluster index per line.
    #[arg(long)]
    pub partition: PathBuf,
    /// Ground-truth labels file.
    #[arg(long)]
    pub labels: PathBuf,
    /// Graph file for cut/ncut/rcut values.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<GraphFormat>,
    /// Target distribution for the KL column.
    #[arg(long)]
    pub target_dist: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaselineMethod {
    Spectral,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(long, value_enum)]
    pub method: BaselineMethod,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<GraphFormat>,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "ncut")]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// k-means restarts.
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
