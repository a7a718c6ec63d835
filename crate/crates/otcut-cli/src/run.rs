//! Command execution: load inputs, run the requested operation, build the
//! report, write outputs. Exit code 2 marks input/configuration problems,
//! exit 3 marks solver failures.

use crate::args::*;
use crate::report::RunReport;
use otcut::baseline::{self, BaselineError, SpectralVariant};
use otcut::graph::{io, synth, GraphError, LaplacianKind, SparseGraph};
use otcut::metrics;
use otcut::solver::{
    cluster_size_distribution, solve, Partition, SolverConfig, SolverError, StopReason, Variant,
};
use otcut::transport::TransportError;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn solver(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_SOLVER,
            message: message.into(),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<TransportError> for CliError {
    fn from(e: TransportError) -> Self {
        CliError::solver(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Config(_) | SolverError::DimensionMismatch(_) => {
                CliError::usage(e.to_string())
            }
            SolverError::Graph(g) => g.into(),
            SolverError::Transport(t) => t.into(),
        }
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        match e {
            BaselineError::TooLarge { .. } => CliError::solver(e.to_string()),
            BaselineError::TooManyClusters { .. } => CliError::usage(e.to_string()),
        }
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn dispatch(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Partition(args) => run_partition(&args).map(Some),
        Command::Toy(args) => run_toy(&args).map(|()| None),
        Command::Metrics(args) => run_metrics(&args).map(Some),
        Command::Baseline(args) => run_baseline(&args).map(Some),
    };
    match result {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn infer_format(path: &Path, explicit: Option<GraphFormat>) -> GraphFormat {
    explicit.unwrap_or_else(|| {
        if path.extension().and_then(|e| e.to_str()) == Some("mtx") {
            GraphFormat::Mtx
        } else {
            GraphFormat::Edgelist
        }
    })
}

fn load_graph(path: &Path, format: GraphFormat) -> Result<SparseGraph, CliError> {
    Ok(match format {
        GraphFormat::Edgelist => io::load_edge_list(path)?,
        GraphFormat::Mtx => io::load_matrix_market(path)?,
    })
}

fn format_name(f: GraphFormat) -> &'static str {
    match f {
        GraphFormat::Edgelist => "edgelist",
        GraphFormat::Mtx => "mtx",
    }
}

fn read_labels(path: &Path) -> Result<Vec<usize>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("failed to read {}: {e}", path.display())))?;
    let mut labels = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        labels.push(line.parse::<usize>().map_err(|_| {
            CliError::usage(format!(
                "{}:{}: expected a nonnegative integer label",
                path.display(),
                idx + 1
            ))
        })?);
    }
    if labels.is_empty() {
        return Err(CliError::usage(format!(
            "{}: no labels found",
            path.display()
        )));
    }
    Ok(labels)
}

/// One probability per line; must sum to 1 within 1e-9 and is renormalized
/// by its exact sum.
fn read_distribution(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("failed to read {}: {e}", path.display())))?;
    let mut dist = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            CliError::usage(format!(
                "{}:{}: expected a probability",
                path.display(),
                idx + 1
            ))
        })?;
        if !v.is_finite() || v < 0.0 {
            return Err(CliError::usage(format!(
                "{}:{}: probabilities must be nonnegative",
                path.display(),
                idx + 1
            )));
        }
        dist.push(v);
    }
    let sum: f64 = dist.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(CliError::usage(format!(
            "{}: distribution sums to {sum}, expected 1 within 1e-9",
            path.display()
        )));
    }
    dist.iter_mut().for_each(|v| *v /= sum);
    Ok(dist)
}

fn write_report(report: &RunReport, out: Option<&PathBuf>) -> Result<(), CliError> {
    let text = report.to_text();
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::usage(format!("failed to write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn variant_name(v: VariantArg) -> &'static str {
    match v {
        VariantArg::Ncut => "ncut",
        VariantArg::Rcut => "rcut",
        VariantArg::Custom => "custom",
    }
}

pub fn run_partition(args: &PartitionArgs) -> Result<RunReport, CliError> {
    if args.k < 2 {
        return Err(CliError::usage(format!(
            "--k must be at least 2, got {}",
            args.k
        )));
    }
    let format = infer_format(&args.graph, args.format);
    let g = load_graph(&args.graph, format)?;
    let n = g.n();

    let variant = match args.variant {
        VariantArg::Ncut => Variant::NCut,
        VariantArg::Rcut => Variant::RCut,
        VariantArg::Custom => {
            let Some(target_path) = &args.target_dist else {
                return Err(CliError::usage(
                    "--variant custom requires --target-dist",
                ));
            };
            let target = read_distribution(target_path)?;
            if target.len() != args.k {
                return Err(CliError::usage(format!(
                    "target distribution has {} entries but --k is {}",
                    target.len(),
                    args.k
                )));
            }
            let source = match &args.source_dist {
                Some(p) => {
                    let s = read_distribution(p)?;
                    if s.len() != n {
                        return Err(CliError::usage(format!(
                            "source distribution has {} entries but the graph has {n} nodes",
                            s.len()
                        )));
                    }
                    s
                }
                None => otcut::graph::uniform_distribution(n),
            };
            Variant::Custom { source, target }
        }
    };
    if args.variant != VariantArg::Custom && args.target_dist.is_some() {
        return Err(CliError::usage(
            "--target-dist only applies to --variant custom",
        ));
    }

    let cfg = SolverConfig {
        alpha: args.alpha,
        max_iter: args.iters,
        tol: args.tol,
        variant: variant.clone(),
        seed: args.seed,
        laplacian_kind: match args.laplacian {
            LaplacianArg::Unnormalized => LaplacianKind::Unnormalized,
            LaplacianArg::Sym => LaplacianKind::SymNormalized,
        },
        safe_step: args.safe_step,
        restarts: args.restarts,
    };

    let tick = Instant::now();
    let out = solve(&g, args.k, &cfg)?;
    let wall = tick.elapsed().as_secs_f64();

    if let Some(plan_path) = &args.dump_plan {
        let mut text = String::new();
        for &(i, j, m) in out.plan.entries() {
            text.push_str(&format!("{i} {j} {m}\n"));
        }
        std::fs::write(plan_path, text).map_err(|e| {
            CliError::usage(format!("failed to write {}: {e}", plan_path.display()))
        })?;
    }

    let mut report = base_report("partition", &g, &args.graph, format);
    report.k = Some(args.k);
    report.variant = Some(variant_name(args.variant).into());
    report.alpha = Some(args.alpha);
    report.effective_alpha = Some(out.effective_alpha);
    report.lambda = Some(out.lambda);
    report.safe_step = Some(args.safe_step);
    report.laplacian = Some(
        match args.laplacian {
            LaplacianArg::Unnormalized => "unnormalized",
            LaplacianArg::Sym => "sym_normalized",
        }
        .into(),
    );
    report.seed = Some(args.seed);
    report.restarts = Some(args.restarts);
    report.iters_requested = Some(args.iters);
    report.tol = Some(args.tol);
    report.stop_reason = Some(
        match out.trace.stop_reason {
            StopReason::MaxIter => "max_iter",
            StopReason::Tolerance => "tolerance",
        }
        .into(),
    );
    report.iterations = Some(out.trace.iterations_run);
    report.objective = Some(*out.trace.objectives.last().unwrap());
    report.objectives = Some(out.trace.objectives.clone());
    report.assignment = Some(out.partition.assignment().to_vec());

    let (sizes, target) = obtained_and_target_sizes(&g, &out.partition, &variant, args.k)?;
    report.kl_to_target = Some(metrics::kl_divergence(&sizes, &target).unwrap());
    report.cluster_sizes = Some(sizes);
    report.target_dist = Some(target);

    attach_label_and_cut_metrics(
        &mut report,
        &g,
        out.partition.assignment(),
        args.labels.as_deref(),
    )?;
    report.wall_seconds = Some(wall);
    report.per_iter_seconds = Some(out.trace.per_iter_seconds.clone());

    write_report(&report, args.out.as_ref())?;
    Ok(report)
}

/// Obtained cluster sizes are weighted by the node-size distribution the
/// variant optimizes over: cardinality for rcut, degree volume for ncut,
/// the custom source distribution otherwise.
fn obtained_and_target_sizes(
    g: &SparseGraph,
    partition: &Partition,
    variant: &Variant,
    k: usize,
) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    Ok(match variant {
        Variant::RCut => (
            cluster_size_distribution(partition, None),
            otcut::graph::uniform_distribution(k),
        ),
        Variant::NCut => {
            let degrees = g.degrees();
            (
                cluster_size_distribution(partition, Some(&degrees)),
                otcut::graph::uniform_distribution(k),
            )
        }
        Variant::Custom { source, target } => (
            cluster_size_distribution(partition, Some(source)),
            target.clone(),
        ),
    })
}

fn base_report(command: &str, g: &SparseGraph, path: &Path, format: GraphFormat) -> RunReport {
    let mut r = RunReport::new(command);
    r.graph = Some(path.display().to_string());
    r.format = Some(format_name(format).into());
    r.nodes = Some(g.n());
    r.edges = Some(g.edge_count());
    r
}

fn attach_label_and_cut_metrics(
    report: &mut RunReport,
    g: &SparseGraph,
    assignment: &[usize],
    labels: Option<&Path>,
) -> Result<(), CliError> {
    if let Some(path) = labels {
        let labels = read_labels(path)?;
        if labels.len() != assignment.len() {
            return Err(CliError::usage(format!(
                "labels file has {} entries but the graph has {} nodes",
                labels.len(),
                assignment.len()
            )));
        }
        report.ari = Some(metrics::ari(assignment, &labels).unwrap());
    }
    report.cut = Some(metrics::cut_value(g, assignment));
    report.ncut = Some(metrics::ncut_value(g, assignment));
    report.rcut = Some(metrics::rcut_value(g, assignment));
    Ok(())
}

pub fn run_toy(args: &ToyArgs) -> Result<(), CliError> {
    if args.n < 4 {
        return Err(CliError::usage(format!(
            "--n must be at least 4, got {}",
            args.n
        )));
    }
    let (g, labels) = match args.dataset {
        ToyDataset::Moons => {
            if args.gamma.is_some() || args.factor.is_some() {
                return Err(CliError::usage(
                    "--gamma/--factor only apply to --dataset circles",
                ));
            }
            let knn = args.knn.unwrap_or(10);
            if knn < 1 {
                return Err(CliError::usage("--knn must be at least 1"));
            }
            let noise = args.noise.unwrap_or(0.05);
            synth::make_two_moons_knn(args.n, noise, knn, args.seed)
        }
        ToyDataset::Circles => {
            if args.knn.is_some() {
                return Err(CliError::usage("--knn only applies to --dataset moons"));
            }
            let gamma = args.gamma.unwrap_or(6.0);
            let factor = args.factor.unwrap_or(0.3);
            if gamma <= 0.0 {
                return Err(CliError::usage("--gamma must be positive"));
            }
            if !(factor > 0.0 && factor < 1.0) {
                return Err(CliError::usage("--factor must lie in (0, 1)"));
            }
            let noise = args.noise.unwrap_or(0.02);
            synth::make_two_circles_rbf(args.n, noise, factor, gamma, args.seed)
        }
    };

    let edges_path = args.out.with_extension("edges");
    let labels_path = args.out.with_extension("labels");
    io::save_edge_list(&g, &edges_path)?;
    let mut f = std::fs::File::create(&labels_path).map_err(|e| {
        CliError::usage(format!("failed to write {}: {e}", labels_path.display()))
    })?;
    let mut text = String::with_capacity(labels.len() * 2);
    for l in &labels {
        text.push_str(&format!("{l}\n"));
    }
    f.write_all(text.as_bytes())
        .map_err(|e| CliError::usage(format!("failed to write {}: {e}", labels_path.display())))?;
    println!(
        "wrote {} ({} nodes, {} edges) and {}",
        edges_path.display(),
        g.n(),
        g.edge_count(),
        labels_path.display()
    );
    Ok(())
}

pub fn run_metrics(args: &MetricsArgs) -> Result<RunReport, CliError> {
    let assignment = read_labels(&args.partition)?;
    let labels = read_labels(&args.labels)?;
    if assignment.len() != labels.len() {
        return Err(CliError::usage(format!(
            "partition has {} entries but labels file has {}",
            assignment.len(),
            labels.len()
        )));
    }
    let k = assignment.iter().max().map_or(0, |&m| m + 1);

    let mut report = RunReport::new("metrics");
    report.nodes = Some(assignment.len());
    report.k = Some(k);
    report.ari = Some(metrics::ari(&assignment, &labels).unwrap());

    let partition = Partition::new(assignment.clone(), k)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let sizes = cluster_size_distribution(&partition, None);
    if let Some(target_path) = &args.target_dist {
        let target = read_distribution(target_path)?;
        if target.len() != k {
            return Err(CliError::usage(format!(
                "target distribution has {} entries but the partition spans {k} clusters",
                target.len()
            )));
        }
        report.kl_to_target = Some(
            metrics::kl_divergence(&sizes, &target)
                .map_err(|e| CliError::usage(e.to_string()))?,
        );
        report.target_dist = Some(target);
    }
    report.cluster_sizes = Some(sizes);

    if let Some(graph_path) = &args.graph {
        let format = infer_format(graph_path, args.format);
        let g = load_graph(graph_path, format)?;
        if g.n() != assignment.len() {
            return Err(CliError::usage(format!(
                "graph has {} nodes but the partition has {} entries",
                g.n(),
                assignment.len()
            )));
        }
        report.graph = Some(graph_path.display().to_string());
        report.format = Some(format_name(format).into());
        report.edges = Some(g.edge_count());
        report.cut = Some(metrics::cut_value(&g, &assignment));
        report.ncut = Some(metrics::ncut_value(&g, &assignment));
        report.rcut = Some(metrics::rcut_value(&g, &assignment));
    }

    write_report(&report, args.out.as_ref())?;
    Ok(report)
}

pub fn run_baseline(args: &BaselineArgs) -> Result<RunReport, CliError> {
    if args.k < 1 {
        return Err(CliError::usage(format!(
            "--k must be at least 1, got {}",
            args.k
        )));
    }
    let variant = match args.variant {
        VariantArg::Ncut => SpectralVariant::NCut,
        VariantArg::Rcut => SpectralVariant::RCut,
        VariantArg::Custom => {
            return Err(CliError::usage(
                "baseline spectral supports --variant ncut or rcut",
            ))
        }
    };
    let format = infer_format(&args.graph, args.format);
    let g = load_graph(&args.graph, format)?;

    let tick = Instant::now();
    let (partition, _embedding, inertia) =
        baseline::spectral_cluster(&g, args.k, variant, args.seed, args.restarts)?;
    let wall = tick.elapsed().as_secs_f64();

    let mut report = base_report("baseline", &g, &args.graph, format);
    report.method = Some("spectral".into());
    report.k = Some(args.k);
    report.variant = Some(variant_name(args.variant).into());
    report.seed = Some(args.seed);
    report.restarts = Some(args.restarts);
    report.inertia = Some(inertia);
    report.assignment = Some(partition.assignment().to_vec());
    report.cluster_sizes = Some(cluster_size_distribution(&partition, None));
    attach_label_and_cut_metrics(
        &mut report,
        &g,
        partition.assignment(),
        args.labels.as_deref(),
    )?;
    report.wall_seconds = Some(wall);
    write_report(&report, args.out.as_ref())?;
    Ok(report)
}
