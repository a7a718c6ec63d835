//! Exit codes, file round trips, and report behavior of the binary.

use otcut_cli::report::{strip_timing, RunReport};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_otcut"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn partition_two_cliques_report() {
    let g = data("two_cliques.edges");
    let out = run(&[
        "partition",
        "--graph",
        g.to_str().unwrap(),
        "--k",
        "2",
        "--variant",
        "rcut",
        "--seed",
        "0",
        "--restarts",
        "8",
    ]);
    assert!(out.status.success());
    let report = RunReport::parse(&stdout(&out)).unwrap();
    assert_eq!(report.schema, 1);
    assert_eq!(report.cut, Some(0.0));
    assert_eq!(report.kl_to_target, Some(0.0));
    assert_eq!(report.cluster_sizes, Some(vec![0.5, 0.5]));
}

#[test]
fn missing_k_exits_2() {
    let g = data("two_cliques.edges");
    let out = run(&["partition", "--graph", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn custom_without_target_exits_2() {
    let g = data("two_cliques.edges");
    let out = run(&[
        "partition",
        "--graph",
        g.to_str().unwrap(),
        "--k",
        "2",
        "--variant",
        "custom",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--target-dist"));
}

#[test]
fn bad_graph_path_exits_2() {
    let out = run(&["partition", "--graph", "/nonexistent/g.edges", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_error_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.edges");
    std::fs::write(&p, "0 1 1.0\nnonsense\n").unwrap();
    let out = run(&["partition", "--graph", p.to_str().unwrap(), "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

#[test]
fn toy_moons_round_trip_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("m1");
    let args = [
        "toy", "--dataset", "moons", "--n", "60", "--seed", "3", "--knn", "4", "--out",
    ];
    let out = bin().args(args).arg(&prefix).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let edges1 = std::fs::read(prefix.with_extension("edges")).unwrap();
    let labels1 = std::fs::read(prefix.with_extension("labels")).unwrap();

    let prefix2 = dir.path().join("m2");
    let out = bin().args(args).arg(&prefix2).output().unwrap();
    assert!(out.status.success());
    assert_eq!(edges1, std::fs::read(prefix2.with_extension("edges")).unwrap());
    assert_eq!(labels1, std::fs::read(prefix2.with_extension("labels")).unwrap());

    // reloadable
    let g = otcut::graph::io::load_edge_list(prefix.with_extension("edges")).unwrap();
    assert_eq!(g.n(), 60);
}

#[test]
fn toy_too_small_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("t");
    let out = bin()
        .args(["toy", "--dataset", "moons", "--n", "2", "--out"])
        .arg(&prefix)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn toy_rejects_mismatched_flags() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("t");
    let out = bin()
        .args(["toy", "--dataset", "moons", "--n", "20", "--gamma", "4", "--out"])
        .arg(&prefix)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn metrics_identical_and_permuted() {
    let dir = tempfile::tempdir().unwrap();
    let part = dir.path().join("p.labels");
    let labels = dir.path().join("l.labels");
    std::fs::write(&part, "0\n0\n1\n1\n").unwrap();
    std::fs::write(&labels, "0\n0\n1\n1\n").unwrap();
    let out = run(&[
        "metrics",
        "--partition",
        part.to_str().unwrap(),
        "--labels",
        labels.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let r = RunReport::parse(&stdout(&out)).unwrap();
    assert_eq!(r.ari, Some(1.0));

    std::fs::write(&labels, "1\n1\n0\n0\n").unwrap();
    let out = run(&[
        "metrics",
        "--partition",
        part.to_str().unwrap(),
        "--labels",
        labels.to_str().unwrap(),
    ]);
    let r = RunReport::parse(&stdout(&out)).unwrap();
    assert_eq!(r.ari, Some(1.0));
}

#[test]
fn metrics_crossing_matches_pair_counting() {
    let dir = tempfile::tempdir().unwrap();
    let part = dir.path().join("p.labels");
    let labels = dir.path().join("l.labels");
    std::fs::write(&part, "0\n0\n1\n1\n").unwrap();
    std::fs::write(&labels, "0\n1\n0\n1\n").unwrap();
    let out = run(&[
        "metrics",
        "--partition",
        part.to_str().unwrap(),
        "--labels",
        labels.to_str().unwrap(),
    ]);
    let r = RunReport::parse(&stdout(&out)).unwrap();
    // all 6 node pairs: 2 agreeing splits, expected index equals 2/3 of max
    assert!((r.ari.unwrap() - (-0.5)).abs() < 1e-12);
}

#[test]
fn metrics_length_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let part = dir.path().join("p.labels");
    let labels = dir.path().join("l.labels");
    std::fs::write(&part, "0\n1\n").unwrap();
    std::fs::write(&labels, "0\n1\n1\n").unwrap();
    let out = run(&[
        "metrics",
        "--partition",
        part.to_str().unwrap(),
        "--labels",
        labels.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn metrics_with_graph_cut_values() {
    let dir = tempfile::tempdir().unwrap();
    let part = dir.path().join("p.labels");
    let labels = dir.path().join("l.labels");
    std::fs::write(&part, "0\n0\n1\n1\n").unwrap();
    std::fs::write(&labels, "0\n0\n1\n1\n").unwrap();
    let g = data("two_cliques.edges");
    let out = run(&[
        "metrics",
        "--partition",
        part.to_str().unwrap(),
        "--labels",
        labels.to_str().unwrap(),
        "--graph",
        g.to_str().unwrap(),
    ]);
    let r = RunReport::parse(&stdout(&out)).unwrap();
    assert_eq!(r.cut, Some(0.0));
    assert_eq!(r.ncut, Some(0.0));
    assert_eq!(r.rcut, Some(0.0));
}

#[test]
fn baseline_two_cliques_ari_one() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("l.labels");
    std::fs::write(&labels, "0\n0\n1\n1\n").unwrap();
    let g = data("two_cliques.edges");
    let out = run(&[
        "baseline",
        "--method",
        "spectral",
        "--graph",
        g.to_str().unwrap(),
        "--k",
        "2",
        "--labels",
        labels.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let r = RunReport::parse(&stdout(&out)).unwrap();
    assert_eq!(r.ari, Some(1.0));
    assert_eq!(r.method.as_deref(), Some("spectral"));
}

#[test]
fn baseline_k_zero_exits_2() {
    let g = data("two_cliques.edges");
    let out = run(&[
        "baseline",
        "--method",
        "spectral",
        "--graph",
        g.to_str().unwrap(),
        "--k",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn baseline_above_eigensolver_cap_exits_3() {
    // a path graph over the dense-eigensolver cap
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("big.edges");
    let mut text = String::new();
    for i in 0..3100usize {
        text.push_str(&format!("{} {} 1\n", i, i + 1));
    }
    std::fs::write(&p, text).unwrap();
    let out = run(&[
        "baseline",
        "--method",
        "spectral",
        "--graph",
        p.to_str().unwrap(),
        "--k",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn dump_plan_writes_triplets() {
    let dir = tempfile::tempdir().unwrap();
    let plan_path = dir.path().join("plan.txt");
    let g = data("two_cliques.edges");
    let out = bin()
        .args([
            "partition",
            "--graph",
            g.to_str().unwrap(),
            "--k",
            "2",
            "--variant",
            "rcut",
            "--restarts",
            "8",
            "--dump-plan",
        ])
        .arg(&plan_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&plan_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.len() <= 4 + 2 - 1);
    for line in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(toks.len(), 3);
        assert!(toks[2].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn report_written_to_file_parses() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("r.txt");
    let g = data("karate.mtx");
    let out = bin()
        .args([
            "partition",
            "--graph",
            g.to_str().unwrap(),
            "--format",
            "mtx",
            "--k",
            "2",
            "--iters",
            "10",
            "--out",
        ])
        .arg(&report_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&report_path).unwrap();
    let r = RunReport::parse(&text).unwrap();
    assert_eq!(r.nodes, Some(34));
    assert_eq!(r.edges, Some(78));
    assert_eq!(r.iterations, Some(10));
    assert_eq!(r.objectives.as_ref().map(|o| o.len()), Some(11));
}

#[test]
fn identical_runs_byte_identical_modulo_timing() {
    let g = data("karate.mtx");
    let args = [
        "partition",
        "--graph",
        g.to_str().unwrap(),
        "--k",
        "3",
        "--seed",
        "7",
        "--iters",
        "12",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success() && b.status.success());
    assert_eq!(strip_timing(&stdout(&a)), strip_timing(&stdout(&b)));
    assert_ne!(stdout(&a), String::new());
}
