//! End-to-end runs of the `snake` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use snake::graph::{read_edge_list_file, sample_sbm};

fn snake(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snake"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Trace rows without the wall-clock column.
fn deterministic_columns(path: &Path) -> Vec<(String, String)> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("outer_iter,wall_seconds,objective"));
    lines
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            assert_eq!(cols.len(), 3);
            (cols[0].to_string(), cols[2].to_string())
        })
        .collect()
}

fn summary_objective(out: &Output) -> f64 {
    let text = stdout(out);
    let line = text
        .lines()
        .find(|l| l.starts_with("FINAL "))
        .expect("summary line");
    line.split_whitespace()
        .find_map(|t| t.strip_prefix("objective="))
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn gen_sbm_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sbm.txt");
    let out = snake(&[
        "gen-sbm",
        "--blocks",
        "4x30",
        "--p-in",
        "0.1",
        "--p-out",
        "0.005",
        "--seed",
        "1",
        "--out",
        file.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let loaded = read_edge_list_file(&file).unwrap();
    assert_eq!(loaded, sample_sbm(&[30; 4], 0.1, 0.005, 1).unwrap());
}

#[test]
fn gtf_trace_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    snake(&[
        "gen-sbm",
        "--blocks",
        "2x30",
        "--seed",
        "3",
        "--out",
        graph.to_str().unwrap(),
    ]);
    let run = |name: &str| {
        let trace = dir.path().join(name);
        let out = snake(&[
            "gtf",
            "--graph",
            graph.to_str().unwrap(),
            "--lambda",
            "auto",
            "--solver",
            "snake",
            "--L",
            "nodes",
            "--schedule",
            "inv_n:0.1V",
            "--seed",
            "7",
            "--max-iters",
            "40",
            "--eval-every",
            "5",
            "--out",
            trace.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{out:?}");
        assert!(stdout(&out).starts_with("FINAL objective="));
        deterministic_columns(&trace)
    };
    let a = run("a.csv");
    assert_eq!(a.len(), 9);
    assert_eq!(a, run("b.csv"));
}

#[test]
fn bench_writes_aligned_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("bench");
    let out = snake(&[
        "bench",
        "--problem",
        "gtf",
        "--sbm",
        "2x25",
        "--solvers",
        "snake,pg-dual",
        "--L",
        "10,V",
        "--schedule",
        "inv_n:E",
        "--max-iters",
        "60",
        "--eval-every",
        "10",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    assert_eq!(
        stdout(&out)
            .lines()
            .filter(|l| l.starts_with("FINAL "))
            .count(),
        3
    );
    for name in ["snake_L10.csv", "snake_L50.csv", "pg-dual.csv"] {
        let rows = deterministic_columns(&out_dir.join(name));
        let iters: Vec<&str> = rows.iter().map(|r| r.0.as_str()).collect();
        assert_eq!(iters, ["0", "10", "20", "30", "40", "50", "60"], "{name}");
    }
}

#[test]
fn inpaint_from_files_agrees_with_cg() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    fs::write(&graph, "1 2\n2 3\n3 4\n4 1\n2 4\n").unwrap();
    let signal = dir.path().join("y.csv");
    fs::write(&signal, "node,value\n1,1.0\n2,0\n3,-1.0\n4,0\n").unwrap();
    let mask = dir.path().join("mask.csv");
    fs::write(&mask, "node,observed\n1,1\n3,1\n").unwrap();
    let solution = dir.path().join("x.csv");
    let common = [
        "inpaint",
        "--graph",
        graph.to_str().unwrap(),
        "--signal",
        signal.to_str().unwrap(),
        "--mask",
        mask.to_str().unwrap(),
    ];
    let mut cg_args = common.to_vec();
    cg_args.extend(["--solver", "cg", "--solution", solution.to_str().unwrap()]);
    let cg = snake(&cg_args);
    assert!(cg.status.success(), "{cg:?}");
    // nodes 2 and 4 are each adjacent to 1, 3 and each other: both end at 0
    assert!((summary_objective(&cg) - 4.0).abs() < 1e-9);
    let x = fs::read_to_string(&solution).unwrap();
    assert!(x.starts_with("node,value\n1,1.0"));

    let mut snake_args = common.to_vec();
    snake_args.extend([
        "--L",
        "4",
        "--schedule",
        "inv_n:0.5E",
        "--max-iters",
        "3000",
        "--eval-every",
        "3000",
    ]);
    let s = snake(&snake_args);
    assert!(s.status.success(), "{s:?}");
    assert!((summary_objective(&s) - 4.0).abs() < 1e-3);
}

#[test]
fn lapsys_requires_centered_rhs() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    fs::write(&graph, "0 1\n1 2\n2 0\n").unwrap();
    let rhs = dir.path().join("b.csv");
    fs::write(&rhs, "node,value\n0,1\n1,1\n2,1\n").unwrap();
    let base = [
        "lapsys",
        "--graph",
        graph.to_str().unwrap(),
        "--rhs",
        rhs.to_str().unwrap(),
    ];
    assert_eq!(snake(&base).status.code(), Some(1));
    let mut centered = base.to_vec();
    centered.extend(["--center", "--solver", "cg"]);
    let out = snake(&centered);
    assert!(out.status.success());
    assert!(summary_objective(&out) < 1e-12);
}

#[test]
fn exit_codes() {
    assert_eq!(snake(&["gtf"]).status.code(), Some(2));
    assert_eq!(
        snake(&["gtf", "--sbm", "2x5", "--schedule", "inv_n:-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        snake(&["gtf", "--sbm", "2x5", "--L", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        snake(&[
            "bench",
            "--problem",
            "lapsys",
            "--sbm",
            "2x5",
            "--solvers",
            "pg-dual",
            "--out-dir",
            "/tmp/x"
        ])
        .status
        .code(),
        Some(2)
    );
    let missing = snake(&["gtf", "--graph", "/nonexistent/graph.txt"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(!missing.stderr.is_empty());
    assert_eq!(snake(&["--help"]).status.code(), Some(0));
}
