use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hgsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgsc")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn synth_then_cluster_recovers_blobs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("blobs.csv");
    let out = hgsc(&["synth", "--blobs", "3", "--per-cluster", "20", "--separation", "20", "--seed", "3", "--out", p(&csv)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let res = dir.path().join("res");
    let out = hgsc(&["cluster", "--data", p(&csv), "--kappa", "3", "--seed", "1", "--out", p(&res)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let metrics = fs::read_to_string(res.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("metric,value\n"));
    let acc: f64 = metrics
        .lines()
        .find_map(|l| l.strip_prefix("accuracy,"))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(acc, 1.0);
    let assignments = fs::read_to_string(res.join("assignments.csv")).unwrap();
    assert_eq!(assignments.lines().count(), 61);
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for f in [&a, &b] {
        assert_eq!(code(&hgsc(&["synth", "--blobs", "2", "--seed", "9", "--out", p(f)])), 0);
    }
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn cluster_options_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("blobs.csv");
    hgsc(&["synth", "--blobs", "2", "--per-cluster", "15", "--out", p(&csv)]);
    let runs: [&[&str]; 5] = [
        &["--ablation", "PK"],
        &["--ablation", "CSC"],
        &["--alpha", "0.2", "--beta", "0.6", "--criterion", "nc"],
        &["--sigma", "1.5", "--k", "5"],
        &["--sigma-grid", "--threads", "1"],
    ];
    for extra in runs {
        let res = dir.path().join("res");
        let mut args = vec!["cluster", "--data", p(&csv), "--out", p(&res)];
        args.extend_from_slice(extra);
        let out = hgsc(&args);
        assert_eq!(code(&out), 0, "{extra:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn experiment_writes_result_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    fs::write(&cfg, "synth.per_cluster = 15\nseeds = 0..2\nlevels = 0, 0.5\nmethods = PKO, CSC\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = hgsc(&["experiment", "--config", p(&cfg), "--out", p(&out_dir), "--quiet"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let results = fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 1 + 2 * 2 * 2);
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2 * 2);
    assert!(out_dir.join("timings.csv").is_file());
    assert_eq!(fs::read_dir(out_dir.join("series")).unwrap().count(), 2);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&hgsc(&[])), 1);
    assert_eq!(code(&hgsc(&["frobnicate"])), 1);
    assert_eq!(code(&hgsc(&["cluster", "--data", "x.csv"])), 1);
    assert_eq!(code(&hgsc(&["cluster", "--data", "x.csv", "--out", "o", "--alpha", "0.5"])), 1);
    assert_eq!(code(&hgsc(&["cluster", "--data", "x.csv", "--out", "o", "--ablation", "PKX"])), 1);
    assert_eq!(code(&hgsc(&["--help"])), 0);

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("blobs.csv");
    hgsc(&["synth", "--blobs", "2", "--per-cluster", "10", "--out", p(&csv)]);
    let res = dir.path().join("res");
    let out = hgsc(&["cluster", "--data", p(&csv), "--out", p(&res), "--alpha", "0.9", "--beta", "0.9"]);
    assert_eq!(code(&out), 1);
    let out = hgsc(&["cluster", "--data", p(&csv), "--out", p(&res), "--kappa", "500"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let res = dir.path().join("res");
    let missing = dir.path().join("missing.csv");
    assert_eq!(code(&hgsc(&["cluster", "--data", p(&missing), "--kappa", "2", "--out", p(&res)])), 2);

    let ragged = dir.path().join("ragged.csv");
    fs::write(&ragged, "1,2\n3\n").unwrap();
    let out = hgsc(&["cluster", "--data", p(&ragged), "--kappa", "2", "--out", p(&res)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let header_only = dir.path().join("empty.csv");
    fs::write(&header_only, "a,b,label\n").unwrap();
    assert_eq!(code(&hgsc(&["cluster", "--data", p(&header_only), "--kappa", "2", "--out", p(&res)])), 2);
}

#[test]
fn numerical_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let same = dir.path().join("same.csv");
    fs::write(&same, "1,1\n1,1\n1,1\n1,1\n").unwrap();
    let res = dir.path().join("res");
    let out = hgsc(&["cluster", "--data", p(&same), "--kappa", "2", "--out", p(&res)]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}
