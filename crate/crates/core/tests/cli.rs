use std::path::Path;
use std::process::{Command, Output};

fn corefair(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corefair"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn k4_pipeline_reports_beta_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(corefair(d, &["generate", "--name", "k4", "--out", "k4.json"]).status.code(), Some(0));
    let out = corefair(d, &["cluster", "--instance", "k4.json", "--alg", "greedy", "--trace", "t.json", "--out", "y.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&d.join("t.json")).get("events").is_some());
    let out = corefair(d, &["audit", "--instance", "k4.json", "--clustering", "y.json", "--alpha", "1", "--out", "a.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let audit = json(&d.join("a.json"));
    assert_eq!(audit["beta_min"], 2.0);
    assert_eq!(audit["in_core"], false);
}

#[test]
fn cli_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let params = r#"{"n": 120, "seed": 3}"#;
    corefair(d, &["generate", "--name", "gaussian", "--params", params, "--k", "4", "--out", "g.json"]);
    let out = corefair(d, &["cluster", "--instance", "g.json", "--alg", "kmeans", "--seed", "5", "--out", "y.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let inst = corefair::instance::load_instance(d.join("g.json")).unwrap();
    let mut p: corefair::instance::GaussianParams = serde_json::from_str(params).unwrap();
    p.k = 10;
    assert_eq!(inst, corefair::instance::gen_gaussian(&p).unwrap().with_k(4).unwrap());
    let lib = corefair::bench::run_algorithm(&inst, corefair::bench::AlgorithmSpec::KMeans, 5).unwrap();
    assert_eq!(corefair::instance::load_clustering(d.join("y.json")).unwrap(), lib);
}

#[test]
fn verify_suite_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = corefair(dir.path(), &["verify", "--suite", "thm5", "--trials", "50", "--json", "r.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("thm5 PASSED"));
    assert_eq!(json(&dir.path().join("r.json"))[0]["claims"][0]["trials"], 50);
}

#[test]
fn mismatched_k_is_a_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    corefair(d, &["generate", "--name", "clique", "--params", r#"{"n": 6}"#, "--k", "2", "--out", "c2.json"]);
    corefair(d, &["generate", "--name", "clique", "--params", r#"{"n": 6}"#, "--k", "3", "--out", "c3.json"]);
    corefair(d, &["cluster", "--instance", "c2.json", "--alg", "greedy", "--out", "y.json"]);
    let out = corefair(d, &["audit", "--instance", "c3.json", "--clustering", "y.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k = 3"));
}

#[test]
fn usage_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(corefair(d, &["cluster", "--bogus"]).status.code(), Some(1));
    assert_eq!(corefair(d, &["--version"]).status.code(), Some(0));
    let missing = corefair(d, &["audit", "--instance", "nope.json", "--clustering", "y.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let bad_alpha = {
        corefair(d, &["generate", "--name", "k4", "--out", "k4.json"]);
        corefair(d, &["cluster", "--instance", "k4.json", "--alg", "greedy", "--out", "y.json"]);
        corefair(d, &["audit", "--instance", "k4.json", "--clustering", "y.json", "--alpha", "0.5"])
    };
    assert_eq!(bad_alpha.status.code(), Some(2));
}

#[test]
fn bench_writes_a_run_directory() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let config = r#"{"datasets": ["gaussian:80", "line-beta:3"], "algorithms": ["greedy", "line"], "k_range": [2, 3], "seed": 1}"#;
    std::fs::write(d.join("bench.json"), config).unwrap();
    let out = corefair(d, &["--jobs", "2", "bench", "--config", "bench.json", "--out", "out"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let run = String::from_utf8_lossy(&out.stdout).trim().to_string();
    let run = d.join(run);
    assert_eq!(std::fs::read_to_string(run.join("rows.csv")).unwrap().lines().count(), 9);
    assert!(run.join("rows.json").exists() && run.join("report.txt").exists());
    assert!(run.join("plots/line-beta3_line_k3.svg").exists());
}
