//! End-to-end checks of the command-line interface: exit codes, JSON
//! shapes, determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semigen"))
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const GOOD: &str = r#"{"vertices":[1,2,3],"edges":[[1,3],[3,2]]}"#;
// odd number of edges from the pair {1,2} toward the pair {3,4}
const PARITY_ODD: &str = r#"{"vertices":[1,2,3,4],"edges":[[1,3],[1,4],[2,3],[4,2]]}"#;

#[test]
fn validate_good_and_bad() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", GOOD);
    let out = bin().args(["validate", &good]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["valid"], true);

    let bad = write(dir.path(), "bad.json", PARITY_ODD);
    let out = bin().args(["validate", &bad]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["valid"], false);
    let witness = v["violation"].as_str().unwrap();
    assert!(witness.contains("parity"), "witness was: {witness}");
}

#[test]
fn usage_errors_exit_2() {
    let out = bin().args(["validate", "/nonexistent.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["expand", "x.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "expand needs a mode flag");
    let out = bin().args(["measure"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // --mc without --seed
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", GOOD);
    let out = bin()
        .args(["measure", &good, "--u", "1,3", "--mc", "100"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn expand_modes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", GOOD);
    let out = bin().args(["expand", &good, "--count"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["count"], "8");

    let out = bin().args(["expand", &good, "--check"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["ok"], true);

    let out = bin().args(["expand", &good, "--enumerate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let list = stdout_json(&out);
    assert_eq!(list.as_array().unwrap().len(), 8);
    assert!(list[0]["column_order"].is_array());
}

#[test]
fn measure_exact_and_mc() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", GOOD);
    let out = bin()
        .args(["measure", &good, "--u", "1,3", "--v", "1,2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["exact"], "1/8");

    // eps bits accepted
    let out = bin()
        .args(["measure", &good, "--u", "1,3;eps=0"])
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["exact"], "1/4");

    let run = || {
        bin()
            .args(["measure", &good, "--u", "1,3", "--mc", "20000", "--seed", "11"])
            .output()
            .unwrap()
    };
    let out = run();
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let est = v["estimate"].as_f64().unwrap();
    let (lo, hi) = (v["ci"][0].as_f64().unwrap(), v["ci"][1].as_f64().unwrap());
    assert!(lo <= 0.25 && 0.25 <= hi && lo <= est && est <= hi);
    // byte-identical output for identical (config, seed)
    assert_eq!(out.stdout, run().stdout);
    // job count must not change the result
    let out_jobs = bin()
        .args([
            "measure", &good, "--u", "1,3", "--mc", "20000", "--seed", "11", "--jobs", "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.stdout, out_jobs.stdout);
}

#[test]
fn generate_is_deterministic_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = bin()
            .args(["generate", "--seed", "5", "--steps", "60", "--max-demand-size", "1"])
            .args(["--out", path.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        std::fs::read_to_string(path).unwrap()
    };
    let a = run("a.json");
    assert_eq!(a, run("b.json"));
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["report"]["saturated"], true);
    // the emitted graph round-trips through validate
    let graph = write(dir.path(), "gen.json", &v["graph"].to_string());
    let out = bin().args(["validate", &graph]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn selfcheck_small_sweep_passes() {
    let out = bin()
        .args(["selfcheck", "--max-vertices", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["identities"].as_array().unwrap().len(), 5);
}

#[test]
fn dot_export() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", GOOD);
    let dot = dir.path().join("g.dot");
    let out = bin()
        .args(["validate", &good, "--dot", dot.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("cluster"));
}
