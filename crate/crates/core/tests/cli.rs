use std::path::Path;
use std::process::{Command, Output};

fn reibench(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reibench"))
        .current_dir(dir)
        .env_remove("REI_API_KEY")
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = reibench(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = reibench(dir, args);
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn generated(replicates: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["generate", "--replicates", replicates, "--seed", "2", "--out", "pool.jsonl"]);
    dir
}

#[test]
fn generate_sample_evaluate_report() {
    let dir = generated("2");
    let d = dir.path();
    let pool = std::fs::read_to_string(d.join("pool.jsonl")).unwrap();
    assert_eq!(pool.lines().count(), 33 * 2 * 9);

    let summary = ok(d, &["sample", "--dataset", "pool.jsonl", "--n", "8", "--proportions", "uniform", "--out", "sub.jsonl"]);
    assert!(summary.contains("counts "), "{summary}");
    assert_eq!(std::fs::read_to_string(d.join("sub.jsonl")).unwrap().lines().count(), 8 * 9);

    ok(d, &["evaluate", "--dataset", "sub.jsonl", "--mode", "context-blind", "--run-id", "base"]);
    ok(d, &["evaluate", "--dataset", "sub.jsonl", "--mode", "context-blind", "--strategy", "tocc", "--run-id", "tocc"]);
    for run in ["base", "tocc"] {
        let records = std::fs::read_to_string(d.join("runs").join(run).join("records.jsonl")).unwrap();
        assert_eq!(records.lines().count(), 72);
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(d.join("runs").join(run).join("manifest.json")).unwrap()).unwrap();
        assert!(manifest.is_object());
    }

    let md = ok(d, &["report", "--records", "runs/tocc/records.jsonl", "--baseline", "runs/base/records.jsonl"]);
    assert!(md.contains("| Method | Avg Input | Avg Output | Avg Total | Latency (ms) |"), "{md}");
    assert!(md.contains("+100.0"), "{md}");
    let csv = ok(d, &["report", "--records", "runs/base/records.jsonl", "runs/tocc/records.jsonl", "--format", "csv"]);
    assert!(csv.starts_with("run_id,planner,strategy,level,context,n,"));
    assert_eq!(csv.lines().count(), 1 + 2 * 9);
    let json = ok(d, &["report", "--records", "runs/base/records.jsonl", "--format", "json"]);
    serde_json::from_str::<serde_json::Value>(&json).unwrap();
}

#[test]
fn sample_counts_follow_the_proportions() {
    let dir = generated("3");
    let out = ok(dir.path(), &["sample", "--dataset", "pool.jsonl", "--n", "12", "--out", "s.jsonl"]);
    let counts = out.lines().find_map(|l| l.strip_prefix("counts ")).unwrap();
    let total: u64 = counts.split('/').map(|c| c.parse::<u64>().unwrap()).sum();
    assert_eq!(total, 12);
    // too few units of a kind in the pool
    let (c, err) = code(dir.path(), &["sample", "--dataset", "pool.jsonl", "--n", "1000"]);
    assert_eq!(c, 1, "{err}");
}

#[test]
fn inspect_shows_one_episode() {
    let dir = generated("1");
    let first = std::fs::read_to_string(dir.path().join("pool.jsonl")).unwrap();
    let v: serde_json::Value = serde_json::from_str(first.lines().next().unwrap()).unwrap();
    let id = v["id"].as_str().unwrap();
    let shown = ok(dir.path(), &["inspect", id, "--dataset", "pool.jsonl"]);
    assert!(shown.contains(id), "{shown}");
    let (c, err) = code(dir.path(), &["inspect", "nope", "--dataset", "pool.jsonl"]);
    assert_eq!(c, 1);
    assert!(err.contains("nope"));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = generated("1");
    let d = dir.path();
    std::fs::write(
        d.join("cfg.json"),
        r#"{"dataset": "pool.jsonl", "scripted_mode": "perfect", "cells": "explicit", "run_id": "from-config"}"#,
    )
    .unwrap();
    ok(d, &["--config", "cfg.json", "evaluate"]);
    let records = std::fs::read_to_string(d.join("runs/from-config/records.jsonl")).unwrap();
    assert_eq!(records.lines().count(), 33 * 3);
    assert!(records.lines().all(|l| l.contains("\"success\":true")));

    std::fs::write(d.join("bad.json"), r#"{"datset": "pool.jsonl"}"#).unwrap();
    let (c, err) = code(d, &["--config", "bad.json", "evaluate"]);
    assert_eq!(c, 1);
    assert!(err.contains("datset"), "{err}");
}

#[test]
fn domain_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let dump = ok(d, &["domain", "dump"]);
    assert!(dump.contains("(define"));
    std::fs::write(d.join("dom.pddl"), &dump).unwrap();
    assert!(ok(d, &["domain", "validate", "dom.pddl"]).starts_with("ok:"));
    std::fs::write(d.join("broken.pddl"), "(define (domain x) (:action").unwrap();
    assert_eq!(code(d, &["domain", "validate", "broken.pddl"]).0, 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(d, &["--no-such-flag"]).0, 1);
    assert_eq!(code(d, &["evaluate"]).0, 1);
    assert_eq!(code(d, &["evaluate", "--dataset", "missing.jsonl"]).0, 1);
    assert_eq!(code(d, &["evaluate", "--dataset", "x", "--provider", "remote"]).0, 1);
    assert_eq!(code(d, &["generate", "--cells", "vague"]).0, 1);
    assert_eq!(code(d, &["--help"]).0, 0);
    // output path under a regular file cannot be created
    std::fs::write(d.join("file"), "").unwrap();
    assert_eq!(code(d, &["generate", "--out", "file/sub/out.jsonl"]).0, 2);
}
