use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn turan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_turan"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env_remove("TURAN_TOL")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn assert_usage_error(out: &Output) {
    assert_eq!(code(out), 2, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.trim_end().lines().count(), 1, "diagnostic must be one line: {err:?}");
    assert!(out.stdout.is_empty());
}

#[test]
fn construct_emits_dominated_turan_graph() {
    let out = turan(&["construct", "--n", "9", "--k", "2", "--r", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["payload"]["edges"], 24);
    assert_eq!(v["payload"]["parts"], serde_json::json!([4, 4]));
    let g = turan_core::graph6::decode(v["payload"]["graph6"].as_str().unwrap()).unwrap();
    let expected = turan_core::extremal_graph(9, 2, 2).unwrap().graph;
    assert!(turan_core::canon::is_isomorphic(&g, &expected).unwrap());
    assert_eq!(g.degree(0), 8);
}

#[test]
fn rho_of_k33_is_three() {
    let dir = tempfile::tempdir().unwrap();
    let k33 = turan_core::graph::complete_multipartite(&[3, 3]).unwrap();
    let path = write(dir.path(), "k33.g6", &format!("{}\n", turan_core::graph6::encode(&k33)));
    let out = turan(&["rho", "--graph6", &path, "--tol", "1e-10"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let rho: f64 = v["payload"]["rho"].as_str().unwrap().parse().unwrap();
    assert!((rho - 3.0).abs() <= 1e-10);
    assert_eq!(v["payload"]["converged"], true);
}

#[test]
fn search_exhaustive_populates_verdict() {
    let out = turan(&["search-exhaustive", "--n", "8", "--k", "2", "--r", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["payload"]["matches_conjecture"], "no");
    // Asserting the match turns the same verdict into status 1.
    let out = turan(&["search-exhaustive", "--n", "8", "--k", "2", "--r", "2", "--assert"]);
    assert_eq!(code(&out), 1);
    let out = turan(&["search-exhaustive", "--n", "7", "--k", "1", "--r", "2", "--assert"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn exit_codes_per_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.g6", "D?{x\n");
    let two = write(dir.path(), "two.g6", "A_\nA_\n");
    let k5 = write(dir.path(), "k5.g6", &format!("{}\n", turan_core::graph6::encode(&turan_core::graph::complete_multipartite(&[1; 5]).unwrap())));

    let ok: &[&[&str]] = &[
        &["construct", "--n", "7", "--k", "2", "--r", "2"],
        &["rho", "--n", "10", "--k", "2", "--r", "3"],
        &["free", "--n", "10", "--k", "2", "--r", "2", "--assert"],
        &["ex", "--n", "6..=12", "--k", "1..=3", "--r", "2", "--assert"],
        &["f", "--nu", "1..=2", "--delta", "1..=2", "--oracle-n-max", "6", "--assert"],
        &["search-exhaustive", "--n", "6", "--k", "1", "--r", "2", "--objective", "edges", "--assert"],
        &["search-local", "--n", "14", "--k", "2", "--r", "2", "--restarts", "2", "--assert"],
        &["crossover", "--n", "7..=9", "--k", "2", "--r", "2", "--assert"],
        &["audit", "--n", "20", "--k", "2", "--r", "2", "--assert"],
    ];
    for args in ok {
        let out = turan(args);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }

    let verification: &[&[&str]] = &[
        &["free", "--graph6", &k5, "--k", "1", "--r", "2", "--assert"],
        &["search-local", "--n", "8", "--k", "2", "--r", "2", "--restarts", "2", "--assert"],
        &["crossover", "--n", "5..=8", "--k", "2", "--r", "2", "--assert"],
        &["audit", "--graph6", &k5, "--k", "2", "--r", "2", "--assert"],
    ];
    for args in verification {
        assert_eq!(code(&turan(args)), 1, "{args:?}");
    }

    let usage: &[&[&str]] = &[
        &[],
        &["frobnicate"],
        &["construct", "--n", "9", "--k", "2"],
        &["construct", "--n", "9", "--k", "2", "--r", "2", "--bogus"],
        &["construct", "--n", "9", "--k", "0", "--r", "2"],
        &["construct", "--n", "5000", "--k", "2", "--r", "2"],
        &["rho", "--graph6", &bad],
        &["rho", "--graph6", &two],
        &["rho", "--graph6", "/nonexistent/file.g6"],
        &["rho", "--n", "9", "--k", "2", "--r", "2", "--tol", "-1"],
        &["rho"],
        &["free", "--graph6", &bad, "--k", "2", "--r", "2"],
        &["ex", "--n", "9..5", "--k", "2", "--r", "2"],
        &["ex", "--n", "9..=5", "--k", "2", "--r", "2"],
        &["f", "--nu", "x", "--delta", "1"],
        &["search-exhaustive", "--n", "12", "--k", "2", "--r", "2"],
        &["search-exhaustive", "--n", "8", "--k", "2", "--r", "2", "--objective", "area"],
        &["search-local", "--n", "8", "--k", "2", "--r", "2", "--format", "xml"],
        &["crossover", "--n", "9", "--k", "2"],
        &["audit", "--graph6", &bad, "--k", "2", "--r", "2"],
        &["replay", "/nonexistent/report.json"],
    ];
    for args in usage {
        let out = turan(args);
        assert_usage_error(&out);
    }

    for args in [&["--help"][..], &["--version"], &["rho", "--help"]] {
        assert_eq!(code(&turan(args)), 0, "{args:?}");
    }
}

#[test]
fn non_converged_rho_is_a_failure() {
    // A tolerance below machine precision cannot be met on a graph that
    // needs iterating.
    let out = turan(&["rho", "--n", "11", "--k", "2", "--r", "3", "--tol", "1e-300"]);
    let v = json(&out);
    let converged = v["payload"]["converged"].as_bool().unwrap();
    assert_eq!(code(&out), if converged { 0 } else { 1 });
    assert!(!converged, "expected the eigensolve to give up");
}

#[test]
fn tolerance_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_turan"))
        .args(["rho", "--n", "9", "--k", "2", "--r", "2"])
        .env("TURAN_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["args"]["tol"], 1e-6);
    let out = Command::new(env!("CARGO_BIN_EXE_turan"))
        .args(["rho", "--n", "9", "--k", "2", "--r", "2"])
        .env("TURAN_TOL", "small")
        .output()
        .unwrap();
    assert_usage_error(&out);
}

#[test]
fn identical_command_gives_identical_bytes() {
    let runs: &[&[&str]] = &[
        &["search-local", "--n", "16", "--k", "2", "--r", "2", "--restarts", "3", "--seed", "11"],
        &["audit", "--n", "25", "--k", "3", "--r", "2", "--seed", "4"],
        &["crossover", "--n", "8..=11", "--k", "2", "--r", "2", "--restarts", "2", "--seed", "5"],
    ];
    for args in runs {
        let a = turan(args);
        let b = turan(args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    // Thread count does not reach the payload.
    let base = ["search-local", "--n", "15", "--k", "2", "--r", "3", "--restarts", "3"];
    let one = turan(&[&base[..], &["--jobs", "1"]].concat());
    let four = turan(&[&base[..], &["--jobs", "4"]].concat());
    assert_eq!(json(&one)["payload"], json(&four)["payload"]);
}

#[test]
fn out_file_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let report_s = report.to_str().unwrap();
    let out = turan(&["search-local", "--n", "13", "--k", "2", "--r", "2", "--restarts", "2", "--seed", "3", "--out", report_s]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.ends_with("}\n"));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["seed"], 3);
    assert_eq!(v["timestamp"], "2023-11-14T22:13:20Z");
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1, "atomic write leaves no temp file");

    let replay = turan(&["replay", report_s]);
    assert_eq!(code(&replay), 0);
    assert_eq!(json(&replay)["payload"]["identical"], true);

    let mut tampered = v.clone();
    tampered["payload"]["best_rho"] = Value::from("0.0");
    std::fs::write(&report, serde_json::to_string_pretty(&tampered).unwrap()).unwrap();
    let replay = turan(&["replay", report_s]);
    assert_eq!(code(&replay), 1);
    assert_eq!(json(&replay)["payload"]["identical"], false);
}

#[test]
fn csv_summaries() {
    let out = turan(&["ex", "--n", "8..=9", "--k", "2", "--r", "2", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,k,r,value,formula_regime,construction_edges,consistent");
    assert_eq!(lines[2], "9,2,2,24,true,24,true");

    let dir = tempfile::tempdir().unwrap();
    let k4 = write(dir.path(), "k4.g6", "C~\n");
    let out = turan(&["free", "--graph6", &k4, "--k", "1", "--r", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("4,1,2,false,"), "{row}");
}
