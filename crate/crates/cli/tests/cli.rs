//! End-to-end runs of the quditphase binary: pinned matrices, grid sweeps
//! against closed forms, block-store reuse, report shape, determinism, and
//! the exit-code contract.

use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_quditphase"));
    cmd.env_remove("QUDITPHASE_CACHE");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_str(&stdout_str(out)).expect("stdout parses as JSON")
}

fn csv_rows(text: &str) -> (String, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().expect("header").to_string();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().expect("numeric cell")).collect())
        .collect();
    (header, rows)
}

fn entry(doc: &Value, a: usize, b: usize) -> (f64, f64) {
    let cell = &doc["matrix"][a][b];
    (cell[0].as_f64().unwrap(), cell[1].as_f64().unwrap())
}

#[test]
fn kernel_matrices_match_pinned_values() {
    let out = run(&["kernel", "-D", "2", "-N", "1", "-s", "0", "--at", "0,0"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    let hi = (1.0 + 3f64.sqrt()) / 2.0;
    let lo = (1.0 - 3f64.sqrt()) / 2.0;
    assert!((entry(&doc, 0, 0).0 - hi).abs() < 1e-12);
    assert!((entry(&doc, 1, 1).0 - lo).abs() < 1e-12);
    assert!(entry(&doc, 0, 1).0.abs() < 1e-15);

    let out = run(&["kernel", "-D", "3", "-N", "1", "-s", "0", "--at", "0,0,0,0"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert!((entry(&doc, 0, 0).0 - 5.0 / 3.0).abs() < 1e-12);
    for k in 1..3 {
        assert!((entry(&doc, k, k).0 + 1.0 / 3.0).abs() < 1e-12);
    }

    let out = run(&["kernel", "-D", "2", "-N", "0", "-s", "1", "--at", "0,0"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["dim"], 1);
    assert!((entry(&doc, 0, 0).0 - 1.0).abs() < 1e-15);
}

#[test]
fn maximally_mixed_sweep_is_flat_at_one_over_dim() {
    let out = run(&[
        "dist", "-D", "2", "-N", "2", "-s", "0", "--state", "mixed", "--grid",
        "x1:-2:2:3,y1:-2:2:3",
    ]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&stdout_str(&out));
    assert_eq!(header, "x1,y1,F");
    assert_eq!(rows.len(), 9);
    for row in &rows {
        assert_eq!(row.len(), 3);
        assert!((row[2] - 1.0 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn smoothest_member_of_coherent_state_is_the_overlap_power() {
    let out = run(&[
        "dist", "-D", "2", "-N", "3", "-s", "-1", "--state", "coherent:0,0", "--grid",
        "x1:-1.5:1.5:4,y1:-1:1:3",
    ]);
    assert!(out.status.success());
    let (_, rows) = csv_rows(&stdout_str(&out));
    assert_eq!(rows.len(), 12);
    for row in &rows {
        let q = 1.0 / (1.0 + row[0] * row[0] + row[1] * row[1]);
        assert!((row[2] - q.powi(3)).abs() < 1e-12, "at ({}, {})", row[0], row[1]);
    }
}

#[test]
fn even_cat_self_dual_values_match_the_closed_form() {
    let out = run(&[
        "dist", "-D", "2", "-N", "2", "-s", "0", "--state", "cat:0:1,0", "--grid",
        "x1:-1:1:3,y1:-1:1:3",
    ]);
    assert!(out.status.success());
    let (_, rows) = csv_rows(&stdout_str(&out));
    let s10 = 10f64.sqrt();
    for row in &rows {
        let r = row[0] * row[0] + row[1] * row[1] + 1.0;
        let want = (s10 + 2.0) / 6.0 - 2.0 * s10 * row[1] * row[1] / (r * r);
        assert!((row[2] - want).abs() < 1e-10, "at ({}, {})", row[0], row[1]);
    }
}

#[test]
fn identical_invocations_emit_identical_bytes() {
    let args = [
        "dist",
        "-D",
        "3",
        "-N",
        "2",
        "-s",
        "0",
        "--state",
        r#"{"kind":"cat","z":[0.7,0,0.4,0],"parity":[0,1]}"#,
        "--grid",
        "x1:-2:2:5,x2:-2:2:5",
        "--section",
        "position",
        "--format",
        "json",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let doc = stdout_json(&first);
    assert_eq!(doc["columns"].as_array().unwrap().len(), 5);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 25);
    assert_eq!(doc["section"], "position");
}

#[test]
fn block_store_reuse_reproduces_direct_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let dir_arg = dir.path().to_str().unwrap();

    let built = run(&["kernel", "-D", "2", "-N", "3", "--cache-dir", dir_arg]);
    assert!(built.status.success());
    let doc = stdout_json(&built);
    assert!(doc["blocks"].as_u64().unwrap() > 0);
    let store = dir.path().join("kernel-D2-N3.json");
    assert!(store.exists());

    let direct = run(&["kernel", "-D", "2", "-N", "3", "-s", "-1", "--at", "0.4,-0.3"]);
    let cached = run(&[
        "kernel", "-D", "2", "-N", "3", "-s", "-1", "--at", "0.4,-0.3", "--cache-dir", dir_arg,
    ]);
    assert!(direct.status.success() && cached.status.success());
    assert_eq!(direct.stdout, cached.stdout);

    std::fs::write(&store, b"not json").unwrap();
    let broken = run(&[
        "kernel", "-D", "2", "-N", "3", "-s", "-1", "--at", "0.4,-0.3", "--cache-dir", dir_arg,
    ]);
    assert_eq!(broken.status.code(), Some(3));
}

#[test]
fn environment_variable_names_the_store_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("QUDITPHASE_CACHE", dir.path())
        .args(["kernel", "-D", "2", "-N", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("kernel-D2-N1.json").exists());
}

#[test]
fn verify_reports_are_machine_readable() {
    let out = run(&["verify", "young", "-D", "2..5", "-N", "0..8"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["allPassed"], true);
    assert_eq!(doc["checks"].as_array().unwrap().len(), 4);

    let out = run(&["verify", "heat", "-D", "2", "-N", "2"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["allPassed"], true);
    let checks = doc["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["residual"].is_f64()));
    for c in checks {
        assert_eq!(c["passed"], true, "{}", c["name"]);
    }
}

#[test]
fn tolerance_regates_residual_checks() {
    let out = run(&[
        "verify", "harmonic", "-D", "2", "-N", "0..2", "--tolerance", "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert_eq!(doc["allPassed"], false);

    let out = run(&[
        "verify", "harmonic", "-D", "2", "-N", "0..2", "--tolerance", "1e-3",
    ]);
    assert!(out.status.success());
}

#[test]
fn precision_bits_coarsen_printed_values() {
    let out = run(&[
        "dist", "-D", "2", "-N", "2", "--state", "mixed", "--grid", "x1:0:1:2,y1:0:1:2",
        "--precision-bits", "20",
    ]);
    assert!(out.status.success());
    let (_, rows) = csv_rows(&stdout_str(&out));
    for row in &rows {
        let f = row[2];
        assert!(f != 1.0 / 3.0);
        assert!((f - 1.0 / 3.0).abs() < 1e-5);
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    let usage: &[&[&str]] = &[
        &["dist", "-D", "2", "-N", "2", "--state", "mixed", "--grid", "z1:0:1:5"],
        &["dist", "-D", "2", "-N", "2", "--state", "mixed", "--grid", "x1:0:1:1"],
        &["dist", "-D", "2", "-N", "2", "--state", "nonsense", "--grid", "x1:0:1:2"],
        &["dist", "-D", "2", "-N", "2", "--state", "mixed", "--grid", "y1:0:1:3", "--section", "position"],
        &["kernel", "-D", "2", "-N", "1", "--at", "0,0,0,0"],
        &["kernel", "-D", "2", "-N", "1", "--at", "0,0", "--precision-bits", "54"],
        &["kernel", "-D", "2", "-N", "1"],
        &["verify", "nope"],
        &["verify", "young", "-D", "5..2"],
        &["--bogus"],
    ];
    for args in usage {
        assert_eq!(run(args).status.code(), Some(1), "{args:?}");
    }

    let degenerate: &[&[&str]] = &[
        &["kernel", "-D", "1", "-N", "1", "--at", "0,0"],
        &["dist", "-D", "2", "-N", "2", "--state", "cat:1:0,0", "--grid", "x1:0:1:2"],
        &["dist", "-D", "2", "-N", "2", "--state", "fock:7", "--grid", "x1:0:1:2"],
    ];
    for args in degenerate {
        assert_eq!(run(args).status.code(), Some(3), "{args:?}");
    }

    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_flag_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let base = [
        "dist", "-D", "2", "-N", "1", "-s", "1", "--state", "fock:0", "--grid", "x1:-1:1:3,y1:-1:1:3",
    ];
    let streamed = run(&base);
    assert!(streamed.status.success());
    let mut with_file: Vec<&str> = base.to_vec();
    let path_str = path.to_str().unwrap();
    with_file.extend(["--output", path_str]);
    let wrote = run(&with_file);
    assert!(wrote.status.success());
    assert!(wrote.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), streamed.stdout);
}
