use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn crate_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn sasaki(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sasaki")).args(args).output().expect("binary runs")
}

fn model(name: &str) -> String {
    crate_path(&format!("models/{name}.toml")).display().to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn report_on_unit_tangent_sphere_has_quarter_sectional_curvature() {
    let out = sasaki(&["report", &model("tangent-sphere")]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["seed"], 2718);
    assert_eq!(json["samples"], 1000);
    assert!((json["sectional"]["min"].as_f64().unwrap() - 0.25).abs() < 1e-10);
    assert!((json["sectional"]["max"].as_f64().unwrap() - 0.25).abs() < 1e-10);
    assert_eq!(json["scalar_curvature"]["value"], "3/2");
    assert!(json.get("timing_ms").is_none());
}

#[test]
fn report_on_atiyah_sphere_matches_the_closed_form_scalar() {
    let out = sasaki(&["report", &model("atiyah-sphere"), "--samples", "10"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["scalar_curvature"]["value"], "31/8");
}

#[test]
fn reports_with_the_same_seed_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let out = sasaki(&["report", &model("surface"), "--seed", "7", "--samples", "200", "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let other = sasaki(&["report", &model("surface"), "--seed", "8", "--samples", "200"]);
    assert_ne!(stdout(&other).into_bytes(), std::fs::read(&a).unwrap());
}

#[test]
fn timing_and_tolerance_flags_are_honored() {
    let out = sasaki(&["report", &model("generic"), "--samples", "5", "--tol", "1e-6", "--timing"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["inputs"]["tolerance"], 1e-6);
    assert!(json["timing_ms"].as_f64().is_some());
}

#[test]
fn malformed_document_exits_with_a_positioned_error() {
    let out = sasaki(&["report", crate_path("tests/fixtures/malformed.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 5, column 7"), "{}", stderr(&out));
}

#[test]
fn missing_file_and_bad_usage_exit_with_two() {
    assert_eq!(sasaki(&["report", "no/such/file.toml"]).status.code(), Some(2));
    assert_eq!(sasaki(&["report"]).status.code(), Some(2));
    assert_eq!(sasaki(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_suites_pass_and_print_a_summary() {
    for suite in ["trace-identity", "milnor-tables"] {
        let out = sasaki(&["verify", suite, "--samples", "10"]);
        assert!(out.status.success(), "{}", stdout(&out));
        assert!(stdout(&out).contains("0 failed (seed 2718)"), "{}", stdout(&out));
    }
}

#[test]
fn verify_on_corrupted_table_fails_with_a_witness() {
    let fixture = crate_path("tests/fixtures/corrupted-skew.toml");
    let out = sasaki(&["verify", "skew-adjoint", "--model", fixture.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("[FAIL]"), "{text}");
    assert!(text.contains("counterexample: entries (0,1) = 1/1 and (1,0) = 1/1"), "{text}");
}

#[test]
fn verify_unknown_suite_is_a_usage_error() {
    let out = sasaki(&["verify", "no-such-suite"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown suite"));
}

#[test]
fn scan_of_the_case_list_writes_five_positive_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cases.csv");
    let out = sasaki(&["scan", crate_path("grids/case-list.toml").to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "m,n,p,mu12,mu13,mu23,lambda1,lambda2,lambda3,verdict");
    assert_eq!(rows.len(), 6);
    assert!(rows[1..].iter().all(|r| r.ends_with(",true")));
}

#[test]
fn scan_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let empty = sasaki(&["scan", crate_path("tests/fixtures/empty-grid.toml").to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(empty.status.code(), Some(2));
    assert!(stderr(&empty).contains("empty parameter grid"));
    let unwritable = dir.path().join("missing-dir").join("out.csv");
    let out = sasaki(&["scan", crate_path("grids/case-list.toml").to_str().unwrap(), "--out", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn k_sweep_sectional_range_widens_toward_the_flat_value() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = sasaki(&["scan", crate_path("grids/k-sweep.toml").to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let widths: Vec<f64> = text
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(1) == Some("sectional"))
        .map(|l| l.split(',').nth(3).unwrap().parse::<f64>().unwrap_or(f64::INFINITY))
        .collect();
    assert_eq!(widths.len(), 40);
    assert!(widths.windows(2).all(|w| w[0] <= w[1]), "{widths:?}");
    // At r = 1 the predicate first holds at k = 9/5.
    assert!(widths[34] < 1.0 && widths[35] > 1.0, "{widths:?}");
    assert_eq!(widths[39], f64::INFINITY);
}
