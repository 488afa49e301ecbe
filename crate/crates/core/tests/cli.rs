use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn outerkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_outerkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn emit(dir: &Path, kind: &str) {
    let out = outerkit(&["emit-examples", "--out-dir", dir.to_str().unwrap(), "--kind", kind]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn walk_suite_on_generated_pair() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let csv = dir.path().join("p.csv");
    let out = outerkit(&[
        "run",
        "--generate",
        "pair:3",
        "--suite",
        "walk",
        "--depth",
        "12",
        "--out",
        report.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let r = read_report(&report);
    assert_eq!(r["report_version"], 1);
    assert_eq!(r["passed"], true);
    let mut rows = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(rows.headers().unwrap(), vec!["arrow", "n", "l1_distance"]);
    let values: Vec<f64> = rows.records().map(|r| r.unwrap()[2].parse().unwrap()).collect();
    assert_eq!(values.len(), 9 * 12);
    assert!(values.iter().all(|&v| v == 0.0));
}

#[test]
fn all_suites_pass_on_emitted_bundle_and_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    emit(dir.path(), "bundle:3:4");
    let file = |s: &str| {
        dir.path()
            .join(format!("bundle_3_4.{s}.json"))
            .to_str()
            .unwrap()
            .to_string()
    };
    let run = |out: &str| {
        outerkit(&[
            "run",
            "--input",
            &file("groupoid"),
            "--cocycle",
            &file("generator.cocycle"),
            "--measure",
            &file("perturbed.measure"),
            "--suite",
            "all",
            "--level",
            "3",
            "--out",
            out,
        ])
    };
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert!(run(a.to_str().unwrap()).status.success());
    assert!(run(b.to_str().unwrap()).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let r = read_report(&a);
    let suites: Vec<&str> = r["suites"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["suite"].as_str().unwrap())
        .collect();
    assert_eq!(suites, ["axioms", "cocycle", "walk", "model", "invariants", "appendix"]);
}

#[test]
fn corrupted_table_fails_with_the_violation_named() {
    let dir = tempfile::tempdir().unwrap();
    emit(dir.path(), "bundle:2:2");
    let path = dir.path().join("bundle_2_2.groupoid.json");
    let mut data: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // Arrow 1 is the generator over the first point: make 1·1 = 1 instead of 0.
    for row in data["compose"].as_array_mut().unwrap() {
        if row[0] == 1 && row[1] == 1 {
            row[2] = Value::from(1);
        }
    }
    std::fs::write(&path, data.to_string()).unwrap();
    let report = dir.path().join("r.json");
    let out = outerkit(&[
        "run",
        "--input",
        path.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r = read_report(&report);
    let axioms = &r["suites"][0];
    assert_eq!(axioms["suite"], "axioms");
    assert_eq!(axioms["passed"], false);
    assert!(axioms["checks"][0]["note"].as_str().unwrap().contains('1'));
    assert!(String::from_utf8_lossy(&out.stderr).contains("groupoid_axioms"));
}

#[test]
fn oversized_model_is_refused() {
    let out = outerkit(&[
        "run",
        "--generate",
        "transformation:4:4",
        "--suite",
        "model",
        "--level",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1024"));
}

#[test]
fn malformed_input_reports_its_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, "{\n  \"units\": [0,\n  ]\n}\n").unwrap();
    let out = outerkit(&["run", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("g.json:3:"), "{err}");
}

#[test]
fn invalid_parameters_are_rejected() {
    assert_eq!(
        outerkit(&["run", "--generate", "pair:2", "--tol", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        outerkit(&["run", "--generate", "pair:2", "--level", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        outerkit(&["run", "--generate", "pair:2", "--suite", "bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(outerkit(&["run", "--generate", "torus:3"]).status.code(), Some(2));
}
