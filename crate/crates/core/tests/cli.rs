use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vacone"))
}

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("VACONE_SEED").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_temp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn runs_a_problem_file() {
    let out = run(&["run", problem("exam0.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let ids: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["nc", "classical", "proximal"]);
    assert_eq!(v["tool"], "vacone");
}

#[test]
fn empty_problem_has_no_results() {
    let out = run(&["run", problem("empty.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["results"].as_array().unwrap().is_empty());
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_temp(
        &dir,
        "unknown.json",
        r#"{"queries":[{"id":"q","op":"limiting_normal_cone","set":"nope","point":[0,0]}]}"#,
    );
    let out = run(&["run", &unknown]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown set"));

    let broken = write_temp(&dir, "broken.json", "{oops");
    let out = run(&["run", &broken]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));

    let out = run(&["run", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let p = problem("exam0.json");
    let a = run(&["run", p.to_str().unwrap(), "--seed", "3"]);
    let b = run(&["run", p.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("out.json");
    let c = run(&["run", p.to_str().unwrap(), "--seed", "3", "--out", file.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(std::fs::read(&file).unwrap(), a.stdout);
}

#[test]
fn plots_two_dimensional_queries() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("nc.svg");
    let out = run(&["plot", problem("exam0.json").to_str().unwrap(), "nc", "--svg", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));

    let four = write_temp(
        &dir,
        "four.json",
        r#"{"sets":{"q":{"box":{"lo":[0,0,0,0],"hi":[1,1,1,1]}}},
            "queries":[{"id":"k","op":"limiting_normal_cone","set":"q","point":[0,0,0,0]}]}"#,
    );
    let out = run(&["plot", &four, "k"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("two-dimensional"));
}

#[test]
fn paper_suite_passes() {
    let out = run(&["paper-suite"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["failed"].as_array().unwrap().is_empty(), "{}", v["failed"]);

    let out = run(&["paper-suite", "--only", "exam2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["fixtures"], serde_json::json!(["exam2"]));
}

#[test]
fn tight_direction_tolerance_warns() {
    let out = run(&["paper-suite", "--tol-dir", "0.001"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning: tol_dir"));
}
