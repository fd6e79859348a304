use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn quatframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatframe"))
        .args(args)
        .env_remove("QUATFRAME_TOL")
        .output()
        .expect("spawn quatframe")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bounds_of_h4_example() {
    let out = quatframe(&["bounds", path_str(&fixture("h4_example.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["A_opt"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["B_opt"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(v["isKFrame"], true);
    assert_eq!(v["isParsevalK"], true);
}

#[test]
fn check_dual_exit_codes() {
    let out = quatframe(&["check-dual", path_str(&fixture("h4_example.json"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["isKDual"], true);

    let out = quatframe(&["check-dual", path_str(&fixture("h3_approx.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["isKDual"], false);
}

#[test]
fn h3_example_is_not_approximate() {
    let out = quatframe(&["approx", path_str(&fixture("h3_approx.json"))]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!((v["deficit"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["isApproximateDual"], false);
}

#[test]
fn canonical_writes_a_dual_instance() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("canon.json");
    let out = quatframe(&[
        "canonical",
        path_str(&fixture("h4_example.json")),
        "-o",
        path_str(&dest),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["isKDual"], true);
    assert!((v["bounds"]["lowerLimit"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((v["bounds"]["upperLimit"].as_f64().unwrap() - 2.0).abs() < 1e-9);

    let out = quatframe(&["check-dual", path_str(&dest)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn suite_on_fixtures() {
    let out = quatframe(&["suite", path_str(&fixture("h4_example.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert!(v["checks"].as_array().unwrap().len() > 10);

    let out = quatframe(&["suite", path_str(&fixture("h3_approx.json"))]);
    assert_eq!(out.status.code(), Some(1));
    let failed: Vec<String> = json(&out)["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["hypothesisMet"] == true && c["conclusionHolds"] == false)
        .map(|c| c["name"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(failed, ["approx.deficit"]);
}

#[test]
fn gen_then_suite_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("inst.json");
    let args = [
        "gen",
        "--seed",
        "5",
        "--n",
        "4",
        "--m",
        "6",
        "--rank",
        "2",
        "--kind",
        "exact-dual",
        "-o",
    ];
    let mut full: Vec<&str> = args.to_vec();
    full.push(path_str(&dest));
    let out = quatframe(&full);
    assert_eq!(out.status.code(), Some(0));

    let written: Value = serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(written["n"], 4);
    assert_eq!(written["m"], 6);
    assert_eq!(written["metadata"]["rankK"], 2);

    // same seed, same bytes
    let again = dir.path().join("again.json");
    full.pop();
    full.push(path_str(&again));
    assert_eq!(quatframe(&full).status.code(), Some(0));
    assert_eq!(std::fs::read(&dest).unwrap(), std::fs::read(&again).unwrap());

    let out = quatframe(&["check-dual", path_str(&dest)]);
    assert_eq!(out.status.code(), Some(0));
    let out = quatframe(&["suite", path_str(&dest)]);
    assert_eq!(json(&out)["instance"]["seed"], 5);
}

#[test]
fn truncated_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("h4_example.json")).unwrap();
    let cut = dir.path().join("cut.json");
    std::fs::write(&cut, &text[..text.len() / 2]).unwrap();
    let out = quatframe(&["bounds", path_str(&cut)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("E002-syntax"), "{err}");
    assert!(err.contains("line"), "{err}");
}

#[test]
fn non_finite_entry_is_reported_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("h3_approx.json")).unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, text.replacen("0.5", "\"NaN\"", 1)).unwrap();
    let out = quatframe(&["bounds", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("E005-non-finite"), "{err}");
}

#[test]
fn tolerance_from_environment() {
    let h4 = fixture("h4_example.json");
    let out = Command::new(env!("CARGO_BIN_EXE_quatframe"))
        .args(["check-dual", path_str(&h4)])
        .env("QUATFRAME_TOL", "1e-3")
        .output()
        .unwrap();
    assert_eq!(json(&out)["tolerance"], 1e-3);

    // a flag wins over the environment
    let out = Command::new(env!("CARGO_BIN_EXE_quatframe"))
        .args(["check-dual", path_str(&h4), "--tol", "1e-6"])
        .env("QUATFRAME_TOL", "1e-3")
        .output()
        .unwrap();
    assert_eq!(json(&out)["tolerance"], 1e-6);

    let out = Command::new(env!("CARGO_BIN_EXE_quatframe"))
        .args(["check-dual", path_str(&h4)])
        .env("QUATFRAME_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(quatframe(&["--bogus"]).status.code(), Some(2));
    assert_eq!(quatframe(&["bounds", "/no/such/file.json"]).status.code(), Some(2));
    assert_eq!(
        quatframe(&[
            "gen",
            "--seed",
            "1",
            "--n",
            "3",
            "--m",
            "2",
            "--rank",
            "1",
            "-o",
            "/tmp/x.json"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn random_suite_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = quatframe(&[
        "suite",
        "--random",
        "5",
        "--seed",
        "1",
        "--kind",
        "approx-dual",
        "--max-n",
        "4",
    ]);
    let v = json(&out);
    assert_eq!(v["count"], 5);
    assert_eq!(v["reports"].as_array().unwrap().len(), 5);
    let code = out.status.code();
    assert_eq!(code, Some(if v["pass"] == true { 0 } else { 1 }));

    let saved = dir.path().join("batch.json");
    std::fs::write(&saved, &out.stdout).unwrap();
    let out = quatframe(&["report", path_str(&saved), "--human"]);
    assert_eq!(out.status.code(), code);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("batch baseSeed=1 count=5"), "{text}");
}

#[test]
fn human_table_for_single_report() {
    let out = quatframe(&["suite", path_str(&fixture("h3_approx.json")), "--human"]);
    let text = String::from_utf8_lossy(&out.stdout);
    let line = text.lines().find(|l| l.starts_with("approx.deficit")).unwrap();
    assert!(line.ends_with("FAIL"), "{line}");
    assert!(text.contains("overall: FAIL"));
}
