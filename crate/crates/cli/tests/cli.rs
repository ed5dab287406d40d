use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fuzzymech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fuzzymech"))
        .args(args)
        .env_remove("FUZZYMECH_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(format!("{name}.json"))
        .to_string_lossy()
        .into_owned()
}

#[test]
fn lists_all_scenarios() {
    let out = fuzzymech(&["list-scenarios"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "free-gaussian",
        "two-slit-pure",
        "two-slit-mixed",
        "n-slit",
        "diffusion-compare",
        "tail-exponent",
        "delta-limit",
        "potential-well",
        "oracle-crosscheck",
    ] {
        assert!(text.contains(name), "{name} missing from {text}");
    }
}

#[test]
fn prints_version() {
    let out = fuzzymech(&["version"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn validate_exit_codes() {
    assert_eq!(fuzzymech(&["validate", &config("two-slit-pure")]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"scenario": "two-slit-pure", "grid": {"x_min": 1, "x_max": -1, "n": 64}}"#).unwrap();
    let out = fuzzymech(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let missing = dir.path().join("absent.json");
    assert_eq!(fuzzymech(&["validate", missing.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn run_writes_outputs_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let report = dir.path().join("report.json");
    let out = fuzzymech(&[
        "run",
        &config("two-slit-pure"),
        "--output-dir",
        out_dir.to_str().unwrap(),
        "--json-report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("PASS"));
    assert!(out_dir.join("pattern.csv").is_file());
    let stored: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("run_report.json")).unwrap()).unwrap();
    assert!(stored.get("wall_time_s").is_none());
    assert_eq!(stored["passed"], true);
    let full: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(full["wall_time_s"].is_number());
}

#[test]
fn quiet_run_prints_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = fuzzymech(&["run", &config("oracle-crosscheck"), "--quiet", "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn failing_check_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(config("oracle-crosscheck")).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["tolerances"] = serde_json::json!({"oracle_l2": 0.0});
    let path = dir.path().join("strict.json");
    fs::write(&path, value.to_string()).unwrap();
    let out = fuzzymech(&["run", path.to_str().unwrap(), "--output-dir", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}
