use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heatlab"))
}

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(scenario: &Path, out: &Path) -> Output {
    bin().arg("run").arg(scenario).arg("--out").arg(out).arg("--quiet").output().unwrap()
}

fn write_scenario(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("scenario.json");
    fs::write(&path, body).unwrap();
    path
}

fn graph_file(name: &str) -> String {
    corpus("graphs").join(name).display().to_string()
}

#[test]
fn list_checks_names_the_catalogue() {
    let out = bin().arg("list-checks").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["spectrum", "chapman_kolmogorov", "joint_hoelder", "wave_bound", "cocycle", "nonauto_hoelder"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
    assert_eq!(text.lines().count(), 19);
}

#[test]
fn passing_scenario_writes_its_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&corpus("axioms_interval.json"), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "pass");
    for artifact in report["artifacts"].as_array().unwrap() {
        assert!(dir.path().join(artifact.as_str().unwrap()).exists());
    }
    let spectrum = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(spectrum.lines().next(), Some("index,eigenvalue"));
    let meta: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("metadata.json")).unwrap()).unwrap();
    assert!(meta["elapsed_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn failing_check_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&corpus("negative_control.json"), dir.path());
    assert_eq!(out.status.code(), Some(2));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["checks"][0]["status"], "fail");
}

#[test]
fn unfittable_exponent_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        &format!(
            r#"{{"name": "coarse", "instance": {{"kind": "graph", "file": "{}"}}, "mesh": {{"h": 0.25}},
               "checks": [{{"name": "pointwise_exponent", "params": {{"t": 0.1, "point": {{"index": 0}}, "band": [0.5, 1.5]}}}}]}}"#,
            graph_file("interval_dirichlet.json")
        ),
    );
    let out = run(&scenario, &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn empty_check_list_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&corpus("artifacts_only.json"), dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(report["checks"].as_array().unwrap().is_empty());
}

#[test]
fn schema_errors_exit_with_four_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        r#"{"name": "bad", "instance": {"kind": "gasket", "level": 2}, "checks": [], "colour": "red"}"#,
    );
    let out = run(&scenario, &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    let scenario = write_scenario(
        dir.path(),
        r#"{"name": "bad", "instance": {"kind": "gasket", "level": "two"}, "checks": []}"#,
    );
    let out = run(&scenario, &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("instance"));
}

#[test]
fn unknown_or_misplaced_checks_exit_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        r#"{"name": "bad", "instance": {"kind": "gasket", "level": 2}, "checks": [{"name": "telepathy", "params": {}}]}"#,
    );
    assert_eq!(run(&scenario, &dir.path().join("out")).status.code(), Some(4));
    let scenario = write_scenario(
        dir.path(),
        r#"{"name": "bad", "instance": {"kind": "gasket", "level": 2}, "checks": [{"name": "wave_modes", "params": {}}]}"#,
    );
    let out = run(&scenario, &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("checks[0]"));
    let scenario = write_scenario(
        dir.path(),
        r#"{"name": "bad", "instance": {"kind": "gasket", "level": 2}, "checks": [{"name": "symmetry", "params": {"t": -1}}]}"#,
    );
    assert_eq!(run(&scenario, &dir.path().join("out")).status.code(), Some(4));
}

#[test]
fn argument_errors_exit_with_four() {
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(4));
    assert_eq!(bin().arg("run").output().unwrap().status.code(), Some(4));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
    let missing = bin().args(["run", "/nonexistent/scenario.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(4));
}

#[test]
fn export_space_emits_parseable_documents() {
    let out = bin().arg("export-space").arg(corpus("artifacts_only.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["gasket"]["level"], 2);
    let n = doc["points"].as_array().unwrap().len();
    assert_eq!(doc["dist"].as_array().unwrap().len(), n * n);

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("space.json");
    let out = bin().arg("export-space").arg(corpus("axioms_star.json")).arg("--out").arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let space = heatlab::space::SampledSpace::from_json(&fs::read_to_string(file).unwrap()).unwrap();
    assert!(space.check_triangle(1e-12).is_ok());

    let out = bin().arg("export-space").arg(corpus("damped_wave.json")).output().unwrap();
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["dist"].as_array().unwrap().iter().any(|d| d == "inf"));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["axioms_star.json", "negative_control.json", "damped_wave.json"] {
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        run(&corpus(name), &a);
        run(&corpus(name), &b);
        let ra = fs::read(a.join("report.json")).unwrap();
        let rb = fs::read(b.join("report.json")).unwrap();
        assert!(ra == rb, "{name} differs between runs");
    }
}

#[test]
fn library_entry_point_matches_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lib");
    let code = heatlab::cli::main_with_args([
        "heatlab".as_ref(),
        "run".as_ref(),
        corpus("artifacts_only.json").as_os_str(),
        "--out".as_ref(),
        out.as_os_str(),
        "--quiet".as_ref(),
    ]);
    assert_eq!(code, 0);
    assert!(out.join("report.json").exists());
}
