//! Exit-code and output contract of the `spinray` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spinray"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(sub: &str, cfg: &Path, out: &Path, seed: u64) -> Output {
    bin()
        .args([sub, "--config"])
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .args(["--seed", &seed.to_string()])
        .output()
        .expect("binary runs")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn compare_pitch_succeeds_and_writes_a_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run("compare-pitch", &config("compare_pitch.json"), tmp.path(), 0);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["schema"], "spinray/report-v1");
    assert_eq!(report["passed"], true);
    let ratio = report["metrics"]["ratio"].as_f64().unwrap();
    let expected = report["metrics"]["matter_angle"].as_f64().unwrap()
        / report["metrics"]["light_angle"].as_f64().unwrap();
    assert!((ratio - expected).abs() < 1e-15);
}

#[test]
fn trace_and_transport_accept_the_same_scenarios() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(exit_code(&run("trace", &config("circle.json"), &a, 7)), 0);
    assert_eq!(exit_code(&run("transport", &config("circle.json"), &b, 7)), 0);
    // Both gates run the same scenario, so the bytes agree file for file.
    for name in ["ray.csv", "transport.csv", "report.json"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name} differs between trace and transport runs"
        );
    }
}

#[test]
fn oscillator_and_em_subcommands_run_their_kinds() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run("oscillator", &config("oscillator_circle.json"), &tmp.path().join("osc"), 0);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let out = run("em", &config("em_grin.json"), &tmp.path().join("em"), 0);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn kind_mismatch_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run("trace", &config("oscillator.json"), tmp.path(), 0);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not belong"));
}

#[test]
fn missing_and_malformed_configs_are_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run("trace", &config("no_such_file.json"), tmp.path(), 0);
    assert_eq!(exit_code(&out), 2);

    let bad = tmp.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let out = run("trace", &bad, &tmp.path().join("out"), 0);
    assert_eq!(exit_code(&out), 2);

    // Physically invalid parameters also fail at parse time.
    let sub_rest = tmp.path().join("sub_rest.json");
    fs::write(
        &sub_rest,
        r#"{"schema": "spinray/config-v1",
            "scenario": {"kind": "compare_pitch", "r0": 1.0, "omega": 1.0,
                         "v_z": 0.9, "m": 1.0, "c": 1.0}}"#,
    )
    .unwrap();
    let out = run("compare-pitch", &sub_rest, &tmp.path().join("out2"), 0);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn verify_passes_a_clean_module_suite() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("verify_pauli.json");
    fs::write(
        &cfg,
        r#"{"schema": "spinray/config-v1", "scenario": {"kind": "verify", "suite": "pauli"}}"#,
    )
    .unwrap();
    let out = run("verify", &cfg, &tmp.path().join("out"), 11);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    // One line per invariant, each carrying the measured value and bound.
    assert!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count() >= 4);
    assert!(stdout.contains("measured"));
    assert!(stdout.contains("bound"));
}

#[test]
fn perturbed_verify_fails_with_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run("verify", &config("verify_perturbed.json"), tmp.path(), 3);
    assert_eq!(exit_code(&out), 1);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("[FAIL] transport.fixed-axis-tilted"),
        "the mis-signed generator must trip exactly the fixed-axis conservation check:\n{stdout}"
    );
    // The report still gets written, with passed = false.
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn unknown_suite_is_rejected_before_running() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("verify_bogus.json");
    fs::write(
        &cfg,
        r#"{"schema": "spinray/config-v1", "scenario": {"kind": "verify", "suite": "bogus"}}"#,
    )
    .unwrap();
    let out = run("verify", &cfg, &tmp.path().join("out"), 0);
    assert_eq!(exit_code(&out), 2);
}
