//! Scenario-runner contract: shipped configs are valid, runs are
//! byte-deterministic, and the emitted files honor their format promises.

use std::fs;
use std::path::{Path, PathBuf};

use spinray::scenario::{
    load_config, parse_config, run_scenario, sample_config, sample_configs, Report,
};

fn shipped_config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn shipped_configs_parse_and_validate() {
    let dir = shipped_config_dir();
    let mut seen = 0;
    for entry in fs::read_dir(&dir).expect("configs directory ships with the repo") {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        load_config(&path).unwrap_or_else(|err| panic!("{}: {err}", path.display()));
        seen += 1;
    }
    assert!(seen >= 11, "expected the full set of shipped configs, found {seen}");
}

#[test]
fn in_code_samples_match_their_shipped_files() {
    // The samples are the same scenarios the files describe; both must parse
    // to configs the runner accepts, and names must line up.
    let dir = shipped_config_dir();
    for (name, cfg) in sample_configs() {
        let path = dir.join(format!("{name}.json"));
        let shipped = load_config(&path).unwrap_or_else(|err| panic!("{name}: {err}"));
        assert_eq!(shipped.kind(), cfg.kind(), "{name} kind drifted from its shipped file");
    }
}

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    // Heavier kinds are covered by their own runs elsewhere; determinism is
    // about the writer path, which these three kinds cover completely
    // (matter CSVs, oscillator CSV, EM CSVs, metrics-only report).
    for name in ["circle", "em_grin", "oscillator", "compare_pitch"] {
        let cfg = sample_config(name).unwrap();
        let tmp = tempfile::tempdir().unwrap();
        let dir_a = tmp.path().join("a");
        let dir_b = tmp.path().join("b");
        run_scenario(&cfg, &dir_a, 42).unwrap();
        run_scenario(&cfg, &dir_b, 42).unwrap();

        let mut names: Vec<_> = fs::read_dir(&dir_a)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        assert_eq!(names.len(), fs::read_dir(&dir_b).unwrap().count(), "{name}");
        for file in &names {
            let a = fs::read(dir_a.join(file)).unwrap();
            let b = fs::read(dir_b.join(file)).unwrap();
            assert_eq!(a, b, "{name}/{file} differs between identical runs");
        }
    }
}

#[test]
fn reports_round_trip_and_stay_sorted() {
    let cfg = sample_config("helix_small_angle").unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let report = run_scenario(&cfg, tmp.path(), 0).unwrap();
    assert!(report.passed, "small-angle helix checks failed: {:?}", report.checks);
    assert!(
        report.checks.iter().any(|c| c.id == "helix.pitch-angle"),
        "small-angle regime must activate the formula check"
    );

    let text = fs::read_to_string(tmp.path().join("report.json")).unwrap();
    let parsed: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed, report);

    // Metric keys appear in sorted order in the file itself.
    let metric_lines: Vec<&str> = text
        .lines()
        .skip_while(|l| !l.contains("\"metrics\""))
        .take_while(|l| !l.trim_start().starts_with('}'))
        .skip(1)
        .filter_map(|l| l.trim_start().strip_prefix('"').and_then(|r| r.split('"').next()))
        .collect();
    let mut sorted = metric_lines.clone();
    sorted.sort_unstable();
    assert_eq!(metric_lines, sorted, "metrics must serialize in sorted key order");
}

#[test]
fn helix_run_skips_formula_outside_small_angle_regime() {
    let cfg = sample_config("helix").unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let report = run_scenario(&cfg, tmp.path(), 0).unwrap();
    assert!(report.passed, "{:?}", report.checks);
    assert!(report.checks.iter().any(|c| c.id == "helix.oracle-fidelity"));
    assert!(
        !report.checks.iter().any(|c| c.id == "helix.pitch-angle"),
        "the 5% formula only claims validity below 0.01 rad"
    );
}

#[test]
fn em_helix_run_matches_rytov_angle() {
    let cfg = sample_config("em_helix").unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let report = run_scenario(&cfg, tmp.path(), 0).unwrap();
    assert!(report.passed, "{:?}", report.checks);
    let rytov = report.checks.iter().find(|c| c.id == "em.frenet-rotation").unwrap();
    assert!(rytov.pass, "frame rotation off by {:e}", rytov.measured);
    assert_eq!(report.series, vec!["ray.csv", "em.csv"]);
    assert!(tmp.path().join("plot.py").exists());
}

#[test]
fn oscillator_rotation_preserves_every_check() {
    for name in ["oscillator", "oscillator_circle"] {
        let cfg = sample_config(name).unwrap();
        let tmp = tempfile::tempdir().unwrap();
        let report = run_scenario(&cfg, tmp.path(), 0).unwrap();
        assert!(report.passed, "{name}: {:?}", report.checks);
        assert_eq!(report.series, vec!["oscillator.csv"]);
    }
}

#[test]
fn ray_csv_header_is_the_documented_schema() {
    let cfg = sample_config("circle").unwrap();
    let tmp = tempfile::tempdir().unwrap();
    run_scenario(&cfg, tmp.path(), 0).unwrap();
    let ray = fs::read_to_string(tmp.path().join("ray.csv")).unwrap();
    assert!(ray.starts_with("s,t,x,y,z,px,py,pz,W,residual\n"));
    let transport = fs::read_to_string(tmp.path().join("transport.csv")).unwrap();
    assert!(transport.starts_with("s,u0_re,u0_im,u1_re,u1_im,sx,sy,sz,amp,g_norm\n"));
    // Same sample grid in both series: summary scalars cross-reference them.
    assert_eq!(ray.lines().count(), transport.lines().count());
}

#[test]
fn malformed_configs_are_named_errors() {
    for text in [
        "{",
        r#"{"schema": "spinray/config-v1"}"#,
        r#"{"schema": "spinray/config-v1", "scenario": {"kind": "warp"}}"#,
    ] {
        let err = parse_config(text).unwrap_err();
        assert!(matches!(err, spinray::Error::Config(_)), "{text} -> {err}");
    }
}
