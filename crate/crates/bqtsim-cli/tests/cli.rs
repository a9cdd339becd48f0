//! End-to-end tests of the `bqtsim` binary: flag handling, config merging,
//! output formats, exit codes.

use std::collections::HashSet;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bqtsim"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.to_string()).collect())
        .collect()
}

#[test]
fn bqt_run_defaults_cover_all_outcome_pairs() {
    let out = run(&["bqt", "run"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    let rows = csv_rows(&text);
    // 1000 default trials plus a summary row.
    assert_eq!(rows.len(), 1001);

    let pairs: HashSet<(String, String)> = rows
        .iter()
        .filter(|r| r[0] != "min")
        .map(|r| (r[1].clone(), r[2].clone()))
        .collect();
    assert_eq!(pairs.len(), 16, "expected all 16 outcome pairs over 1000 trials");

    let summary = rows.last().unwrap();
    assert_eq!(summary[0], "min");
    for fid in &summary[5..7] {
        assert!((fid.parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn bqt_run_single_trial_is_deterministic_under_seed() {
    let a = stdout_of(&run(&["bqt", "run", "--trials", "1", "--seed", "5"]));
    let b = stdout_of(&run(&["bqt", "run", "--trials", "1", "--seed", "5"]));
    assert_eq!(a, b);
}

#[test]
fn invalid_amplitudes_exit_2_with_diagnostic() {
    let out = run(&["bqt", "run", "--alpha", "1,0:1,0", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("normalized"));

    let out = run(&["bqt", "run", "--alpha", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn normalize_flag_rescales_small_deviations_only() {
    let near = "0.7071068,0:0.7071068,0";
    let out = run(&["bqt", "run", "--alpha", near, "--trials", "1"]);
    assert_eq!(out.status.code(), Some(2), "raw near-unit input must be rejected");

    let out = run(&["bqt", "run", "--alpha", near, "--normalize", "--trials", "1"]);
    assert!(out.status.success());

    let out = run(&["bqt", "run", "--alpha", "1,0:1,0", "--normalize", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(2), "--normalize only absorbs <= 1e-3");
}

#[test]
fn bqt_branches_lists_sixteen_unit_fidelity_rows() {
    let out = run(&["bqt", "branches", "--n-alice", "2", "--n-bob", "1", "--beta", "0.6,0:0,0.8"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout_of(&out));
    assert_eq!(rows.len(), 16);
    for row in &rows {
        assert!((row[2].parse::<f64>().unwrap() - 1.0 / 16.0).abs() < 1e-12);
        assert!(row[3].parse::<f64>().unwrap() > 1.0 - 1e-12);
        assert!(row[4].parse::<f64>().unwrap() > 1.0 - 1e-12);
        assert!(row[5].parse::<f64>().unwrap() > 1.0 - 1e-12);
    }
}

#[test]
fn noise_sweep_flip_family_delta_vanishes() {
    let out = run(&["noise", "sweep", "--kind", "bitflip", "--grid", "0:1:11"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout_of(&out));
    assert_eq!(rows.len(), 11);
    for row in &rows {
        assert!(row[3].parse::<f64>().unwrap().abs() < 1e-12);
    }
}

#[test]
fn noise_sweep_rejects_unknown_kind() {
    let out = run(&["noise", "sweep", "--kind", "gamma"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown noise kind"));
}

#[test]
fn noise_compare_covers_every_kind() {
    let out = run(&["noise", "compare", "--grid", "0:1:3"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout_of(&out));
    assert_eq!(rows.len(), 18);
    let kinds: HashSet<String> = rows.iter().map(|r| r[0].clone()).collect();
    assert_eq!(kinds.len(), 6);
}

#[test]
fn qec_mc_exits_by_z_score() {
    let out = run(&["qec", "mc", "--p", "0.05", "--trials", "5000", "--seed", "3"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout_of(&out));
    assert_eq!(rows.len(), 1);
    assert!(rows[0][4].parse::<f64>().unwrap() <= 4.0);
}

#[test]
fn qec_threshold_reports_root() {
    let out = run(&["qec", "threshold"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout_of(&out));
    let root: f64 = rows[0][0].parse().unwrap();
    assert!((0.016..=0.018).contains(&root));
}

#[test]
fn json_format_mirrors_csv_fields() {
    let out = run(&["qec", "threshold", "--format", "json"]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(parsed["command"], "qec threshold");
    assert_eq!(
        parsed["columns"],
        serde_json::json!(["root", "p_e_at_root", "bitflip_fidelity_at_root"])
    );
    let root = parsed["rows"][0][0].as_f64().unwrap();
    assert!((0.016..=0.018).contains(&root));
    assert!(parsed["version"].is_string());
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.json");
    std::fs::write(
        &config_path,
        r#"{"seed": 9, "trials": 2, "n_alice": 2, "n_bob": 2, "format": "json"}"#,
    )
    .unwrap();
    let cfg = config_path.to_str().unwrap();

    let out = run(&["bqt", "run", "--config", cfg]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(parsed["config"]["seed"], 9);
    assert_eq!(parsed["config"]["trials"], 2);
    assert_eq!(parsed["config"]["n_alice"], 2);

    // Flag wins over the file.
    let out = run(&["bqt", "run", "--config", cfg, "--trials", "3"]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(parsed["config"]["trials"], 3);

    let out = run(&["bqt", "run", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_file_writes_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let write = |path: &Path| {
        let out = bin()
            .args(["bqt", "run", "--trials", "10", "--seed", "123", "--out"])
            .arg(path)
            .output()
            .unwrap();
        assert!(out.status.success());
        std::fs::read(path).unwrap()
    };
    let first = write(&dir.path().join("a.csv"));
    let second = write(&dir.path().join("b.csv"));
    assert!(!first.is_empty());
    assert_eq!(first, second);
}
