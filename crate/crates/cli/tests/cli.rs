//! CLI behavior: exit codes, scenario loading, profile overrides, trace
//! format handling, and the recorded desk-scenario budget.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coexist-sim"))
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn run(args: &[&str], out_dir: &Path) -> Output {
    let mut cmd = bin();
    cmd.args(args).arg("--out").arg(out_dir);
    cmd.output().expect("binary runs")
}

/// All files under `dir` as name → bytes.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut map = BTreeMap::new();
    for entry in fs::read_dir(dir).expect("out dir readable") {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_file() {
            map.insert(
                entry.file_name().to_string_lossy().into_owned(),
                fs::read(entry.path()).unwrap(),
            );
        }
    }
    map
}

#[test]
fn validate_clean_plan_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "plan",
            "validate",
            scenarios_dir().join("paper_plan.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("0 violations"), "{stdout}");
}

#[test]
fn validate_flags_quantum_above_limit_and_exits_one() {
    // Move the quantum channel to 1310 nm (228.849205 THz) while the
    // amplified time/frequency channels stay in the plan.
    let text = fs::read_to_string(scenarios_dir().join("paper_plan.json")).unwrap();
    let modified = text.replace("236.057054", "228.849205");
    assert_ne!(text, modified);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("modified.json");
    fs::write(&path, modified).unwrap();

    let out = run(&["plan", "validate", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("1 violations"), "{stdout}");
    assert!(
        stdout.contains("quantum-above-1290-with-amplified-classical"),
        "{stdout}"
    );
}

#[test]
fn parse_errors_exit_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, "{\n  \"plan\": [,\n}").unwrap();
    let out = run(&["plan", "validate", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 2"), "{stderr}");

    let empty = dir.path().join("empty.json");
    fs::write(&empty, "").unwrap();
    let out = run(&["plan", "validate", empty.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 1"), "{stderr}");
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().arg("nonsense").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_requires_signal_rate() {
    let text = fs::read_to_string(scenarios_dir().join("desk_scenario.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc.as_object_mut().unwrap().remove("signal_rate_per_s");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("no_signal.json");
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = run(&["noise", "budget", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("signal_rate_per_s"));
}

#[test]
fn budget_matches_recorded_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "noise",
            "budget",
            scenarios_dir().join("desk_scenario.json").to_str().unwrap(),
            "--format",
            "both",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let got_json = fs::read(dir.path().join("budget.json")).unwrap();
    let want_json = fs::read(golden_dir.join("budget_desk.json")).unwrap();
    assert_eq!(
        got_json, want_json,
        "budget.json drifted from the recorded run"
    );
    let got_csv = fs::read(dir.path().join("budget.csv")).unwrap();
    let want_csv = fs::read(golden_dir.join("budget_desk.csv")).unwrap();
    assert_eq!(
        got_csv, want_csv,
        "budget.csv drifted from the recorded run"
    );
}

#[test]
fn budget_report_components_resum_exactly() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &[
            "noise",
            "budget",
            scenarios_dir().join("desk_scenario.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("budget.json")).unwrap()).unwrap();
    let b = &report["result"];
    let sum = b["raman_rate_per_s"].as_f64().unwrap()
        + b["ase_rate_per_s"].as_f64().unwrap()
        + b["leakage_rate_per_s"].as_f64().unwrap()
        + b["dark_rate_per_s"].as_f64().unwrap();
    let total = b["total_rate_per_s"].as_f64().unwrap();
    assert_eq!(sum.to_bits(), total.to_bits());
    assert!(report["version"].as_str().unwrap().len() >= 5);
    assert_eq!(
        report["inputs"]["scenario_sha256"].as_str().unwrap().len(),
        64
    );
}

#[test]
fn sweep_emits_points_in_index_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "noise",
            "budget",
            scenarios_dir().join("desk_scenario.json").to_str().unwrap(),
            "--format",
            "csv",
            "--sweep",
            "detector.dark_rate_cps=0:1000:3",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = fs::read_to_string(dir.path().join("budget_sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0,detector.dark_rate_cps,0,"));
    assert!(lines[2].starts_with("1,detector.dark_rate_cps,500,"));
    assert!(lines[3].starts_with("2,detector.dark_rate_cps,1000,"));
}

#[test]
fn detect_reads_csv_and_binary_identically() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = scenarios_dir().join("desk_scenario.json");
    let scenario = scenario.to_str().unwrap();
    run(
        &["sense", "synth", scenario, "--trace-format", "csv"],
        dir.path(),
    );
    run(
        &["sense", "synth", scenario, "--trace-format", "bin"],
        dir.path(),
    );

    let csv_out = tempfile::tempdir().unwrap();
    let bin_out = tempfile::tempdir().unwrap();
    let a = run(
        &[
            "sense",
            "detect",
            "--trace",
            dir.path().join("trace.csv").to_str().unwrap(),
            "--format",
            "csv",
        ],
        csv_out.path(),
    );
    let b = run(
        &[
            "sense",
            "detect",
            "--trace",
            dir.path().join("trace.bin").to_str().unwrap(),
            "--format",
            "csv",
        ],
        bin_out.path(),
    );
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let ea = fs::read_to_string(csv_out.path().join("events.csv")).unwrap();
    let eb = fs::read_to_string(bin_out.path().join("events.csv")).unwrap();
    assert_eq!(ea, eb, "CSV and binary traces must detect identically");
    assert_eq!(ea.lines().count(), 2, "exactly one event expected:\n{ea}");
}

#[test]
fn profile_dir_env_overrides_defaults() {
    let profile_dir = tempfile::tempdir().unwrap();
    // A recognisable non-default table.
    fs::write(
        profile_dir.path().join("raman_gain.csv"),
        "shift_thz,gain_per_w_km\n0,0\n5,0.7\n10,0.9\n20,0\n",
    )
    .unwrap();
    let out_dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["profile", "dump", "--kind", "raman"])
        .arg("--out")
        .arg(out_dir.path())
        .env("COEXIST_SIM_PROFILE_DIR", profile_dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("0.900000"), "{stdout}");
    // Without the variable the shipped table (peak 0.42) is emitted.
    let out = bin()
        .args(["profile", "dump", "--kind", "raman"])
        .arg("--out")
        .arg(out_dir.path())
        .env_remove("COEXIST_SIM_PROFILE_DIR")
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("0.420000"), "{stdout}");
}

#[test]
fn timesync_rounds_override_and_seed_flag() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = scenarios_dir().join("desk_scenario.json");
    let out = run(
        &[
            "timesync",
            "simulate",
            scenario.to_str().unwrap(),
            "--rounds",
            "3",
            "--seed",
            "123",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = fs::read_to_string(dir.path().join("timesync_rounds.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4); // header + 3 rounds
    assert!(csv.starts_with("round,t1,t2,t3,t4,offset_est_ps,true_offset_ps,error_ps\n"));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("timesync.json")).unwrap()).unwrap();
    assert_eq!(report["result"]["seed"], 123);
    assert_eq!(report["result"]["rounds"], 3);
}

#[test]
fn missing_sections_reported_cleanly() {
    // paper_plan.json has no timesync or sensing sections.
    let dir = tempfile::tempdir().unwrap();
    let scenario = scenarios_dir().join("paper_plan.json");
    let out = run(
        &["timesync", "simulate", scenario.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("timesync"));
    let out = run(&["sense", "synth", scenario.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("sensing"));
}

#[test]
fn reports_carry_no_absolute_paths() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &[
            "noise",
            "budget",
            scenarios_dir().join("desk_scenario.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    let report = fs::read_to_string(dir.path().join("budget.json")).unwrap();
    assert!(!report.contains(dir.path().to_str().unwrap()));
    let parsed: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(parsed["inputs"]["scenario_file"], "desk_scenario.json");
}

#[test]
fn snapshot_helper_sees_written_files() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &[
            "plan",
            "capacity",
            "--lambda-min-nm",
            "1570",
            "--lambda-max-nm",
            "1572",
            "--spacing-ghz",
            "50",
            "--width-ghz",
            "50",
            "--format",
            "both",
        ],
        dir.path(),
    );
    let files = snapshot(dir.path());
    assert!(files.contains_key("capacity.json"));
    assert!(files.contains_key("capacity.csv"));
    let report: serde_json::Value = serde_json::from_slice(&files["capacity.json"]).unwrap();
    assert_eq!(report["result"]["capacity"], 4);
}
