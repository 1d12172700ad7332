use std::fs;
use std::path::Path;
use std::process::Command;

use v2i_radar_cli::{run, Config, Experiment, RunSpec, DEFAULT_CONFIG, SCHEMA_VERSION};

fn spec(experiment: Experiment, out: &Path) -> RunSpec {
    RunSpec {
        experiment,
        config_path: None,
        output_dir: out.to_path_buf(),
        seed: None,
        trials: Some(2000),
    }
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn radar_chain_matches_golden_detections() {
    let dir = tempfile::tempdir().unwrap();
    run(&spec(Experiment::RadarChain, dir.path())).unwrap();
    let produced = fs::read_to_string(dir.path().join("detections.csv")).unwrap();
    let golden = include_str!("golden/radar_chain_detections.csv");
    assert_eq!(produced, golden);
}

#[test]
fn golay_check_reports_zero_offpeak() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run(&spec(Experiment::GolayCheck, dir.path())).unwrap();
    assert_eq!(summary.number("golay_max_offpeak"), Some(0.0));
}

#[test]
fn reproduce_paper_headlines() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run(&spec(Experiment::ReproducePaper, dir.path())).unwrap();
    assert_eq!(summary.schema_version, SCHEMA_VERSION);
    let reduction = summary.number("reduction_pct").unwrap();
    assert!((78.0..=88.0).contains(&reduction), "{reduction}");
    for key in [
        "range_resolution_m",
        "doppler_resolution_mps",
        "sector_length_m",
        "rho",
        "bhi_legacy_ms",
        "bhi_radar_ms",
        "overhead_legacy_pct",
        "overhead_radar_pct",
    ] {
        assert!(summary.number(key).is_some(), "missing {key}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["experiment"], "reproduce-paper");
}

#[test]
fn every_file_starts_with_a_header() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run(&spec(Experiment::ReproducePaper, dir.path())).unwrap();
    for name in summary.files.iter().filter(|f| f.ends_with(".csv")) {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        let header = text.lines().next().unwrap();
        assert!(
            header.split(',').all(|c| c
                .chars()
                .all(|ch| ch.is_ascii_lowercase() || ch == '_' || ch.is_ascii_digit())),
            "{name}: {header}"
        );
        assert!(header.parse::<f64>().is_err());
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(&spec(Experiment::ReproducePaper, a.path())).unwrap();
    run(&spec(Experiment::ReproducePaper, b.path())).unwrap();
    assert_eq!(read_dir_sorted(a.path()), read_dir_sorted(b.path()));
}

#[test]
fn missing_key_is_named() {
    let text = DEFAULT_CONFIG.replace("beacon_frame_s = 266.71875e-6\n", "");
    let err = Config::from_toml(&text).unwrap_err();
    let msg = format!("{err:#}");
    assert!(msg.contains("beacon_frame_s"), "{msg}");

    let text = DEFAULT_CONFIG.replace("pulses = 32", "pulses = 32\nbogus = 1");
    let msg = format!("{:#}", Config::from_toml(&text).unwrap_err());
    assert!(msg.contains("bogus"), "{msg}");
}

#[test]
fn infeasible_plan_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.toml");
    fs::write(&cfg_path, DEFAULT_CONFIG.replace("k2 = 5.0", "k2 = 0.5")).unwrap();
    let mut s = spec(Experiment::PlannerSweep, &dir.path().join("out"));
    s.config_path = Some(cfg_path);
    let msg = format!("{:#}", run(&s).unwrap_err());
    assert!(msg.contains("infeasible") && msg.contains("k2"), "{msg}");
}

#[test]
fn binary_flags_and_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_v2i-radar");
    let dir = tempfile::tempdir().unwrap();
    let ok = Command::new(exe)
        .args([
            "--experiment",
            "overhead",
            "--seed",
            "3",
            "--trials",
            "10",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert!(dir.path().join("overhead.csv").exists());

    let bad = Command::new(exe)
        .args(["--experiment", "nope"])
        .output()
        .unwrap();
    assert!(!bad.status.success());

    let missing = Command::new(exe)
        .args([
            "--experiment",
            "overhead",
            "--config",
            "/nonexistent/cfg.toml",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("cfg.toml"));
}

#[test]
fn output_dir_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let status = Command::new(env!("CARGO_BIN_EXE_v2i-radar"))
        .args(["--experiment", "golay-check"])
        .env("V2I_RADAR_OUT", &target)
        .current_dir(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(target.join("golay_check.csv").exists());
}
