//! Black-box tests of the `impulsive` binary: flags, config files, exit
//! codes, output stamps, and run-to-run determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_impulsive"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("impulsive-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn example_list_names_all_builtins() {
    let out = bin().args(["example", "list"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["annulus", "rotation", "doubling"] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn simulate_writes_the_impulse_row() {
    let dir = tmpdir("simulate");
    let out = run_in(
        &dir,
        &[
            "simulate",
            "--example",
            "annulus",
            "--start",
            "0,1.5",
            "--T",
            "6",
            "--out",
            "orbit.csv",
            "--sequences",
            "events.csv",
        ],
    );
    assert!(out.status.success(), "{out:?}");
    let body = std::fs::read_to_string(dir.join("orbit.csv")).unwrap();
    assert!(body.starts_with("# impulsive "));
    assert!(body.contains("# config_hash="));
    // One impulse at 3*pi/2 = 4.712..., flagged and landing at (-1.25, 0).
    let impulse_rows: Vec<&str> = body.lines().filter(|l| l.ends_with(",1")).collect();
    assert_eq!(impulse_rows.len(), 1, "{body}");
    assert!(
        impulse_rows[0].starts_with("4.71238898038"),
        "{}",
        impulse_rows[0]
    );
    assert!(impulse_rows[0].contains("-1.25"), "{}", impulse_rows[0]);

    // Event-time rows: impulse, landing visits, and their merge.
    let events = std::fs::read_to_string(dir.join("events.csv")).unwrap();
    for kind in ["impulse,", "visit,", "merged,"] {
        assert!(events.contains(kind), "missing {kind} row:\n{events}");
    }
    // The visit row records the continuous pass at pi/2 = 1.5707...
    let visit = events.lines().find(|l| l.starts_with("visit,")).unwrap();
    assert!(visit.contains("1.57079632679"), "{visit}");
}

#[test]
fn entropy_outputs_are_deterministic() {
    let dir = tmpdir("determinism");
    let args = |csv: &str, json: &str| {
        vec![
            "entropy".to_string(),
            "--example".into(),
            "annulus".into(),
            "--mode".into(),
            "tau".into(),
            "--T".into(),
            "5,10,15,20".into(),
            "--eps".into(),
            "0.05".into(),
            "--delta".into(),
            "0.2".into(),
            "--seed".into(),
            "7".into(),
            "--samples".into(),
            "200".into(),
            "--out-csv".into(),
            csv.into(),
            "--out-json".into(),
            json.into(),
        ]
    };
    for (csv, json) in [("a.csv", "a.json"), ("b.csv", "b.json")] {
        let out = bin()
            .args(args(csv, json))
            .current_dir(&dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "{out:?}");
    }
    let a = std::fs::read(dir.join("a.csv")).unwrap();
    let b = std::fs::read(dir.join("b.csv")).unwrap();
    assert_eq!(a, b, "CSV outputs differ between identical runs");
    let aj = std::fs::read(dir.join("a.json")).unwrap();
    let bj = std::fs::read(dir.join("b.json")).unwrap();
    assert_eq!(aj, bj, "JSON outputs differ between identical runs");

    // The zero-entropy reference comes out flat and stamped.
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("a.json")).unwrap()).unwrap();
    assert!(summary["reported_slope"].as_f64().unwrap().abs() <= 0.05);
    assert_eq!(summary["stable"], true);
    assert_eq!(summary["version"], env!("CARGO_PKG_VERSION"));
    assert!(summary["config_hash"].as_str().unwrap().len() == 16);
}

#[test]
fn merged_tau_source_runs() {
    let dir = tmpdir("merged");
    let out = run_in(
        &dir,
        &[
            "entropy",
            "--example",
            "annulus",
            "--mode",
            "tau",
            "--tau-source",
            "merged",
            "--T",
            "5,8,11,14",
            "--eps",
            "0.1",
            "--delta",
            "0.2",
            "--samples",
            "120",
        ],
    );
    assert!(out.status.success(), "{out:?}");
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("entropy.json")).unwrap()).unwrap();
    assert!(summary["reported_slope"].as_f64().unwrap().abs() <= 0.05);
}

#[test]
fn check_reports_pass_for_the_reference_system() {
    let dir = tmpdir("check");
    let out = run_in(&dir, &["check", "--example", "annulus", "--samples", "64"]);
    assert!(out.status.success(), "{out:?}");
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("check.json")).unwrap()).unwrap();
    assert_eq!(summary["all_pass"], true);
    let gap = summary["report"]["separation_gap"]["measured"]
        .as_f64()
        .unwrap();
    assert!((gap - 2.0).abs() <= 1e-6);
}

#[test]
fn config_file_drives_a_run() {
    let dir = tmpdir("config");
    std::fs::write(
        dir.join("exp.json"),
        r#"{
  "system": {"family": "annulus", "offset": 0.5, "slope": 0.5, "angle": 3.141592653589793, "xi": 0.2},
  "command": "check",
  "params": {"samples": 48, "seed": 3, "out": "family.json"}
}"#,
    )
    .unwrap();
    let out = run_in(&dir, &["run", "--config", "exp.json"]);
    assert!(out.status.success(), "{out:?}");
    assert!(dir.join("family.json").exists());
}

#[test]
fn bad_inputs_exit_with_config_code() {
    let dir = tmpdir("badcfg");
    // Unknown example.
    let out = run_in(&dir, &["check", "--example", "torus"]);
    assert_eq!(out.status.code(), Some(2));
    // Too few horizon entries.
    let out = run_in(
        &dir,
        &[
            "entropy",
            "--example",
            "annulus",
            "--mode",
            "tau",
            "--T",
            "5,10",
            "--eps",
            "0.05",
            "--delta",
            "0.2",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    // Malformed config file.
    std::fs::write(dir.join("broken.json"), "{\"system\":").unwrap();
    let out = run_in(&dir, &["run", "--config", "broken.json"]);
    assert_eq!(out.status.code(), Some(2));
    // Start point outside the phase space.
    let out = run_in(
        &dir,
        &[
            "simulate",
            "--example",
            "annulus",
            "--start",
            "0,0.2",
            "--T",
            "6",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_dir_env_redirects_relative_paths() {
    let dir = tmpdir("outdir");
    let nested = dir.join("results");
    let out = bin()
        .args([
            "simulate",
            "--example",
            "rotation",
            "--start",
            "1,0",
            "--T",
            "2",
            "--out",
            "orbit.csv",
        ])
        .env("IMPULSIVE_OUT_DIR", &nested)
        .current_dir(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    assert!(nested.join("orbit.csv").exists());
}
