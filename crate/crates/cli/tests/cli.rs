//! End-to-end checks of the `cavern` binary: exit codes, CSV shape,
//! determinism, and override handling.

use std::path::Path;
use std::process::{Command, Output};

fn cavern(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavern"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).expect("output file exists")
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn series_defaults_write_the_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let output = cavern(&[
        "series",
        "--out",
        out.to_str().unwrap(),
        "--set",
        "grid.t_max=2.0",
        "--set",
        "grid.n_points=21",
    ]);
    assert!(output.status.success(), "{output:?}");
    let csv = read(&out);
    let lines = data_lines(&csv);
    assert_eq!(lines[0], "t,gamma,D,purity,S_xz,B_CP");
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] - 1.0).abs() < 1e-12, "gamma(0) = {}", first[1]);
    assert!((first[2] - 1.0).abs() < 1e-12, "D(0) = {}", first[2]);
    // metadata lines carry provenance
    assert!(csv.lines().any(|l| l.starts_with("# tool: cavern ")));
    assert!(csv.lines().any(|l| l.starts_with("# config-sha256: ")));
}

#[test]
fn validation_failure_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad.csv");
    let output = cavern(&[
        "series",
        "--out",
        out.to_str().unwrap(),
        "--set",
        "model.reservoir.gamma=-1.0",
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(!out.exists(), "no partial file on validation failure");
    let stderr = String::from_utf8_lossy(&output.stderr);
    let record: serde_json::Value =
        serde_json::from_str(stderr.trim()).expect("machine-readable error record");
    assert_eq!(record["error"]["code"], 2);
    assert!(record["error"]["message"]
        .as_str()
        .unwrap()
        .contains("model.reservoir.gamma"));
}

#[test]
fn unknown_field_is_rejected() {
    let output = cavern(&["series", "--set", "model.omga=3.0"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("omga"));
}

#[test]
fn figure_id_out_of_range_exits_2() {
    let output = cavern(&["figure", "9"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("task.figure"));
}

#[test]
fn io_failure_exits_4() {
    let output = cavern(&[
        "series",
        "--out",
        "/nonexistent-dir-for-cavern/out.csv",
        "--set",
        "grid.n_points=3",
        "--set",
        "grid.t_max=1.0",
    ]);
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn computation_failure_exits_3() {
    // excited state at full measurement strength: zero post-selection
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let output = cavern(&[
        "wmr-sweep",
        "--out",
        out.to_str().unwrap(),
        "--set",
        "task.t=0.0",
        "--set",
        "model.reservoir.kind=memoryless",
        "--set",
        "initial.theta=0.0",
        "--set",
        "task.m.max=1.0",
    ]);
    assert_eq!(output.status.code(), Some(3), "{output:?}");
    assert!(!out.exists(), "no partial file on computation failure");
}

#[test]
fn task_type_conflict_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"task": {"type": "series"}}"#).unwrap();
    let output = cavern(&["gamma-curve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("conflicts"));
}

#[test]
fn config_file_and_set_overrides_compose() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"model": {"omega": 2.0}, "grid": {"t_max": 1.0, "n_points": 5}}"#,
    )
    .unwrap();
    let out = dir.path().join("g.csv");
    let output = cavern(&[
        "gamma-curve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--set",
        "grid.n_points=9",
    ]);
    assert!(output.status.success(), "{output:?}");
    let csv = read(&out);
    assert_eq!(data_lines(&csv).len(), 1 + 9, "header plus 9 rows");
}

#[test]
fn json_mirror_matches_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let output = cavern(&[
        "gamma-curve",
        "--json",
        "--out",
        out.to_str().unwrap(),
        "--set",
        "grid.t_max=1.0",
        "--set",
        "grid.n_points=11",
    ]);
    assert!(output.status.success(), "{output:?}");
    let rows: serde_json::Value = serde_json::from_str(&read(&dir.path().join("g.json"))).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 11);
    assert_eq!(rows[0]["t"], serde_json::json!(0.0));
    assert_eq!(rows[0]["gamma"], serde_json::json!(1.0));
}

#[test]
fn worker_count_does_not_change_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args_for = |name: &str, workers: &str| {
        vec![
            "nonmarkov-sweep".to_string(),
            "--out".to_string(),
            dir.path().join(name).display().to_string(),
            "--workers".to_string(),
            workers.to_string(),
            "--set".to_string(),
            "task.sweep.points=8".to_string(),
            "--set".to_string(),
            "grid.t_max=20.0".to_string(),
        ]
    };
    let a1 = args_for("w1.csv", "1");
    let a4 = args_for("w4.csv", "4");
    let o1 = cavern(&a1.iter().map(String::as_str).collect::<Vec<_>>());
    let o4 = cavern(&a4.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(o1.status.success() && o4.status.success());
    let b1 = read(&dir.path().join("w1.csv"));
    let b4 = read(&dir.path().join("w4.csv"));
    assert_eq!(b1, b4, "sweep bytes depend on worker count");
}

#[test]
fn sweep_output_is_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("n.csv");
    let output = cavern(&[
        "nonmarkov-sweep",
        "--out",
        out.to_str().unwrap(),
        "--set",
        "task.sweep.points=6",
        "--set",
        "grid.t_max=20.0",
    ]);
    assert!(output.status.success(), "{output:?}");
    let csv = read(&out);
    let xs: Vec<f64> = data_lines(&csv)[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(xs.windows(2).all(|w| w[0] < w[1]));
}
