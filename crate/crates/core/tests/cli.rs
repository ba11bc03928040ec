//! End-to-end tests of the command-line front end.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rindler-gauss"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "mass = 0.1\nfrobnicate = 3\n").unwrap();
    let (code, _, err) = run(&["vacuum-sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("frobnicate"), "{err}");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# two points\nmass = 0.2\ngrid = 2\ndiagonal = true\n").unwrap();
    let (code, csv, _) = run(&["vacuum-sweep", "--config", cfg.to_str().unwrap(), "--mass", "0.1"]);
    assert_eq!(code, 0);
    assert!(csv.contains("# mass = 1e-1"));
    assert!(csv.contains("# grid = 2"));
    let rows = csv.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 3, "header plus two points");
}

#[test]
fn output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let path = dir.path().join(format!("t{threads}.csv"));
        let (code, _, _) = run(&[
            "vacuum-sweep", "--grid", "2", "--accel-min", "0.1", "--accel-max", "0.2",
            "--threads", threads, "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn plot_script_is_written_next_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bell.csv");
    let (code, _, _) = run(&[
        "bell-sweep", "--grid", "2", "--accel-min", "0.1", "--accel-max", "0.2",
        "--out", path.to_str().unwrap(), "--emit-plot-script",
    ]);
    assert_eq!(code, 0);
    let script = std::fs::read_to_string(dir.path().join("bell.csv.plot.py")).unwrap();
    assert!(script.contains("bell.csv"));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.contains("# monotone_decreasing = true"));
}

#[test]
fn unit_overlap_bell_is_normalized() {
    let (code, csv, _) = run(&["bell-sweep", "--accel-i", "0.2", "--accel-ii", "0.2", "--unit-overlap"]);
    assert_eq!(code, 0);
    let row = csv.lines().filter(|l| !l.starts_with('#')).nth(1).unwrap();
    let normalized: f64 = row.split(',').nth(8).unwrap().parse().unwrap();
    assert!((normalized - 1.0).abs() < 1e-15, "{row}");
}

#[test]
fn modes_command_writes_profiles() {
    let (code, csv, _) = run(&["modes", "--samples", "5"]);
    assert_eq!(code, 0);
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 6);
}

#[test]
fn invalid_range_is_a_usage_error() {
    let (code, _, err) = run(&["vacuum-sweep", "--accel-min", "0.4", "--accel-max", "0.2"]);
    assert_eq!(code, 2);
    assert!(err.contains("accel_min"), "{err}");
}

#[test]
fn verify_group_reports_pass() {
    let (code, out, _) = run(&["verify", "--group", "assembly", "--group", "oracle"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("[PASS] assembly"));
    assert!(out.contains("all groups passed"));
}
