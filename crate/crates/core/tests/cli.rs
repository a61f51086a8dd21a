use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hilfer::cli::{parse_config, EXIT_OK, EXIT_USAGE};

fn hilfer(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hilfer")).args(args).current_dir(dir).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

const SOLVE: &str = "n = 2\nalpha = 0.8\nbeta = 1\nx_steps = 5\ny_steps = 3\n";

#[test]
fn solve_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "s.cfg", SOLVE);
    let out = hilfer(dir.path(), &["solve", "--config", "s.cfg"]);
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,value,err"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 15);
    assert!(rows.iter().all(|r| r.len() == 4 && r[2].is_finite() && r[3] >= 0.0));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("solution.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["points"], 15);
    assert_eq!(summary["failed_points"], 0);
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.cfg", &format!("{SOLVE}output = a.csv\n"));
    write(dir.path(), "b.cfg", &format!("{SOLVE}output = b.csv\n"));
    for cfg in ["a.cfg", "b.cfg"] {
        assert_eq!(hilfer(dir.path(), &["solve", "--config", cfg]).status.code(), Some(EXIT_OK));
    }
    assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
}

#[test]
fn kernel_grid_for_the_heat_case() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "k.cfg", "n = 1\nalpha = 1\nbeta = 0.5\nx_steps = 7\ny_steps = 3\noutput = k.csv\n");
    assert_eq!(hilfer(dir.path(), &["eval-kernel", "--config", "k.cfg"]).status.code(), Some(EXIT_OK));
    let csv = fs::read_to_string(dir.path().join("k.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let heat = (-f[0] * f[0] / (4.0 * f[1])).exp() / (2.0 * (std::f64::consts::PI * f[1]).sqrt());
        assert!((f[2] - heat).abs() < 1e-10, "{line}");
    }
}

#[test]
fn echo_round_trips() {
    let c = parse_config(&format!("command = solve\n{SOLVE}tol = 1e-9\ndata = bump\n")).unwrap();
    let again = parse_config(&c.echo()).unwrap();
    assert_eq!(again.echo(), c.echo());
    assert_eq!(again.tol, 1e-9);
}

#[test]
fn bad_input_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.cfg", "alpha = 2.0\n");
    let out = hilfer(dir.path(), &["solve", "--config", "bad.cfg"]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    write(dir.path(), "dup.cfg", "n = 2\nn = 3\n");
    assert_eq!(hilfer(dir.path(), &["solve", "--config", "dup.cfg"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(hilfer(dir.path(), &["solve", "--config", "missing.cfg"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(hilfer(dir.path(), &["frobnicate"]).status.code(), Some(EXIT_USAGE));
}

#[test]
fn growth_beyond_the_decay_constant_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "g.cfg", &format!("{SOLVE}growth_N = 50\n"));
    let out = hilfer(dir.path(), &["solve", "--config", "g.cfg"]);
    assert_ne!(out.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&out.stderr).contains("N <"), "{}", String::from_utf8_lossy(&out.stderr));
}
