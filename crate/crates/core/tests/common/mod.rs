#![allow(dead_code)]

use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

/// Rows of whitespace-separated decimals, `#` lines skipped.
pub fn load(name: &str) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture file");
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|l| l.split_whitespace().map(|t| t.parse::<f64>().expect("decimal")).collect())
        .collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
