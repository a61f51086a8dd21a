//! Command-line front end: `key = value` configuration, grid runs, the
//! verification suite and CSV/JSON output.

pub mod checks;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::json;

use crate::cauchy::{kernel_exponent, solve, Grid, InitialData, Preset};
use crate::error::{Error, Result};
use crate::fracops::{EquationSpec, GeneralEquationSpec};
use crate::kernel::KernelSpec;
use crate::selfsim::{coefficients, eval_gen_wright_case, eval_selfsimilar, similarity_exponents, wright_seed};
use crate::specfun::decay_sigma;
use checks::CheckResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Command {
    EvalKernel,
    Solve,
    Selfsim,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::EvalKernel => "eval-kernel",
            Command::Solve => "solve",
            Command::Selfsim => "selfsim",
            Command::Verify => "verify",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [Command::EvalKernel, Command::Solve, Command::Selfsim, Command::Verify]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DataSource {
    Preset(Preset),
    /// Whitespace table: x, φ_0[, φ_1].
    Table(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
    /// Kernel exponent for eval-kernel, series exponent for selfsim.
    pub b: Option<f64>,
    pub m: f64,
    pub k: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    pub d: f64,
    pub j: u32,
    pub terms: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub x_steps: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub y_steps: usize,
    pub tol: f64,
    pub data: DataSource,
    pub growth_m: f64,
    pub growth_n: f64,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Verify,
            n: 2,
            alpha: 0.8,
            beta: 0.5,
            b: None,
            m: 0.5,
            k: 0.25,
            alpha1: 0.5,
            beta1: 0.5,
            alpha2: 2.5,
            beta2: 0.5,
            d: 1.0,
            j: 1,
            terms: 30,
            x_min: -3.0,
            x_max: 3.0,
            x_steps: 61,
            y_min: 0.1,
            y_max: 1.0,
            y_steps: 10,
            tol: 1e-10,
            data: DataSource::Preset(Preset::Gaussian),
            growth_m: 1.0,
            growth_n: 0.0,
            output: None,
        }
    }
}

const KEYS: [&str; 25] = [
    "command", "n", "alpha", "beta", "b", "m", "k", "alpha1", "beta1", "alpha2", "beta2", "d", "j", "terms", "x_min",
    "x_max", "x_steps", "y_min", "y_max", "y_steps", "tol", "data", "growth_M", "growth_N", "output",
];

fn cfg_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

/// Parses and validates a `key = value` configuration. Line 0 in an error
/// refers to a default value.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_with(text, None)
}

/// As [`parse_config`], with the command taken from the caller (the
/// subcommand) instead of the `command` key.
pub fn parse_config_as(text: &str, command: Command) -> Result<RunConfig> {
    parse_with(text, Some(command))
}

fn parse_with(text: &str, command: Option<Command>) -> Result<RunConfig> {
    let mut seen: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| cfg_err(line, format!("expected `key = value`, got {body:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let known = KEYS.iter().find(|k| **k == key).ok_or_else(|| cfg_err(line, format!("unknown key {key:?}")))?;
        if value.is_empty() {
            return Err(cfg_err(line, format!("missing value for {key}")));
        }
        if seen.insert(known, (line, value.to_string())).is_some() {
            return Err(cfg_err(line, format!("duplicate key {key}")));
        }
    }
    let mut c = RunConfig::default();
    let line_of = |k: &str| seen.get(k).map_or(0, |v| v.0);
    fn num<T: FromStr>(seen: &BTreeMap<&str, (usize, String)>, key: &str, into: &mut T) -> Result<()> {
        if let Some((line, v)) = seen.get(key) {
            *into = v.parse().map_err(|_| cfg_err(*line, format!("{key}: cannot parse {v:?}")))?;
        }
        Ok(())
    }
    if let Some((line, v)) = seen.get("command") {
        c.command = v.parse().map_err(|e: String| cfg_err(*line, e))?;
    }
    num(&seen, "n", &mut c.n)?;
    num(&seen, "alpha", &mut c.alpha)?;
    num(&seen, "beta", &mut c.beta)?;
    if seen.contains_key("b") {
        let mut b = 0.0;
        num(&seen, "b", &mut b)?;
        c.b = Some(b);
    }
    num(&seen, "m", &mut c.m)?;
    num(&seen, "k", &mut c.k)?;
    num(&seen, "alpha1", &mut c.alpha1)?;
    num(&seen, "beta1", &mut c.beta1)?;
    num(&seen, "alpha2", &mut c.alpha2)?;
    num(&seen, "beta2", &mut c.beta2)?;
    num(&seen, "d", &mut c.d)?;
    num(&seen, "j", &mut c.j)?;
    num(&seen, "terms", &mut c.terms)?;
    num(&seen, "x_min", &mut c.x_min)?;
    num(&seen, "x_max", &mut c.x_max)?;
    num(&seen, "x_steps", &mut c.x_steps)?;
    num(&seen, "y_min", &mut c.y_min)?;
    num(&seen, "y_max", &mut c.y_max)?;
    num(&seen, "y_steps", &mut c.y_steps)?;
    num(&seen, "tol", &mut c.tol)?;
    num(&seen, "growth_M", &mut c.growth_m)?;
    num(&seen, "growth_N", &mut c.growth_n)?;
    if let Some((line, v)) = seen.get("data") {
        c.data = match v.parse::<Preset>() {
            Ok(p) => DataSource::Preset(p),
            Err(_) if Path::new(v).is_file() => DataSource::Table(PathBuf::from(v)),
            Err(_) => return Err(cfg_err(*line, format!("data {v:?} is neither a preset (gaussian, bump, poly-decay) nor a readable file"))),
        };
    }
    if let Some((_, v)) = seen.get("output") {
        c.output = Some(PathBuf::from(v));
    }
    if let Some(cmd) = command {
        c.command = cmd;
    }
    validate(&c, &line_of)?;
    Ok(c)
}

fn validate(c: &RunConfig, line_of: &dyn Fn(&str) -> usize) -> Result<()> {
    let at = |key: &str, e: Error| match e {
        Error::InvalidParameter(m) => cfg_err(line_of(key), m),
        e => e,
    };
    if !(c.tol > 0.0) {
        return Err(cfg_err(line_of("tol"), "tol must be positive"));
    }
    if c.x_steps == 0 || c.y_steps == 0 {
        return Err(cfg_err(line_of(if c.x_steps == 0 { "x_steps" } else { "y_steps" }), "grid steps must be at least 1"));
    }
    if !(c.y_min > 0.0) {
        return Err(cfg_err(line_of("y_min"), format!("y_min must be positive, got {}", c.y_min)));
    }
    if c.y_max < c.y_min || c.x_max < c.x_min {
        return Err(cfg_err(line_of("y_max").max(line_of("x_max")), "grid maxima must not lie below the minima"));
    }
    if c.command == Command::Selfsim {
        let g = GeneralEquationSpec::new(c.m, c.k, c.alpha1, c.beta1, c.alpha2, c.beta2, c.d);
        let g = g.map_err(|e| at("alpha2", e))?;
        if c.j == 0 || c.j > g.p {
            return Err(cfg_err(line_of("j"), format!("j must lie in 1..={}", g.p)));
        }
        if c.terms == 0 {
            return Err(cfg_err(line_of("terms"), "terms must be at least 1"));
        }
        if !(c.x_min > 0.0) {
            return Err(cfg_err(line_of("x_min"), "self-similar series needs x_min > 0"));
        }
        return Ok(());
    }
    if !(c.alpha > 0.0 && c.alpha < 2.0) {
        return Err(cfg_err(line_of("alpha"), format!("alpha must lie in (0,2), got {}", c.alpha)));
    }
    let eq = EquationSpec::new(c.n, c.alpha, c.beta).map_err(|e| at(if c.n == 0 { "n" } else { "beta" }, e))?;
    let sigma = decay_sigma(eq.n, eq.alpha);
    if !(c.growth_n >= 0.0 && c.growth_n < sigma) {
        return Err(cfg_err(line_of("growth_N"), format!("requires N < σ (N = {}, σ = {sigma})", c.growth_n)));
    }
    if !(c.growth_m > 0.0) {
        return Err(cfg_err(line_of("growth_M"), "growth_M must be positive"));
    }
    Ok(())
}

impl RunConfig {
    /// Configuration text that parses back to this value.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("command", self.command.name().into());
        put("n", self.n.to_string());
        put("alpha", self.alpha.to_string());
        put("beta", self.beta.to_string());
        if let Some(b) = self.b {
            put("b", b.to_string());
        }
        put("m", self.m.to_string());
        put("k", self.k.to_string());
        put("alpha1", self.alpha1.to_string());
        put("beta1", self.beta1.to_string());
        put("alpha2", self.alpha2.to_string());
        put("beta2", self.beta2.to_string());
        put("d", self.d.to_string());
        put("j", self.j.to_string());
        put("terms", self.terms.to_string());
        put("x_min", self.x_min.to_string());
        put("x_max", self.x_max.to_string());
        put("x_steps", self.x_steps.to_string());
        put("y_min", self.y_min.to_string());
        put("y_max", self.y_max.to_string());
        put("y_steps", self.y_steps.to_string());
        put("tol", self.tol.to_string());
        put(
            "data",
            match &self.data {
                DataSource::Preset(p) => p.name().into(),
                DataSource::Table(p) => p.display().to_string(),
            },
        );
        put("growth_M", self.growth_m.to_string());
        put("growth_N", self.growth_n.to_string());
        if let Some(o) = &self.output {
            put("output", o.display().to_string());
        }
        s
    }

    pub fn equation(&self) -> Result<EquationSpec> {
        EquationSpec::new(self.n, self.alpha, self.beta)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::uniform(self.x_min, self.x_max, self.x_steps, self.y_min, self.y_max, self.y_steps)
    }

    fn output_or(&self, default: &str) -> PathBuf {
        self.output.clone().unwrap_or_else(|| PathBuf::from(default))
    }

    fn initial_data(&self, eq: &EquationSpec) -> Result<InitialData> {
        let mut d = match &self.data {
            DataSource::Preset(p) => InitialData::preset(eq, *p)?,
            DataSource::Table(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let mut xs = Vec::new();
                let mut cols = vec![Vec::new(); eq.s_count as usize];
                for (i, l) in text.lines().enumerate() {
                    let l = l.split('#').next().unwrap_or("").trim();
                    if l.is_empty() {
                        continue;
                    }
                    let v: Vec<f64> = l
                        .split_whitespace()
                        .map(|t| t.parse().map_err(|_| cfg_err(i + 1, format!("{}: bad number {t:?}", path.display()))))
                        .collect::<Result<_>>()?;
                    if v.len() != 1 + cols.len() {
                        return Err(cfg_err(i + 1, format!("{}: expected {} columns", path.display(), 1 + cols.len())));
                    }
                    xs.push(v[0]);
                    for (c, x) in cols.iter_mut().zip(&v[1..]) {
                        c.push(*x);
                    }
                }
                InitialData::tabulated(eq, xs, cols)?
            }
        };
        // a declared certificate may only loosen the bound
        d.growth_m = d.growth_m.max(self.growth_m);
        d.growth_n = self.growth_n;
        InitialData::new(eq, d.funcs, d.growth_m, d.growth_n)
    }
}

/// Outcome of a run: exit status and written files.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub artifacts: Vec<PathBuf>,
    pub message: String,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Exit status for an error escaping `run`.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::InvalidParameter(_) | Error::Io(_) => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string().to_lowercase()
    }
}

/// CSV with header `x,y,value,err`, 17 significant digits, LF endings.
pub fn write_csv(path: &Path, rows: &[(f64, f64, f64, f64)]) -> Result<()> {
    let mut s = String::from("x,y,value,err\n");
    for &(x, y, v, e) in rows {
        let _ = writeln!(s, "{},{},{},{}", fmt17(x), fmt17(y), fmt17(v), fmt17(e));
    }
    fs::write(path, s).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, v: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

pub fn run(c: &RunConfig) -> Result<Outcome> {
    match c.command {
        Command::EvalKernel => run_kernel(c),
        Command::Solve => run_solve(c),
        Command::Selfsim => run_selfsim(c),
        Command::Verify => run_verify(c),
    }
}

fn run_kernel(c: &RunConfig) -> Result<Outcome> {
    let eq = c.equation()?;
    let ks = KernelSpec::new(eq, c.b.unwrap_or_else(|| kernel_exponent(&eq, 0)))?;
    let mut rows = Vec::new();
    for (x, y) in c.grid()?.points() {
        let v = ks.eval_dx(0, x, y, c.tol)?;
        rows.push((x, y, v.value, v.err_bound));
    }
    let out = c.output_or("kernel.csv");
    write_csv(&out, &rows)?;
    Ok(Outcome { exit_code: EXIT_OK, message: format!("wrote {} rows", rows.len()), artifacts: vec![out] })
}

fn run_solve(c: &RunConfig) -> Result<Outcome> {
    let eq = c.equation()?;
    let data = c.initial_data(&eq)?;
    let grid = c.grid()?;
    let field = solve(&eq, &data, &grid, c.tol)?;
    let rows: Vec<_> = grid
        .points()
        .into_iter()
        .zip(field.values.iter().zip(&field.err))
        .map(|((x, y), (v, e))| (x, y, *v, *e))
        .collect();
    let out = c.output_or("solution.csv");
    write_csv(&out, &rows)?;
    let failures: Vec<&String> = field.failures.iter().flatten().collect();
    let summary = json!({
        "config": c.echo(),
        "points": rows.len(),
        "max_err": field.max_err(),
        "failed_points": failures.len(),
        "failures": failures,
    });
    let sp = summary_path(&out);
    write_json(&sp, &summary)?;
    let code = if failures.is_empty() { EXIT_OK } else { EXIT_NUMERIC };
    Ok(Outcome { exit_code: code, message: format!("{} points, {} failed", rows.len(), failures.len()), artifacts: vec![out, sp] })
}

fn run_selfsim(c: &RunConfig) -> Result<Outcome> {
    let g = GeneralEquationSpec::new(c.m, c.k, c.alpha1, c.beta1, c.alpha2, c.beta2, c.d)?;
    let b = c.b.unwrap_or(0.0);
    let e = similarity_exponents(&g, b);
    let closed = g.m == 0.0 && g.k == 0.0;
    let table = coefficients(&g, &e, c.j, c.terms, if closed { wright_seed(&g, c.j, b) } else { 1.0 })?;
    let mut rows = Vec::new();
    let mut outside = 0;
    for (x, y) in c.grid()?.points() {
        let v = if closed { eval_gen_wright_case(&g, c.j, b, x, y, c.tol) } else { eval_selfsimilar(&g, &e, &table, x, y) };
        match v {
            Ok(v) if v.converged() => rows.push((x, y, v.value.re, v.err_bound)),
            Ok(_) | Err(Error::OutsideRadius { .. }) => {
                outside += 1;
                rows.push((x, y, f64::NAN, f64::INFINITY));
            }
            Err(e) => return Err(e),
        }
    }
    let out = c.output_or("selfsim.csv");
    write_csv(&out, &rows)?;
    let code = if outside == 0 { EXIT_OK } else { EXIT_NUMERIC };
    Ok(Outcome { exit_code: code, message: format!("{} rows, {outside} not evaluated", rows.len()), artifacts: vec![out] })
}

/// The full check list for the configured equation.
pub fn verify_checks(c: &RunConfig) -> Result<Vec<CheckResult>> {
    let eq = c.equation()?;
    let mut out = vec![checks::wright_gaussian()];
    out.extend(checks::fixtures());
    out.push(checks::calibration(&eq));
    out.extend(checks::kernel_identity_sweep(&eq, &[0.5, 1.0]));
    let orders: Vec<u32> = (0..2 * eq.n).collect();
    out.extend(checks::jump_relation(&eq, kernel_exponent(&eq, 0), 0.7, &orders));
    // the slowest trace power sets how deep the y sequence must go
    let slowest = (0..eq.s_count)
        .map(|k| crate::cauchy::trace_exponents(&eq, k, 1)[0])
        .fold(f64::INFINITY, f64::min);
    let y_last = 10f64.powf(-5.0 / slowest).clamp(1e-12, 1e-6);
    out.extend(checks::initial_trace(&eq, &[1e4 * y_last, 1e2 * y_last, y_last], 1e-3));
    let b0 = kernel_exponent(&eq, 0);
    out.push(checks::kernel_residual(&eq, b0, 0.6, 0.8));
    out.push(checks::kernel_residual(&eq, b0, 1.5, 1.2));
    out.push(checks::solve_residual(&eq, 0.3, 0.7));
    out.push(checks::solve_residual(&eq, 1.0, 1.0));
    out.extend(checks::heat_reduction(0.5));
    out.push(checks::caputo_fourier(0.8, 0.7));
    let g = GeneralEquationSpec::new(0.5, 0.25, 0.5, 0.5, 2.5, 0.5, 1.0)?;
    out.push(checks::selfsim_residual(&g, 1, 0.0, 0.7, 1.3, &[2, 4, 8]));
    Ok(out)
}

fn run_verify(c: &RunConfig) -> Result<Outcome> {
    let results = verify_checks(c)?;
    let failed = results.iter().filter(|r| !r.pass).count();
    let errored = results.iter().any(CheckResult::is_error);
    let out = c.output_or("verify_report.json");
    write_json(&out, &json!({"config": c.echo(), "checks": results}))?;
    let code = match (failed, errored) {
        (0, _) => EXIT_OK,
        (_, true) => EXIT_NUMERIC,
        _ => EXIT_VERIFY,
    };
    let mut message = String::new();
    for r in &results {
        let _ = writeln!(message, "{} {} measured={:e} threshold={:e}", if r.pass { "PASS" } else { "FAIL" }, r.check, r.measured, r.threshold);
    }
    let _ = write!(message, "{} checks, {failed} failed", results.len());
    Ok(Outcome { exit_code: code, message, artifacts: vec![out] })
}
