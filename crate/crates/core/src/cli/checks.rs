//! Verification checks shared by the `verify` command and the test suite.
//! Each check compares a computed quantity against an independent oracle.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cauchy::{kernel_identity, kernel_exponent, solve, verify_initial_trace, CauchySolver, Domain, Grid, InitialData, Preset};
use crate::error::Result;
use crate::fracops::{pde_residual, EquationSpec, GeneralEquationSpec, HilferOptions, ResidualOptions, Singularity};
use crate::kernel::KernelSpec;
use crate::selfsim::{coefficients, similarity_exponents, termwise_residual};
use crate::specfun::{gen_wright, mittag_leffler, recip_gamma, wright_phi, GenWrightParams, WrightParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub parameters: Value,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckResult {
    fn below(check: &str, parameters: Value, measured: f64, threshold: f64) -> Self {
        CheckResult { check: check.into(), parameters, measured, threshold, pass: measured < threshold }
    }

    /// A check that could not be computed.
    pub fn errored(check: &str, mut parameters: Value, threshold: f64, err: &crate::Error) -> Self {
        parameters["error"] = Value::String(err.to_string());
        CheckResult { check: check.into(), parameters, measured: f64::NAN, threshold, pass: false }
    }

    pub fn is_error(&self) -> bool {
        self.parameters.get("error").is_some()
    }
}

fn guard(check: &str, params: Value, threshold: f64, r: Result<CheckResult>) -> CheckResult {
    r.unwrap_or_else(|e| CheckResult::errored(check, params, threshold, &e))
}

/// max over z ∈ [0, 5] of |φ(−1/2, 1/2, −z) − e^{−z²/4}/√π|.
pub fn wright_gaussian() -> CheckResult {
    let params = json!({"points": 51, "z_max": 5.0});
    guard("wright-gaussian", params.clone(), 1e-10, (|| {
        let p = WrightParams::new(0.5, 0.5)?;
        let mut worst = 0.0f64;
        for i in 0..=50 {
            let z = 0.1 * i as f64;
            let v = wright_phi(&p, Complex64::new(-z, 0.0), 1e-14)?;
            worst = worst.max((v.value.re - (-z * z / 4.0).exp() / PI.sqrt()).abs());
        }
        Ok(CheckResult::below("wright-gaussian", params.clone(), worst, 1e-10))
    })())
}

const FIXTURES: [(&str, &str); 4] = [
    ("recip_gamma", include_str!("../../tests/fixtures/recip_gamma.txt")),
    ("wright_phi", include_str!("../../tests/fixtures/wright_phi.txt")),
    ("gen_wright", include_str!("../../tests/fixtures/gen_wright.txt")),
    ("mittag_leffler", include_str!("../../tests/fixtures/mittag_leffler.txt")),
];

fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().filter_map(|t| t.parse().ok()).collect())
        .collect()
}

/// Worst relative error over one embedded high-precision table.
fn fixture_error(name: &str, text: &str) -> Result<(f64, usize)> {
    let mut worst = 0.0f64;
    let table = rows(text);
    for r in &table {
        let (got, want) = match name {
            "recip_gamma" => (Complex64::new(recip_gamma(r[0]), 0.0), Complex64::new(r[1], 0.0)),
            "wright_phi" => {
                let p = WrightParams::new(r[0], r[1])?;
                (wright_phi(&p, Complex64::new(r[2], r[3]), 1e-13)?.value, Complex64::new(r[4], r[5]))
            }
            "gen_wright" => {
                let p = GenWrightParams::new(r[0], r[1], r[2], r[3])?;
                (gen_wright(&p, Complex64::new(r[4], r[5]), 1e-13)?.value, Complex64::new(r[6], r[7]))
            }
            _ => (mittag_leffler(r[0], Complex64::new(r[1], r[2]), 1e-13)?.value, Complex64::new(r[3], r[4])),
        };
        worst = worst.max((got - want).norm() / want.norm().max(f64::MIN_POSITIVE));
    }
    Ok((worst, table.len()))
}

pub fn fixtures() -> Vec<CheckResult> {
    FIXTURES
        .iter()
        .map(|(name, text)| {
            let params = json!({"table": name});
            guard("fixture", params.clone(), 1e-12, fixture_error(name, text).map(|(w, n)| {
                CheckResult::below("fixture", json!({"table": name, "rows": n}), w, 1e-12)
            }))
        })
        .collect()
}

fn eq_params(eq: &EquationSpec) -> Value {
    json!({"n": eq.n, "alpha": eq.alpha, "beta": eq.beta})
}

/// The calibrated kernel sign equals the heat-kernel anchor's sign.
pub fn calibration(eq: &EquationSpec) -> CheckResult {
    let params = eq_params(eq);
    guard("sign-calibration", params.clone(), 0.5, (|| {
        let ks = KernelSpec::new(*eq, kernel_exponent(eq, 0))?;
        let c = ks.calibration;
        let mut p = params.clone();
        p["sign"] = json!(c.sign);
        p["anchor_sign"] = json!(c.anchor_sign);
        p["printed_integral"] = json!(c.printed_integral);
        Ok(CheckResult::below("sign-calibration", p, (c.sign - c.anchor_sign).abs(), 0.5))
    })())
}

/// The kernel identity for every pair (j, k) with b = b_j.
pub fn kernel_identity_sweep(eq: &EquationSpec, ys: &[f64]) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for j in 0..eq.s_count {
        for k in 0..eq.s_count {
            for &y in ys {
                let b = kernel_exponent(eq, j);
                let mut p = eq_params(eq);
                p["j"] = json!(j);
                p["k"] = json!(k);
                p["y"] = json!(y);
                p["b"] = json!(b);
                out.push(guard("kernel-identity", p.clone(), 1e-6, kernel_identity(eq, b, k, y).map(|r| {
                    p["lhs"] = json!(r.lhs);
                    p["rhs"] = json!(r.rhs);
                    CheckResult::below("kernel-identity", p.clone(), r.deviation(), 1e-6)
                })));
            }
        }
    }
    out
}

/// Extrapolated jumps of ∂^s_x Γ_b at x = 0 against the closed form.
pub fn jump_relation(eq: &EquationSpec, b: f64, dy: f64, orders: &[u32]) -> Vec<CheckResult> {
    orders
        .iter()
        .map(|&s| {
            let mut p = eq_params(eq);
            p["b"] = json!(b);
            p["s"] = json!(s);
            p["dy"] = json!(dy);
            let closed_zero = (s + 1) % (2 * eq.n) != 0;
            let threshold = if closed_zero { 1e-7 } else { 1e-5 };
            guard("jump-relation", p.clone(), threshold, (|| {
                let ks = KernelSpec::new(*eq, b)?;
                let num = ks.extrapolated_jump(s, dy, 0.2)?;
                let closed = ks.jump_closed_form(s, dy);
                p["numeric"] = json!(num);
                p["closed"] = json!(closed);
                let measured = if closed_zero { num.abs() } else { (num - closed).abs() / closed.abs() };
                Ok(CheckResult::below("jump-relation", p.clone(), measured, threshold))
            })())
        })
        .collect()
}

pub fn trace_probes() -> Vec<f64> {
    (0..=16).map(|i| -2.0 + 0.25 * i as f64).collect()
}

/// Regularized traces of the Gaussian-data solution: the deviation at the
/// last y must be below `threshold` and the deviations must decrease.
pub fn initial_trace(eq: &EquationSpec, y_seq: &[f64], threshold: f64) -> Vec<CheckResult> {
    let params = {
        let mut p = eq_params(eq);
        p["y_seq"] = json!(y_seq);
        p
    };
    let run = || -> Result<Vec<CheckResult>> {
        let data = InitialData::preset(eq, Preset::Gaussian)?;
        let y_last = y_seq[y_seq.len() - 1];
        let solver = CauchySolver::new(*eq, data.clone(), 1e-12, Domain { x_abs_max: 2.0, y_min: y_last, y_max: y_seq[0] })?;
        let u = solver.frozen(0.0, y_last)?;
        let report = verify_initial_trace(eq, &data, &u, &trace_probes(), y_seq)?;
        Ok(report
            .traces
            .iter()
            .map(|t| {
                let mut p = params.clone();
                p["k"] = json!(t.k);
                p["raw"] = json!(t.raw);
                p["extrapolated"] = json!(t.extrapolated);
                p["order"] = json!(t.order);
                p["decreasing"] = json!(t.decreasing());
                let measured = t.raw[t.raw.len() - 1];
                CheckResult {
                    check: "initial-trace".into(),
                    parameters: p,
                    measured,
                    threshold,
                    pass: measured < threshold && t.decreasing(),
                }
            })
            .collect())
    };
    run().unwrap_or_else(|e| vec![CheckResult::errored("initial-trace", params.clone(), threshold, &e)])
}

/// x step for an order-`order` stencil on values carrying relative noise
/// `noise`: balances the O(h⁴) Richardson remainder against noise/h^order.
fn x_step(order: u32, noise: f64) -> f64 {
    2.0 * noise.powf(1.0 / (order as f64 + 4.0))
}

/// Normalized residual of Γ_b at an interior point.
pub fn kernel_residual(eq: &EquationSpec, b: f64, x: f64, y: f64) -> CheckResult {
    let mut p = eq_params(eq);
    p["b"] = json!(b);
    p["x"] = json!(x);
    p["y"] = json!(y);
    guard("residual-kernel", p.clone(), 1e-4, (|| {
        let ks = KernelSpec::new(*eq, b)?;
        let u = |x: f64, y: f64| ks.eval_dx(0, x, y, 1e-13).map(|v| v.value).unwrap_or(f64::NAN);
        // Γ_b(x, ·) is flat at y = 0 for x ≠ 0
        let opts = ResidualOptions { h: x_step(2 * eq.n, 1e-13), sing: Singularity { inner: 0.0, outer: Some(0.0) }, hilfer: HilferOptions::default() };
        let r = pde_residual(&u, eq, x, y, opts)?;
        Ok(CheckResult::below("residual-kernel", p.clone(), r.normalized.abs(), 1e-4))
    })())
}

/// Normalized residual of the Gaussian-data solution at an interior point.
pub fn solve_residual(eq: &EquationSpec, x: f64, y: f64) -> CheckResult {
    let mut p = eq_params(eq);
    p["x"] = json!(x);
    p["y"] = json!(y);
    guard("residual-solve", p.clone(), 1e-4, (|| {
        let data = InitialData::preset(eq, Preset::Gaussian)?;
        let solver = CauchySolver::new(*eq, data, 1e-12, Domain { x_abs_max: x.abs() + 1.0, y_min: 1e-6 * y, y_max: y })?;
        let u = solver.frozen(x, y)?;
        let mu1 = eq.order().mu_inner();
        // I^{μ₁}u = Σ_j y^j (φ_j + O(y^α)), so ∂^s of it starts at y^{α−s}
        let sing = Singularity { inner: -mu1, outer: Some(eq.alpha - eq.s_count as f64) };
        let opts = ResidualOptions { h: x_step(2 * eq.n, 1e-12), sing, hilfer: HilferOptions::default() };
        let r = pde_residual(&u, eq, x, y, opts)?;
        Ok(CheckResult::below("residual-solve", p.clone(), r.normalized.abs(), 1e-4))
    })())
}

fn heat(x: f64, y: f64) -> f64 {
    (-x * x / (4.0 * y)).exp() / (2.0 * (PI * y).sqrt())
}

/// n = 1, α = 1 kernel and Gaussian-data solution against the heat equation.
pub fn heat_reduction(beta: f64) -> Vec<CheckResult> {
    let params = json!({"n": 1, "alpha": 1.0, "beta": beta});
    let grid = Grid { xs: (0..=12).map(|i| -3.0 + 0.5 * i as f64).collect(), ys: vec![0.1, 0.4, 0.7, 1.0] };
    let kernel = (|| {
        let eq = EquationSpec::new(1, 1.0, beta)?;
        let ks = KernelSpec::new(eq, kernel_exponent(&eq, 0))?;
        let mut worst = 0.0f64;
        for (x, y) in grid.points() {
            let v = ks.eval_dx(0, x, y, 1e-13)?.value;
            worst = worst.max((v - heat(x, y)).abs());
        }
        Ok(CheckResult::below("heat-kernel", params.clone(), worst, 1e-8))
    })();
    let field = (|| {
        let eq = EquationSpec::new(1, 1.0, beta)?;
        let data = InitialData::preset(&eq, Preset::Gaussian)?;
        let s = solve(&eq, &data, &grid, 1e-11)?;
        let worst = grid
            .points()
            .iter()
            .zip(&s.values)
            .map(|(&(x, y), v)| (v - (-x * x / (1.0 + 4.0 * y)).exp() / (1.0 + 4.0 * y).sqrt()).abs())
            .fold(0.0, f64::max);
        Ok(CheckResult::below("heat-solve", params.clone(), worst, 1e-8))
    })();
    vec![guard("heat-kernel", params.clone(), 1e-8, kernel), guard("heat-solve", params.clone(), 1e-8, field)]
}

/// Transform of the Caputo solution with Gaussian data against
/// √π e^{−ω²/4} E_α(−ω⁴ y^α), n = 2, β = 1, for ω ∈ [0, 3].
pub fn caputo_fourier(alpha: f64, y: f64) -> CheckResult {
    let params = json!({"n": 2, "alpha": alpha, "beta": 1.0, "y": y, "omega_max": 3.0});
    guard("caputo-fourier", params.clone(), 1e-4, (|| {
        let eq = EquationSpec::new(2, alpha, 1.0)?;
        let data = InitialData::preset(&eq, Preset::Gaussian)?;
        let (half, dx) = (40.0, 0.05);
        let solver = CauchySolver::new(eq, data, 1e-12, Domain { x_abs_max: half, y_min: y, y_max: y })?;
        let m = (half / dx) as i64;
        let mut xs = Vec::new();
        let mut us = Vec::new();
        for i in -m..=m {
            let x = i as f64 * dx;
            xs.push(x);
            us.push(solver.eval(x, y)?.value);
        }
        let mut worst = 0.0f64;
        for i in 0..=30 {
            let w = 0.1 * i as f64;
            let dft: f64 = xs.iter().zip(&us).map(|(x, u)| u * (w * x).cos()).sum::<f64>() * dx;
            let e = mittag_leffler(alpha, Complex64::new(-w.powi(4) * y.powf(alpha), 0.0), 1e-13)?.value.re;
            let want = PI.sqrt() * (-w * w / 4.0).exp() * e;
            worst = worst.max((dft - want).abs());
        }
        Ok(CheckResult::below("caputo-fourier", params.clone(), worst, 1e-4))
    })())
}

/// Termwise residual of the truncated self-similar series for each N in
/// `terms`; passes when the last is below 1e−4 and they decrease.
pub fn selfsim_residual(g: &GeneralEquationSpec, j: u32, b: f64, x: f64, y: f64, terms: &[usize]) -> CheckResult {
    let params = json!({
        "m": g.m, "k": g.k, "alpha1": g.alpha1, "beta1": g.beta1, "alpha2": g.alpha2,
        "beta2": g.beta2, "d": g.d, "j": j, "b": b, "x": x, "y": y, "terms": terms,
    });
    guard("selfsim-residual", params.clone(), 1e-4, (|| {
        let e = similarity_exponents(g, b);
        let mut res = Vec::new();
        for &n in terms {
            let t = coefficients(g, &e, j, n, 1.0)?;
            res.push(termwise_residual(g, &e, &t, x, y)?.normalized.abs());
        }
        let decreasing = res.windows(2).all(|w| w[1] < w[0]);
        let mut p = params.clone();
        p["residuals"] = json!(res);
        let measured = res[res.len() - 1];
        Ok(CheckResult { check: "selfsim-residual".into(), parameters: p, measured, threshold: 1e-4, pass: measured < 1e-4 && decreasing })
    })())
}
