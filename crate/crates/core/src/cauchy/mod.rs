//! The Cauchy problem u(x, y) = Σ_k ∫ φ_k(ξ) Γ_{b_k}(x − ξ, y) dξ and the
//! identities that make the kernel family a delta family.
//!
//! Evaluation works in the similarity variable τ = (x − ξ)/y^δ. Since
//! Γ_b(x, y) = y^b Γ_b(x/y^δ, 1), each term becomes
//! y^{b+δ} ∫₀^∞ K(τ) [φ(x + τ y^δ) + φ(x − τ y^δ)] dτ with K(τ) = Γ_b(τ, 1),
//! so K is tabulated once on composite Gauss–Legendre panels and reused at
//! every (x, y).

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fracops::{derivative_of_integral, EquationSpec};
use crate::kernel::KernelSpec;
use crate::quad::{adaptive, gauss_legendre, on_partition, QuadOptions};
use crate::specfun::{decay_sigma, neumaier_sum, recip_gamma};

/// b_k = −α/(2n) − (1−β)(s−α) + k.
pub fn kernel_exponent(eq: &EquationSpec, k: u32) -> f64 {
    -eq.delta() - eq.order().mu_inner() + k as f64
}

pub type DataFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Named initial profiles; every φ_k of a preset run uses the same profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Preset {
    Gaussian,
    Bump,
    PolyDecay,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Gaussian, Preset::Bump, Preset::PolyDecay];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Gaussian => "gaussian",
            Preset::Bump => "bump",
            Preset::PolyDecay => "poly-decay",
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Preset::Gaussian => (-x * x).exp(),
            Preset::Bump => {
                if x.abs() < 1.0 {
                    (-1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            }
            Preset::PolyDecay => 1.0 / (1.0 + x * x),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| invalid(format!("unknown preset {s:?} (expected gaussian, bump or poly-decay)")))
    }
}

/// Cauchy data φ_0..φ_{s−1} with the growth certificate |φ_k(x)| ≤ M exp(N |x|^q).
#[derive(Clone)]
pub struct InitialData {
    pub funcs: Vec<DataFn>,
    pub growth_m: f64,
    pub growth_n: f64,
}

impl fmt::Debug for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialData")
            .field("count", &self.funcs.len())
            .field("growth_m", &self.growth_m)
            .field("growth_n", &self.growth_n)
            .finish()
    }
}

impl InitialData {
    pub fn new(eq: &EquationSpec, funcs: Vec<DataFn>, growth_m: f64, growth_n: f64) -> Result<Self> {
        if funcs.len() != eq.s_count as usize {
            return Err(invalid(format!("expected {} initial functions, got {}", eq.s_count, funcs.len())));
        }
        if !(growth_m > 0.0 && growth_m.is_finite()) {
            return Err(invalid(format!("growth constant M must be positive, got {growth_m}")));
        }
        if !(growth_n >= 0.0) {
            return Err(invalid(format!("growth constant N must be nonnegative, got {growth_n}")));
        }
        let sigma = decay_sigma(eq.n, eq.alpha);
        if !(growth_n < sigma) {
            return Err(invalid(format!("requires N < σ (N = {growth_n}, σ = {sigma})")));
        }
        Ok(InitialData { funcs, growth_m, growth_n })
    }

    pub fn preset(eq: &EquationSpec, p: Preset) -> Result<Self> {
        let f: DataFn = Arc::new(move |x| p.eval(x));
        InitialData::new(eq, vec![f; eq.s_count as usize], 1.0, 0.0)
    }

    /// Piecewise-linear data through the tabulated columns, zero outside the table.
    pub fn tabulated(eq: &EquationSpec, xs: Vec<f64>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if xs.len() < 2 || xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("table abscissae must be strictly increasing, at least two rows"));
        }
        if columns.iter().any(|c| c.len() != xs.len()) {
            return Err(invalid("table columns have unequal lengths"));
        }
        let xs = Arc::new(xs);
        let m = columns.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
        let funcs = columns
            .into_iter()
            .map(|col| {
                let xs = Arc::clone(&xs);
                let f: DataFn = Arc::new(move |x| {
                    if x < xs[0] || x > xs[xs.len() - 1] {
                        return 0.0;
                    }
                    let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
                    let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                    col[i - 1] * (1.0 - w) + col[i] * w
                });
                f
            })
            .collect();
        InitialData::new(eq, funcs, m, 0.0)
    }
}

/// Rectangular evaluation grid, y-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

impl Grid {
    pub fn uniform(x_min: f64, x_max: f64, x_steps: usize, y_min: f64, y_max: f64, y_steps: usize) -> Result<Self> {
        if x_steps == 0 || y_steps == 0 {
            return Err(invalid("grid needs at least one step in each direction"));
        }
        if !(y_min > 0.0) || y_max < y_min || x_max < x_min {
            return Err(invalid("grid needs 0 < y_min ≤ y_max and x_min ≤ x_max"));
        }
        Ok(Grid { xs: linspace(x_min, x_max, x_steps), ys: linspace(y_min, y_max, y_steps) })
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.ys.iter().flat_map(|&y| self.xs.iter().map(move |&x| (x, y))).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub err: Vec<f64>,
    /// Per-point quadrature failure, if any; the value is then the best estimate.
    pub failures: Vec<Option<String>>,
}

impl SolutionField {
    pub fn max_err(&self) -> f64 {
        self.err.iter().copied().fold(0.0, f64::max)
    }

    pub fn failed(&self) -> usize {
        self.failures.iter().filter(|f| f.is_some()).count()
    }
}

/// Width of the coarsest τ panel.
const BASE_WIDTH: f64 = 1.0;
const MAX_LEVEL: usize = 8;
const COARSE: usize = 12;
const FINE: usize = 24;
const KERNEL_TOL: f64 = 1e-12;

/// (τ, w·K(τ), w·err K(τ)) for one rule.
type Nodes = Vec<(f64, f64, f64)>;

struct Level {
    coarse: Nodes,
    fine: Nodes,
}

struct KernelTable {
    ks: KernelSpec,
    extent: f64,
    levels: Vec<OnceLock<std::result::Result<Level, String>>>,
}

impl KernelTable {
    fn build(&self, level: usize) -> Result<Level> {
        let width = BASE_WIDTH / (1u64 << level) as f64;
        let panels = (self.extent / width).ceil() as usize;
        let rule = |n: usize| -> Result<Nodes> {
            let r = gauss_legendre(n);
            let mut out = Vec::with_capacity(panels * n);
            for p in 0..panels {
                let (lo, hi) = (p as f64 * width, (p + 1) as f64 * width);
                let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                for (x, w) in r.nodes.iter().zip(&r.weights) {
                    let tau = c + h * x;
                    let k = self.ks.eval_dx(0, tau, 1.0, KERNEL_TOL)?;
                    out.push((tau, h * w * k.value, h * w * k.err_bound));
                }
            }
            Ok(out)
        };
        Ok(Level { coarse: rule(COARSE)?, fine: rule(FINE)? })
    }

    fn level(&self, level: usize) -> Result<&Level> {
        self.levels[level]
            .get_or_init(|| self.build(level).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| invalid(format!("kernel table: {e}")))
    }
}

/// One point of the solution with its error split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointValue {
    pub value: f64,
    /// Quadrature + kernel + window tail, added.
    pub err: f64,
    pub quad_err: f64,
    pub kernel_err: f64,
    pub tail_err: f64,
    pub converged: bool,
}

/// Evaluator of the Cauchy solution for fixed equation and data.
pub struct CauchySolver {
    pub eq: EquationSpec,
    pub data: InitialData,
    pub tol: f64,
    tables: Vec<KernelTable>,
}

/// Region the window has to cover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub x_abs_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl CauchySolver {
    pub fn new(eq: EquationSpec, data: InitialData, tol: f64, domain: Domain) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        if data.funcs.len() != eq.s_count as usize {
            return Err(invalid("initial data does not match the equation's s"));
        }
        let sigma = decay_sigma(eq.n, eq.alpha);
        if !(data.growth_n < sigma) {
            return Err(invalid(format!("requires N < σ (N = {}, σ = {sigma})", data.growth_n)));
        }
        if !(domain.y_min > 0.0 && domain.y_max >= domain.y_min) {
            return Err(invalid("domain needs 0 < y_min ≤ y_max"));
        }
        let mut tables = Vec::new();
        for k in 0..eq.s_count {
            let ks = KernelSpec::new(eq, kernel_exponent(&eq, k))?;
            let mut table = KernelTable { ks, extent: 0.0, levels: (0..=MAX_LEVEL).map(|_| OnceLock::new()).collect() };
            table.extent = window(&table.ks, &data, domain, 0.1 * tol)?;
            table.level(0)?;
            tables.push(table);
        }
        Ok(CauchySolver { eq, data, tol, tables })
    }

    /// Window half-width in τ for term k.
    pub fn extent(&self, k: u32) -> f64 {
        self.tables[k as usize].extent
    }

    fn term(&self, k: usize, level: &Level, x: f64, y: f64) -> (f64, f64, f64) {
        let ks = &self.tables[k].ks;
        let f = &self.data.funcs[k];
        let s = y.powf(ks.delta());
        let pre = y.powf(ks.b + ks.delta());
        let sum = |nodes: &Nodes| -> (f64, f64) {
            let mut v = Vec::with_capacity(nodes.len());
            let mut e = 0.0;
            for &(tau, wk, we) in nodes {
                let (p, m) = (f(x + tau * s), f(x - tau * s));
                v.push(wk * (p + m));
                e += we * (p.abs() + m.abs());
            }
            (neumaier_sum(v), e)
        };
        let (fine, kerr) = sum(&level.fine);
        let (coarse, _) = sum(&level.coarse);
        (pre * fine, (pre * (fine - coarse)).abs(), pre.abs() * kerr)
    }

    fn tail(&self, k: usize, x: f64, y: f64) -> f64 {
        let t = &self.tables[k];
        tail_bound(&t.ks, &self.data, t.extent, x.abs(), y)
    }

    /// u(x, y) with every term on the given table level.
    pub fn eval_at(&self, x: f64, y: f64, levels: &[usize]) -> Result<PointValue> {
        if !(y > 0.0) {
            return Err(invalid("the solution is evaluated at y > 0 only"));
        }
        let mut pv = PointValue { value: 0.0, err: 0.0, quad_err: 0.0, kernel_err: 0.0, tail_err: 0.0, converged: true };
        for (k, &l) in levels.iter().enumerate().take(self.tables.len()) {
            let level = self.tables[k].level(l.min(MAX_LEVEL))?;
            let (v, q, e) = self.term(k, level, x, y);
            pv.value += v;
            pv.quad_err += q;
            pv.kernel_err += e;
            pv.tail_err += self.tail(k, x, y);
        }
        pv.err = pv.quad_err + pv.kernel_err + pv.tail_err;
        Ok(pv)
    }

    /// Coarsest table levels that meet the tolerance at (x, y).
    pub fn levels_for(&self, x: f64, y: f64) -> Result<(Vec<usize>, bool)> {
        let mut out = Vec::with_capacity(self.tables.len());
        let mut ok = true;
        let share = self.tol / self.tables.len() as f64;
        for k in 0..self.tables.len() {
            let mut chosen = MAX_LEVEL;
            let mut met = false;
            for l in 0..=MAX_LEVEL {
                let (v, q, _) = self.term(k, self.tables[k].level(l)?, x, y);
                if q <= share * v.abs().max(1.0) {
                    chosen = l;
                    met = true;
                    break;
                }
            }
            ok &= met;
            out.push(chosen);
        }
        Ok((out, ok))
    }

    /// u(x, y) refined level by level until the quadrature estimate meets tol.
    pub fn eval(&self, x: f64, y: f64) -> Result<PointValue> {
        if !(y > 0.0) {
            return Err(invalid("the solution is evaluated at y > 0 only"));
        }
        let (levels, ok) = self.levels_for(x, y)?;
        let mut pv = self.eval_at(x, y, &levels)?;
        pv.converged = ok;
        Ok(pv)
    }

    /// A smooth evaluator u(x, y) frozen on the levels chosen at (x0, y0),
    /// suitable for finite differences and fractional quadrature.
    pub fn frozen(&self, x0: f64, y0: f64) -> Result<impl Fn(f64, f64) -> f64 + Sync + '_> {
        let (levels, _) = self.levels_for(x0, y0)?;
        Ok(move |x: f64, y: f64| self.eval_at(x, y, &levels).map(|p| p.value).unwrap_or(f64::NAN))
    }
}

/// ∫_T^∞ C env(τ) M exp(N (|x| + τ s)^q) dτ scaled by y^{b+δ}: the mass
/// outside the τ-window, both sides.
fn tail_bound(ks: &KernelSpec, data: &InitialData, extent: f64, x_abs: f64, y: f64) -> f64 {
    let db = &ks.bound;
    let t0 = extent.max(db.t0);
    let pre = y.powf(ks.b + ks.delta()).abs() * data.growth_m * db.c;
    if data.growth_n == 0.0 {
        return pre * db.tail_integral(t0);
    }
    let (q, s, nn) = (db.q(), y.powf(ks.delta()), data.growth_n);
    let g = |t: f64| db.envelope(t) * (nn * (x_abs + t * s).powf(q)).exp();
    let mut total = 0.0;
    let (mut lo, mut hi) = (t0, 2.0 * t0);
    for _ in 0..60 {
        let r = adaptive(g, lo, hi, &[], QuadOptions::new(1e-8, 0.0));
        total += r.value + r.error;
        if r.value <= 1e-6 * total && g(hi) < g(0.5 * (lo + hi)) {
            return pre * total;
        }
        lo = hi;
        hi *= 2.0;
    }
    f64::INFINITY
}

/// Smallest τ-window (by bisection) whose tail mass is below `tail_tol` on the domain.
fn window(ks: &KernelSpec, data: &InitialData, d: Domain, tail_tol: f64) -> Result<f64> {
    let worst = |t: f64| {
        [d.y_min, d.y_max].iter().map(|&y| tail_bound(ks, data, t, d.x_abs_max, y)).fold(0.0, f64::max)
    };
    let mut lo = ks.bound.t0;
    if worst(lo) <= tail_tol {
        return Ok(lo);
    }
    let mut hi = 2.0 * lo;
    let mut guard = 0;
    while !(worst(hi) <= tail_tol) {
        lo = hi;
        hi *= 2.0;
        guard += 1;
        if guard > 40 {
            return Err(invalid("no window meets the tail tolerance; the data grow too fast for this domain"));
        }
    }
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if worst(mid) <= tail_tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Evaluates the solution on a grid; points are independent and a failed
/// point does not stop the others.
pub fn solve(eq: &EquationSpec, data: &InitialData, grid: &Grid, tol: f64) -> Result<SolutionField> {
    if grid.ys.iter().any(|&y| !(y > 0.0)) {
        return Err(invalid("all grid y must be positive"));
    }
    let pts = grid.points();
    let domain = Domain {
        x_abs_max: grid.xs.iter().fold(0.0f64, |a, x| a.max(x.abs())),
        y_min: grid.ys.iter().copied().fold(f64::INFINITY, f64::min),
        y_max: grid.ys.iter().copied().fold(0.0, f64::max),
    };
    let solver = CauchySolver::new(*eq, data.clone(), tol, domain)?;
    let res: Vec<Result<PointValue>> = pts.par_iter().map(|&(x, y)| solver.eval(x, y)).collect();
    let mut values = Vec::with_capacity(pts.len());
    let mut err = Vec::with_capacity(pts.len());
    let mut failures = Vec::with_capacity(pts.len());
    for (r, (x, y)) in res.into_iter().zip(pts) {
        match r {
            Ok(p) => {
                values.push(p.value);
                err.push(p.err);
                failures.push((!p.converged).then(|| format!("quadrature tolerance not met at ({x}, {y})")));
            }
            Err(e) => {
                values.push(0.0);
                err.push(f64::INFINITY);
                failures.push(Some(format!("({x}, {y}): {e}")));
            }
        }
    }
    Ok(SolutionField { grid: grid.clone(), values, err, failures })
}

/// Both sides of ∫ ∂^k_y I^{(1−β)(s−α)} Γ_b(x − ξ, y) dξ = y^e / Γ(e + 1),
/// e = α/(2n) + b + (1−β)(s−α) − k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelIdentity {
    pub lhs: f64,
    pub rhs: f64,
    /// Relative error estimate of the ξ-quadrature at z = y.
    pub quad_err: f64,
}

impl KernelIdentity {
    pub fn deviation(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs().max(1.0)
    }
}

/// The left side is computed without the scaling law: the mass
/// F(z) = ∫ Γ_b(ξ, z) dξ comes from adaptive quadrature of the kernel itself,
/// then the fractional integral and the y-derivatives act on F numerically.
pub fn kernel_identity(eq: &EquationSpec, b: f64, k: u32, y: f64) -> Result<KernelIdentity> {
    if k >= eq.s_count {
        return Err(invalid(format!("k = {k} must be below s = {}", eq.s_count)));
    }
    if !(y > 0.0) {
        return Err(invalid("kernel identity needs y > 0"));
    }
    let ks = KernelSpec::new(*eq, b)?;
    let delta = ks.delta();
    let lead = b + delta;
    if !(lead > -1.0) {
        return Err(invalid(format!("the kernel mass ~ y^{lead} is not locally integrable")));
    }
    let mu = eq.order().mu_inner();
    let radius = ks.truncation_radius(y, 1e-15 * y.powf(lead))?;
    let scale = y.powf(delta);
    let breaks: Vec<f64> = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|c| c * scale).collect();
    let mut failure = None;
    let r = adaptive(
        |xi| match ks.eval_dx(0, xi, y, KERNEL_TOL) {
            Ok(v) => v.value,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        radius,
        &breaks,
        QuadOptions::new(1e-13, 1e-300),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if !r.converged {
        return Err(Error::Quadrature { estimate: 2.0 * r.value, error: 2.0 * r.error });
    }
    let partition = r.partition;
    // the same panels, stretched with the kernel's natural width
    let mass = |z: f64| -> f64 {
        let c = (z / y).powf(delta);
        let p: Vec<(f64, f64)> = partition.iter().map(|&(a, b)| (a * c, b * c)).collect();
        2.0 * on_partition(|xi| ks.eval_dx(0, xi, z, KERNEL_TOL).map(|v| v.value).unwrap_or(f64::NAN), &p)
    };
    let lhs = derivative_of_integral(&mass, mu, k, y, lead)?;
    if !lhs.is_finite() {
        return Err(Error::Quadrature { estimate: lhs, error: f64::INFINITY });
    }
    let e = delta + b + mu - k as f64;
    let rhs = y.powf(e) * recip_gamma(e + 1.0);
    Ok(KernelIdentity { lhs, rhs, quad_err: (r.error / r.value).abs() })
}

/// Deviation of the regularized k-trace ∂^k_y I^{(1−β)(s−α)} u from φ_k.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceK {
    pub k: u32,
    /// sup over probes of |trace(y) − φ_k| for each y of the sequence.
    pub raw: Vec<f64>,
    /// sup over probes after eliminating the leading powers of y.
    pub extrapolated: f64,
    /// log(raw_i/raw_{i+1}) / log(y_i/y_{i+1}).
    pub order: Vec<f64>,
    pub eliminated: Vec<f64>,
}

impl TraceK {
    pub fn decreasing(&self) -> bool {
        self.raw.windows(2).all(|w| w[1] < w[0])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceReport {
    pub y_seq: Vec<f64>,
    pub traces: Vec<TraceK>,
}

/// Powers y^p present in trace_k(y) − φ_k: p = lα + j − k > 0 for l ≥ 0 and
/// 0 ≤ j < s, smallest first.
pub fn trace_exponents(eq: &EquationSpec, k: u32, count: usize) -> Vec<f64> {
    let mut p: Vec<f64> = Vec::new();
    for l in 0..=(count as u32 + eq.s_count + 2) {
        for j in 0..eq.s_count {
            let e = l as f64 * eq.alpha + j as f64 - k as f64;
            if e > 1e-12 && !p.iter().any(|q| (q - e).abs() < 1e-12) {
                p.push(e);
            }
        }
    }
    p.sort_by(f64::total_cmp);
    p.truncate(count);
    p
}

/// Finite-y traces of u at each y of `y_seq` (decreasing), their deviations
/// from φ_k, and the limit obtained by fitting T₀ + Σ c_m y^{p_m} through
/// all of them.
pub fn verify_initial_trace(
    eq: &EquationSpec,
    data: &InitialData,
    u: &(dyn Fn(f64, f64) -> f64 + Sync),
    x_probes: &[f64],
    y_seq: &[f64],
) -> Result<TraceReport> {
    if y_seq.is_empty() || y_seq.windows(2).any(|w| !(w[1] < w[0])) || !(y_seq[y_seq.len() - 1] > 0.0) {
        return Err(invalid("y_seq must be positive and strictly decreasing"));
    }
    let mu = eq.order().mu_inner();
    let mut traces = Vec::new();
    for k in 0..eq.s_count {
        let p = trace_exponents(eq, k, y_seq.len() - 1);
        let n = y_seq.len();
        let m = DMatrix::from_fn(n, n, |i, c| if c == 0 { 1.0 } else { y_seq[i].powf(p[c - 1]) });
        let lu = m.lu();
        let rows: Vec<Result<(Vec<f64>, f64)>> = x_probes
            .par_iter()
            .map(|&x| {
                let target = data.funcs[k as usize](x);
                let mut vals = Vec::with_capacity(n);
                for &y in y_seq {
                    vals.push(derivative_of_integral(&|z| u(x, z), mu, k, y, -mu)?);
                }
                let dev: Vec<f64> = vals.iter().map(|v| (v - target).abs()).collect();
                let limit = lu
                    .solve(&DVector::from_vec(vals))
                    .map(|c| c[0])
                    .ok_or_else(|| invalid("singular extrapolation system"))?;
                Ok((dev, (limit - target).abs()))
            })
            .collect();
        let mut raw = vec![0.0f64; y_seq.len()];
        let mut extrapolated = 0.0f64;
        for r in rows {
            let (dev, ex) = r?;
            for (a, d) in raw.iter_mut().zip(dev) {
                *a = a.max(d);
            }
            extrapolated = extrapolated.max(ex);
        }
        let order = raw
            .windows(2)
            .zip(y_seq.windows(2))
            .map(|(d, y)| (d[0] / d[1]).ln() / (y[0] / y[1]).ln())
            .collect();
        traces.push(TraceK { k, raw, extrapolated, order, eliminated: p });
    }
    Ok(TraceReport { y_seq: y_seq.to_vec(), traces })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_examples() {
        let e = EquationSpec::new(2, 0.8, 0.0).unwrap();
        assert!((kernel_exponent(&e, 0) + 0.4).abs() < 1e-15);
        let e = EquationSpec::new(2, 1.5, 0.5).unwrap();
        assert!((kernel_exponent(&e, 1) - 0.375).abs() < 1e-15);
        let e = EquationSpec::new(3, 0.9, 1.0).unwrap();
        assert!((kernel_exponent(&e, 0) + 0.15).abs() < 1e-15);
    }

    #[test]
    fn certificate_is_enforced() {
        let e = EquationSpec::new(2, 0.8, 1.0).unwrap();
        let f: DataFn = Arc::new(|_| 1.0);
        let sigma = decay_sigma(2, 0.8);
        assert!(InitialData::new(&e, vec![f.clone()], 1.0, 0.5 * sigma).is_ok());
        let msg = InitialData::new(&e, vec![f.clone()], 1.0, sigma).unwrap_err().to_string();
        assert!(msg.contains("N < σ"), "{msg}");
        assert!(InitialData::new(&e, vec![f.clone(), f], 1.0, 0.0).is_err());
    }

    #[test]
    fn zero_data_gives_zero() {
        let e = EquationSpec::new(2, 0.8, 0.5).unwrap();
        let f: DataFn = Arc::new(|_| 0.0);
        let d = InitialData::new(&e, vec![f], 1.0, 0.0).unwrap();
        let g = Grid::uniform(-1.0, 1.0, 3, 0.5, 1.0, 2).unwrap();
        let s = solve(&e, &d, &g, 1e-10).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn heat_solution() {
        let e = EquationSpec::new(1, 1.0, 0.3).unwrap();
        let d = InitialData::preset(&e, Preset::Gaussian).unwrap();
        let g = Grid::uniform(-2.0, 2.0, 5, 0.1, 1.0, 3).unwrap();
        let s = solve(&e, &d, &g, 1e-11).unwrap();
        for ((x, y), v) in g.points().into_iter().zip(&s.values) {
            let exact = (-x * x / (1.0 + 4.0 * y)).exp() / (1.0 + 4.0 * y).sqrt();
            assert!((v - exact).abs() < 1e-10, "({x},{y}) {v} {exact}");
        }
        assert_eq!(s.failed(), 0);
    }

    #[test]
    fn tabulated_interpolates() {
        let e = EquationSpec::new(2, 0.8, 1.0).unwrap();
        let d = InitialData::tabulated(&e, vec![0.0, 1.0, 2.0], vec![vec![0.0, 2.0, 0.0]]).unwrap();
        assert_eq!(d.funcs[0](0.5), 1.0);
        assert_eq!(d.funcs[0](3.0), 0.0);
        assert_eq!(d.growth_m, 2.0);
    }

    #[test]
    fn trace_powers() {
        let e = EquationSpec::new(2, 1.5, 0.0).unwrap();
        assert_eq!(trace_exponents(&e, 1, 3), vec![0.5, 1.5, 2.0]);
        let e = EquationSpec::new(2, 0.8, 0.0).unwrap();
        let p = trace_exponents(&e, 0, 2);
        assert!((p[0] - 0.8).abs() < 1e-15 && (p[1] - 1.6).abs() < 1e-15);
    }
}
