//! Wright function φ(−δ, ε, z) and the generalized Wright function W.
//!
//! The power series is summed with a certified tail bound. For arguments in
//! the decaying sector the series cancels catastrophically long before the
//! function is negligible, so there the Hankel integral
//! φ = (1/2πi) ∫ e^{τ − w τ^δ} τ^{−ε} dτ, w = −z, is evaluated along its
//! steepest-descent path through the saddle point.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gamma::{ln_gamma, ln_recip_gamma_bound, recip_gamma};
use super::series::{sum_certified, RawSum, SeriesStatus, SeriesValue};
use crate::error::{invalid, Result};

const MAX_TERMS: usize = 20_000;

/// Saddle scale S = (δ|z|)^{1/(1−δ)} above which the contour is tried first.
const CONTOUR_FIRST: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrightParams {
    pub delta: f64,
    pub eps: f64,
}

impl WrightParams {
    pub fn new(delta: f64, eps: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid(format!("Wright parameter delta = {delta} must lie in (0,1)")));
        }
        if !eps.is_finite() {
            return Err(invalid("Wright parameter eps must be finite"));
        }
        Ok(WrightParams { delta, eps })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenWrightParams {
    pub mu: f64,
    pub a: f64,
    pub nu: f64,
    pub b: f64,
}

impl GenWrightParams {
    pub fn new(mu: f64, a: f64, nu: f64, b: f64) -> Result<Self> {
        if !(mu + nu > 0.0) {
            return Err(invalid(format!(
                "generalized Wright series needs mu + nu > 0, got {mu} + {nu}"
            )));
        }
        Ok(GenWrightParams { mu, a, nu, b })
    }
}

/// Raw power series of φ(−δ, ε, z).
pub fn wright_series(p: &WrightParams, z: Complex64, tol: f64) -> RawSum {
    let (delta, eps) = (p.delta, p.eps);
    let lnz = z.norm().ln();
    let argz = z.arg();
    let mut pow = Complex64::new(1.0, 0.0);
    let mut use_logs = false;
    sum_certified(
        |k| {
            let x = eps - delta * k as f64;
            if k > 0 && !use_logs {
                pow = pow * z / k as f64;
                if pow.norm() < 1e-250 {
                    use_logs = true;
                }
            }
            let rg = recip_gamma(x);
            if rg == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if !use_logs && rg.is_finite() {
                return pow * rg;
            }
            let (lg, sg) = ln_gamma(x);
            let lm = k as f64 * lnz - ln_gamma(k as f64 + 1.0).0 - lg;
            Complex64::from_polar(lm.exp(), k as f64 * argz) * sg
        },
        |k| k as f64 * lnz - ln_gamma(k as f64 + 1.0).0 + ln_recip_gamma_bound(eps - delta * k as f64),
        z.norm().ceil() as usize,
        tol,
        MAX_TERMS,
    )
}

/// Steepest-descent Hankel evaluation; `None` when z is outside the decaying sector.
pub fn wright_contour(p: &WrightParams, z: Complex64, tol: f64) -> Option<(Complex64, f64, usize)> {
    let (delta, eps) = (p.delta, p.eps);
    let w = -z;
    let r0 = w.norm();
    if r0 == 0.0 {
        return None;
    }
    let theta = w.arg();
    let psi = theta / (1.0 - delta);
    if psi.abs() > FRAC_PI_2 - 0.05 {
        return None;
    }
    let s = (delta * r0).powf(1.0 / (1.0 - delta));
    let g_star = Complex64::from_polar(1.0 - 1.0 / delta, psi);
    let c0 = Complex64::from_polar((2.0 / (1.0 - delta)).sqrt(), 0.5 * (PI + psi));
    let path = SaddlePath { delta, ustar: Complex64::from_polar(1.0, psi), c0, psi };

    // rmax is rounded up to a quarter-octave grid so paths can be shared
    // between arguments with the same direction.
    let rmax = 2f64.powf((4.0 * (40.0 / s).sqrt().log2()).ceil() / 4.0);
    let mut n = 32usize;
    let mut prev: Option<Complex64> = None;
    let mut best = None;
    while n <= 4096 {
        let h = rmax / n as f64;
        let nodes = cached_nodes(&path, delta, theta, rmax, n)?;
        let mut sum = super::series::CompensatedSum::new();
        let mut abs = 0.0;
        let mut sum2 = super::series::CompensatedSum::new();
        for (j, (r, l, du)) in nodes.iter().enumerate() {
            let f = (-s * r * r - eps * l).exp() * du;
            sum.add(f);
            abs += f.norm();
            if j % 2 == 0 {
                sum2.add(f);
            }
        }
        let t_h = sum.value() * h;
        let t_2h = sum2.value() * (2.0 * h);
        let diff = (t_h - t_2h).norm();
        let pref = Complex64::new(s.powf(1.0 - eps), 0.0) * (g_star * s).exp()
            / Complex64::new(0.0, 2.0 * PI);
        let rounding = 1e-15 * (10.0 + (g_star * s).norm()) * abs * h;
        let err = pref.norm() * (diff + rounding);
        let value = pref * t_h;
        best = Some((value, err, nodes.len()));
        let tight = diff <= 1e-3 * tol * t_h.norm().max(1e-300) || diff <= rounding;
        if tight || prev.is_some_and(|q: Complex64| (q - t_h).norm() <= rounding) {
            break;
        }
        prev = Some(t_h);
        n *= 2;
    }
    best
}

type Nodes = Arc<Vec<(f64, Complex64, Complex64)>>;
type PathKey = (u64, u64, u64, usize);

fn path_cache() -> &'static RwLock<HashMap<PathKey, Option<Nodes>>> {
    static CACHE: OnceLock<RwLock<HashMap<PathKey, Option<Nodes>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

const PATH_CACHE_LIMIT: usize = 4096;

/// The path depends on (δ, arg w) and the grid only, not on ε or |w|.
fn cached_nodes(path: &SaddlePath, delta: f64, theta: f64, rmax: f64, n: usize) -> Option<Nodes> {
    let key = (delta.to_bits(), theta.to_bits(), rmax.to_bits(), n);
    if let Some(v) = path_cache().read().unwrap().get(&key) {
        return v.clone();
    }
    let nodes = path.nodes(rmax / n as f64, n).map(Arc::new);
    let mut cache = path_cache().write().unwrap();
    if cache.len() >= PATH_CACHE_LIMIT {
        cache.clear();
    }
    cache.entry(key).or_insert(nodes).clone()
}

/// Path through the saddle u* = e^{iψ}, written as u = u* e^w so that
/// G(u) − G(u*) = u* q(w) is free of cancellation near w = 0.
struct SaddlePath {
    delta: f64,
    ustar: Complex64,
    c0: Complex64,
    psi: f64,
}

/// e^x − 1 − x without cancellation for small |x|.
fn em1x(x: Complex64) -> Complex64 {
    if x.norm() > 0.5 {
        return x.exp() - 1.0 - x;
    }
    let mut term = x * x * 0.5;
    let mut acc = term;
    for k in 3..30 {
        term = term * x / k as f64;
        acc += term;
        if term.norm() <= 1e-17 * acc.norm() {
            break;
        }
    }
    acc
}

impl SaddlePath {
    /// q(w) = (e^w − 1 − w) − (e^{δw} − 1 − δw)/δ and q'(w) = e^w − e^{δw}.
    fn q(&self, w: Complex64) -> (Complex64, Complex64, f64) {
        let a = em1x(w);
        let b = em1x(w * self.delta);
        let dq = a - b + w * (1.0 - self.delta);
        (a - b / self.delta, dq, a.norm() + b.norm() / self.delta)
    }

    /// Node list (r, log u, du/dr) for r = j h, j = −n..n.
    fn nodes(&self, h: f64, n: usize) -> Option<Vec<(f64, Complex64, Complex64)>> {
        let l0 = Complex64::new(0.0, self.psi);
        let mut out = vec![(0.0, l0, self.c0); 2 * n + 1];
        // dw/dr at the saddle
        let dw0 = self.c0 / self.ustar;
        for dir in [1.0, -1.0] {
            let mut w = Complex64::new(0.0, 0.0);
            let mut dw = dw0 * dir;
            let mut r = 0.0;
            for j in 1..=n {
                let target = j as f64 * h;
                let (nw, ndw) = self.advance(w, dw, r, target)?;
                w = nw;
                dw = ndw;
                r = target;
                let idx = if dir > 0.0 { n + j } else { n - j };
                out[idx] = (dir * r, l0 + w, self.ustar * w.exp() * dw * dir);
            }
        }
        Some(out)
    }

    /// Continues w(r) from `r0` to `r1` on the branch fixed by the initial slope.
    fn advance(&self, w0: Complex64, dw0: Complex64, r0: f64, r1: f64) -> Option<(Complex64, Complex64)> {
        let mut pieces = 1usize;
        'outer: while pieces <= 1 << 14 {
            let (mut w, mut dw) = (w0, dw0);
            let step = (r1 - r0) / pieces as f64;
            for i in 1..=pieces {
                let r = r0 + step * i as f64;
                let rhs = -r * r / self.ustar;
                let mut v = w + dw * step;
                let mut ok = false;
                for _ in 0..40 {
                    let (q, dq, scale) = self.q(v);
                    let f = q - rhs;
                    if f.norm() <= 4.0 * f64::EPSILON * (scale + r * r) {
                        ok = true;
                        break;
                    }
                    let dv = f / dq;
                    if !dv.is_finite() || dv.norm() > 0.5 * (v - w).norm().max(step) {
                        break;
                    }
                    v -= dv;
                    if dv.norm() <= 1e-15 * v.norm() {
                        ok = true;
                        break;
                    }
                }
                if !ok || (v.im - w.im).abs() > 0.5 {
                    pieces *= 2;
                    continue 'outer;
                }
                let (_, dq, _) = self.q(v);
                let ndw = -2.0 * r / self.ustar / dq;
                if !ndw.is_finite() {
                    pieces *= 2;
                    continue 'outer;
                }
                w = v;
                dw = ndw;
            }
            return Some((w, dw));
        }
        None
    }
}

/// φ(−δ, ε, z) = Σ z^k / (k! Γ(ε − δk)).
///
/// The returned value satisfies `err_bound ≤ tol · max(1, |value|)` when
/// converged. Conjugate arguments give exactly conjugate results.
pub fn wright_phi(p: &WrightParams, z: Complex64, tol: f64) -> Result<SeriesValue> {
    WrightParams::new(p.delta, p.eps)?;
    if !(tol > 0.0) {
        return Err(invalid("tol must be positive"));
    }
    if z.im < 0.0 {
        return wright_phi(p, z.conj(), tol).map(SeriesValue::conj);
    }
    let real = z.im == 0.0;
    if z.norm() == 0.0 {
        return Ok(SeriesValue::exact(Complex64::new(recip_gamma(p.eps), 0.0)));
    }
    let contour = || {
        wright_contour(p, z, tol).map(|(v, err, nodes)| {
            let v = if real { Complex64::new(v.re, 0.0) } else { v };
            SeriesValue { value: v, err_bound: err, terms_used: nodes, status: SeriesStatus::Converged }
        })
    };
    // Once the saddle is well separated the series is bound to cancel.
    let saddle_scale = (p.delta * z.norm()).powf(1.0 / (1.0 - p.delta));
    let mut best: Option<SeriesValue> = None;
    if saddle_scale >= CONTOUR_FIRST {
        best = contour();
        if let Some(b) = best {
            if b.err_bound <= tol * b.value.norm().max(1.0) {
                return Ok(b);
            }
        }
    }
    let raw = wright_series(p, z, tol);
    if raw.trusted(tol) {
        return Ok(raw.to_value());
    }
    if best.is_none() && saddle_scale < CONTOUR_FIRST {
        best = contour();
    }
    if raw.finished && raw.err().is_finite() {
        let cand = raw.to_value();
        if best.is_none_or(|b| cand.err_bound < b.err_bound) {
            best = Some(cand);
        }
    }
    match best {
        Some(b) if b.err_bound <= tol * b.value.norm().max(1.0) => Ok(b),
        Some(b) => Ok(SeriesValue {
            value: Complex64::new(0.0, 0.0),
            err_bound: b.value.norm() + b.err_bound,
            terms_used: b.terms_used,
            status: SeriesStatus::BoundReturned,
        }),
        None => Ok(SeriesValue {
            value: Complex64::new(0.0, 0.0),
            err_bound: raw.abs_sum + raw.tail,
            terms_used: raw.terms,
            status: SeriesStatus::BoundReturned,
        }),
    }
}

/// W(z) = Σ z^n / (Γ(μn + a) Γ(νn + b)), series only.
pub fn gen_wright(p: &GenWrightParams, z: Complex64, tol: f64) -> Result<SeriesValue> {
    let p = GenWrightParams::new(p.mu, p.a, p.nu, p.b)?;
    if !(tol > 0.0) {
        return Err(invalid("tol must be positive"));
    }
    if z.norm() == 0.0 {
        return Ok(SeriesValue::exact(Complex64::new(recip_gamma(p.a) * recip_gamma(p.b), 0.0)));
    }
    let lnz = z.norm().ln();
    let argz = z.arg();
    let mut pow = Complex64::new(1.0, 0.0);
    let raw = sum_certified(
        |n| {
            if n > 0 {
                pow *= z;
            }
            let x1 = p.mu * n as f64 + p.a;
            let x2 = p.nu * n as f64 + p.b;
            let (r1, r2) = (recip_gamma(x1), recip_gamma(x2));
            if r1 == 0.0 || r2 == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let direct = pow * (r1 * r2);
            if direct.is_finite() && pow.norm() > 1e-250 && pow.norm() < 1e250 && r1.is_finite() && r2.is_finite() && r1 * r2 != 0.0 {
                return direct;
            }
            let (l1, s1) = ln_gamma(x1);
            let (l2, s2) = ln_gamma(x2);
            let lm = n as f64 * lnz - l1 - l2;
            Complex64::from_polar(lm.exp(), n as f64 * argz) * (s1 * s2)
        },
        |n| {
            n as f64 * lnz
                + ln_recip_gamma_bound(p.mu * n as f64 + p.a)
                + ln_recip_gamma_bound(p.nu * n as f64 + p.b)
        },
        z.norm().ceil() as usize,
        tol,
        MAX_TERMS,
    );
    if raw.trusted(tol) {
        Ok(raw.to_value())
    } else {
        Ok(SeriesValue {
            value: Complex64::new(0.0, 0.0),
            err_bound: raw.abs_sum + raw.tail,
            terms_used: raw.terms,
            status: SeriesStatus::BoundReturned,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(d: f64, e: f64, z: Complex64) -> SeriesValue {
        wright_phi(&WrightParams::new(d, e).unwrap(), z, 1e-14).unwrap()
    }

    #[test]
    fn value_at_origin() {
        let v = phi(0.3, 1.2, Complex64::new(0.0, 0.0));
        assert_eq!(v.value.re, recip_gamma(1.2));
    }

    #[test]
    fn gaussian_identity_on_both_paths() {
        for &x in &[0.5, 2.0, 5.0, 9.0, 14.0] {
            let v = phi(0.5, 0.5, Complex64::new(-x, 0.0));
            let exact = (-x * x / 4.0).exp() / PI.sqrt();
            assert!(v.converged(), "x={x}");
            assert!((v.value.re - exact).abs() < 1e-14 * exact.max(1e-300) + 1e-15, "x={x}: {} vs {}", v.value.re, exact);
        }
    }

    #[test]
    fn contour_matches_series_where_both_work() {
        let p = WrightParams::new(0.25, 0.75).unwrap();
        let z = Complex64::from_polar(3.0, 0.9 * PI);
        let s = wright_series(&p, z, 1e-14);
        let (c, err, _) = wright_contour(&p, z, 1e-14).unwrap();
        assert!((s.value - c).norm() < 1e-13, "{:?} vs {:?} err {err}", s.value, c);
    }

    #[test]
    fn sharp_saddle_near_delta_one() {
        // 60-digit reference
        let d = 0.9228649222190564;
        let v = phi(d, 1.0 - d, Complex64::new(-1.5, 0.0));
        assert!(v.converged());
        assert!((v.value.re - 0.029855097296177776).abs() < 2e-15);
    }

    #[test]
    fn conjugate_symmetry_is_exact() {
        let p = WrightParams::new(0.2, 0.8).unwrap();
        for z in [Complex64::new(-6.0, 2.0), Complex64::new(0.5, -1.5)] {
            let a = wright_phi(&p, z, 1e-13).unwrap().value;
            let b = wright_phi(&p, z.conj(), 1e-13).unwrap().value;
            assert_eq!(a, b.conj());
        }
    }

    #[test]
    fn rejects_bad_delta() {
        assert!(WrightParams::new(1.0, 0.5).is_err());
        assert!(WrightParams::new(0.0, 0.5).is_err());
        assert!(GenWrightParams::new(-1.0, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn gen_wright_bessel_identity() {
        let p = GenWrightParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        // Σ x^n/(n!)^2 = I_0(2√x); I_0(2) = 2.2795853023360672674
        let v = gen_wright(&p, Complex64::new(1.0, 0.0), 1e-14).unwrap();
        assert!((v.value.re - 2.279_585_302_336_067_3).abs() < 1e-14);
    }

    #[test]
    fn gen_wright_origin() {
        let p = GenWrightParams::new(-0.5, 1.5, 1.5, 2.5).unwrap();
        let v = gen_wright(&p, Complex64::new(0.0, 0.0), 1e-12).unwrap();
        assert_eq!(v.value.re, recip_gamma(1.5) * recip_gamma(2.5));
    }
}
