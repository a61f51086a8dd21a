//! Mittag-Leffler function E_α(z) = Σ z^k / Γ(αk + 1).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{ln_gamma, recip_gamma};
use super::series::{sum_certified, SeriesStatus, SeriesValue};
use crate::error::{invalid, Result};
use crate::quad::{adaptive, QuadOptions};

/// Largest |z| at which the power series is attempted.
pub const SAFE_RADIUS: f64 = 30.0;

/// E_α(z) for 0 < α ≤ 2.
///
/// Uses the power series inside [`SAFE_RADIUS`] when the cancellation guard
/// passes. On the negative real axis with 0 < α < 1 the real integral
/// representation is used instead, which stays accurate for any |z|.
/// Elsewhere an untrusted evaluation is reported as `BoundReturned`.
pub fn mittag_leffler(alpha: f64, z: Complex64, tol: f64) -> Result<SeriesValue> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(invalid(format!("Mittag-Leffler alpha = {alpha} must lie in (0,2]")));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol must be positive"));
    }
    if z.norm() == 0.0 {
        return Ok(SeriesValue::exact(Complex64::new(1.0, 0.0)));
    }
    let negative_real = z.im == 0.0 && z.re < 0.0;
    let mut raw = None;
    if z.norm() <= SAFE_RADIUS {
        let lnz = z.norm().ln();
        let mut pow = Complex64::new(1.0, 0.0);
        let r = sum_certified(
            |k| {
                if k > 0 {
                    pow *= z;
                }
                pow * recip_gamma(alpha * k as f64 + 1.0)
            },
            |k| k as f64 * lnz - ln_gamma(alpha * k as f64 + 1.0).0,
            z.norm().ceil() as usize,
            tol,
            5000,
        );
        if r.trusted(tol) {
            let mut v = r.to_value();
            if z.im == 0.0 {
                v.value.im = 0.0;
            }
            return Ok(v);
        }
        raw = Some(r);
    }
    if negative_real && alpha < 1.0 {
        return Ok(ml_negative_real(alpha, -z.re, tol));
    }
    let err_bound = raw.map_or(f64::INFINITY, |r| r.abs_sum + r.tail);
    Ok(SeriesValue {
        value: Complex64::new(0.0, 0.0),
        err_bound,
        terms_used: raw.map_or(0, |r| r.terms),
        status: SeriesStatus::BoundReturned,
    })
}

/// E_α(−x), 0 < α < 1, x > 0, from
/// E_α(−x) = sin(απ)/(απ) ∫₀^∞ exp(−x^{1/α} ρ^{1/α}) / (ρ² + 2ρ cos απ + 1) dρ.
fn ml_negative_real(alpha: f64, x: f64, tol: f64) -> SeriesValue {
    let big_x = x.powf(1.0 / alpha);
    let c = (alpha * PI).cos();
    let inv = 1.0 / alpha;
    let opts = QuadOptions { rel_tol: 0.1 * tol, abs_tol: 1e-300, max_panels: 2000 };
    let near = adaptive(|r| (-big_x * r.powf(inv)).exp() / (r * r + 2.0 * r * c + 1.0), 0.0, 1.0, &[], opts);
    // ρ = 1/τ on [1, ∞)
    let far = adaptive(
        |t| {
            if t <= 0.0 {
                0.0
            } else {
                (-big_x * t.powf(-inv)).exp() / (1.0 + 2.0 * t * c + t * t)
            }
        },
        0.0,
        1.0,
        &[],
        opts,
    );
    let pref = (alpha * PI).sin() / (alpha * PI);
    let value = pref * (near.value + far.value);
    let err = pref * (near.error + far.error) + 8.0 * f64::EPSILON * value.abs();
    let status = if near.converged && far.converged && err <= tol * value.abs().max(1.0) {
        SeriesStatus::Converged
    } else {
        SeriesStatus::BoundReturned
    };
    SeriesValue {
        value: Complex64::new(value, 0.0),
        err_bound: err,
        terms_used: near.evals + far.evals,
        status,
    }
}
