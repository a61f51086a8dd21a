//! Fundamental solution Γ_b of D^{α,β}_y u − (−1)^{n−1} ∂^{2n}_x u = 0:
//!
//! Γ_b(x, y) = sign · (y^b / 2n) Σ_k (−λ_k) φ(−α/2n, b+1, −λ_k |x| y^{−α/2n}).
//!
//! The printed combination (sign = +1) integrates to a negative multiple of
//! y^{b+α/2n}; `sign` is fixed at construction by a quadrature so that the
//! kernel family is a positive delta family.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fracops::EquationSpec;
use crate::quad::{adaptive, QuadOptions};
use crate::specfun::{recip_gamma, wright_phi, CompensatedSum, DecayBound, WrightParams};

/// The n roots λ_k = e^{(n−1−2k)iπ/(2n)} of λ^{2n} = (−1)^{n−1} with Re λ > 0.
pub fn roots(n: u32) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let ang = (n as f64 - 1.0 - 2.0 * k as f64) * PI / (2.0 * n as f64);
            Complex64::new(ang.cos(), ang.sin())
        })
        .collect()
}

/// Outcome of the sign calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    /// ∫ of the printed kernel with b = −α/2n at y = 1 (closed form ±1).
    pub printed_integral: f64,
    pub sign: f64,
    /// Sign relating the printed n = 1, α = 1, b = −1/2 kernel to the heat kernel.
    pub anchor_sign: f64,
}

/// A kernel value with its absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: f64,
    pub err_bound: f64,
    /// Imaginary part of the root sum before it was discarded.
    pub imag: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSpec {
    pub eq: EquationSpec,
    pub b: f64,
    pub sign: f64,
    pub bound: DecayBound,
    pub calibration: Calibration,
}

/// Tolerance for the Wright evaluations inside the calibration quadrature.
const CAL_TOL: f64 = 1e-13;

/// Printed root sum (1/2n) Σ (−λ_k)(−λ_k)^j φ(−δ, b+1−jδ, −λ_k t) for t ≥ 0,
/// the j-th t-derivative of the printed profile.
fn printed_profile(n: u32, delta: f64, b: f64, j: u32, t: f64, tol: f64) -> Result<(Complex64, f64, bool)> {
    let p = WrightParams::new(delta, b + 1.0 - j as f64 * delta)?;
    let mut acc = CompensatedSum::new();
    let mut err = 0.0;
    let mut ok = true;
    for lam in roots(n) {
        let v = wright_phi(&p, -lam * t, tol)?;
        let pre = -lam * (-lam).powu(j);
        acc.add(pre * v.value);
        err += v.err_bound;
        ok &= v.converged();
    }
    let scale = 1.0 / (2.0 * n as f64);
    Ok((acc.value() * scale, err * scale, ok))
}

/// ∫_{−∞}^{∞} of the printed kernel with b = −δ at y = 1.
fn printed_unit_integral(n: u32, alpha: f64) -> Result<f64> {
    let delta = alpha / (2.0 * n as f64);
    let b = -delta;
    let bound = DecayBound::calibrate(n, alpha, b)?;
    // The envelope bound drops below 1e-16 well inside this window.
    let mut t_max = bound.t0;
    while bound.c * bound.tail_integral(t_max) > 1e-16 {
        t_max *= 1.25;
    }
    let mut failure = None;
    let r = adaptive(
        |t| match printed_profile(n, delta, b, 0, t, CAL_TOL) {
            Ok((v, _, _)) => v.re,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        t_max,
        &[1.0, 4.0, 16.0],
        QuadOptions::new(1e-11, 1e-15),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if !r.converged {
        return Err(Error::Quadrature { estimate: 2.0 * r.value, error: 2.0 * r.error });
    }
    Ok(2.0 * r.value)
}

/// Sign of the printed n = 1, α = 1, b = −1/2 kernel relative to the heat
/// kernel e^{−x²/4y}/(2√(πy)), read off at x = 0.7, y = 1.
fn heat_anchor_sign() -> Result<f64> {
    let (v, _, _) = printed_profile(1, 0.5, -0.5, 0, 0.7, 1e-14)?;
    let heat = (-0.49f64 / 4.0).exp() / (2.0 * PI.sqrt());
    let ratio = v.re / heat;
    if (ratio.abs() - 1.0).abs() > 1e-12 {
        return Err(Error::Calibration(format!("heat anchor ratio {ratio} is not ±1")));
    }
    Ok(ratio.signum())
}

impl KernelSpec {
    pub fn new(eq: EquationSpec, b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(invalid("kernel exponent must be finite"));
        }
        let bound = DecayBound::calibrate(eq.n, eq.alpha, b)?;
        let printed_integral = printed_unit_integral(eq.n, eq.alpha)?;
        if (printed_integral.abs() - 1.0).abs() > 1e-8 {
            return Err(Error::Calibration(format!(
                "unit integral of the printed kernel is {printed_integral}, expected ±1"
            )));
        }
        let sign = printed_integral.signum();
        let anchor_sign = heat_anchor_sign()?;
        // Both rules must agree: a positive delta family and a positive heat kernel.
        if sign != anchor_sign {
            return Err(Error::Calibration(format!(
                "calibrated sign {sign} disagrees with the heat-kernel anchor {anchor_sign}"
            )));
        }
        Ok(KernelSpec { eq, b, sign, bound, calibration: Calibration { printed_integral, sign, anchor_sign } })
    }

    pub fn delta(&self) -> f64 {
        self.eq.delta()
    }

    /// ∂^order_x Γ_b at (dx, dy); order 0 is the kernel itself.
    ///
    /// For dx < 0 the evenness of Γ_b gives (−1)^order times the value at |dx|.
    pub fn eval_dx(&self, order: u32, dx: f64, dy: f64, tol: f64) -> Result<KernelValue> {
        if !(dy > 0.0) {
            return Err(invalid(format!("kernel needs dy > 0, got {dy}")));
        }
        if !(tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        let delta = self.delta();
        let t = dx.abs() * dy.powf(-delta);
        let (v, mut err, ok) = printed_profile(self.eq.n, delta, self.b, order, t, tol)?;
        if !ok && t >= self.bound.t0 && order == 0 {
            err = err.min(self.bound.eval(t) / 2.0);
        }
        let scale = dy.powf(self.b - order as f64 * delta);
        let parity = if dx < 0.0 && order % 2 == 1 { -1.0 } else { 1.0 };
        let f = self.sign * parity * scale;
        debug_assert!(v.im.abs() <= 1e-10 * v.re.abs() + 1e-300 || !ok);
        Ok(KernelValue { value: f * v.re, err_bound: scale * err, imag: scale * v.im })
    }

    /// Jump ∂^s Γ_b(0⁺) − ∂^s Γ_b(0⁻) in closed form.
    ///
    /// Nonzero only when 2n divides s+1; the magnitude is
    /// dy^{b−αs/2n} / Γ(b + 1 − αs/2n), and the sign carries the calibration.
    pub fn jump_closed_form(&self, s: u32, dy: f64) -> f64 {
        let nn = 2 * self.eq.n;
        if (s + 1) % nn != 0 {
            return 0.0;
        }
        let r = (s + 1) / nn;
        let printed = if ((self.eq.n - 1) * r) % 2 == 0 { 1.0 } else { -1.0 };
        let delta = self.delta();
        self.sign * printed * dy.powf(self.b - s as f64 * delta) * recip_gamma(self.b + 1.0 - s as f64 * delta)
    }

    /// ∂^s Γ_b(0⁺) − ∂^s Γ_b(0⁻) from one-sided values at ε = h, h/2, …,
    /// extrapolated to ε = 0 by Neville's scheme (the one-sided derivative is
    /// a power series in ε).
    pub fn extrapolated_jump(&self, s: u32, dy: f64, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(invalid("extrapolation step must be positive"));
        }
        let mut eps = Vec::new();
        let mut table: Vec<f64> = Vec::new();
        for i in 0..8 {
            let e = h / f64::from(1u32 << i);
            let plus = self.eval_dx(s, e, dy, 1e-13)?.value;
            let minus = self.eval_dx(s, -e, dy, 1e-13)?.value;
            eps.push(e);
            table.push(plus - minus);
        }
        let n = table.len();
        for m in 1..n {
            for i in (m..n).rev() {
                let (a, b) = (eps[i - m], eps[i]);
                table[i] = (a * table[i] - b * table[i - 1]) / (a - b);
            }
        }
        Ok(table[n - 1])
    }

    /// Bound on ∫_{|x| > R} |Γ_b(x, dy)| dx for the given radius R.
    pub fn tail_mass(&self, radius: f64, dy: f64) -> f64 {
        let delta = self.delta();
        let t = (radius * dy.powf(-delta)).max(self.bound.t0);
        dy.powf(self.b + delta) * self.bound.c * self.bound.tail_integral(t)
    }

    /// R with ∫_{|x|>R} |Γ_b(x, dy)| dx ≤ tail_tol, never inside the calibration point.
    pub fn truncation_radius(&self, dy: f64, tail_tol: f64) -> Result<f64> {
        if !(tail_tol > 0.0) {
            return Err(invalid("tail_tol must be positive"));
        }
        if !(dy > 0.0) {
            return Err(invalid("truncation radius needs dy > 0"));
        }
        let t = self.truncation_t(tail_tol / dy.powf(self.b + self.delta()));
        Ok(t * dy.powf(self.delta()))
    }

    /// Smallest t ≥ T₀ (to bisection accuracy) with C ∫_t^∞ envelope ≤ target.
    pub fn truncation_t(&self, target: f64) -> f64 {
        let mass = |t: f64| self.bound.c * self.bound.tail_integral(t);
        let mut lo = self.bound.t0;
        if mass(lo) <= target {
            return lo;
        }
        let mut hi = 2.0 * lo;
        while mass(hi) > target {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if mass(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

pub fn gamma_b(ks: &KernelSpec, dx: f64, dy: f64, tol: f64) -> Result<KernelValue> {
    ks.eval_dx(0, dx, dy, tol)
}

pub fn gamma_b_dx(ks: &KernelSpec, order: u32, dx: f64, dy: f64, tol: f64) -> Result<KernelValue> {
    if order == 0 {
        return Err(invalid("derivative order must be at least 1"));
    }
    if dx == 0.0 {
        return Err(invalid("one-sided derivative needs dx != 0"));
    }
    ks.eval_dx(order, dx, dy, tol)
}

pub fn jump_closed_form(ks: &KernelSpec, s: u32, dy: f64) -> f64 {
    ks.jump_closed_form(s, dy)
}

pub fn truncation_radius(ks: &KernelSpec, dy: f64, tail_tol: f64) -> Result<f64> {
    ks.truncation_radius(dy, tail_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: u32, alpha: f64, beta: f64, b: f64) -> KernelSpec {
        KernelSpec::new(EquationSpec::new(n, alpha, beta).unwrap(), b).unwrap()
    }

    #[test]
    fn roots_are_conjugate_closed() {
        for n in 1..6 {
            let r = roots(n);
            assert_eq!(r.len(), n as usize);
            let target = if n % 2 == 1 { 1.0 } else { -1.0 };
            for (k, l) in r.iter().enumerate() {
                assert!(l.re > 0.0);
                assert!((l.powu(2 * n) - target).norm() < 1e-14);
                assert!((r[n as usize - 1 - k] - l.conj()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn calibrated_sign_is_negative_of_printed() {
        for &(n, a) in &[(1, 1.0), (2, 0.8), (3, 1.5)] {
            let ks = spec(n, a, 0.5, -0.1);
            assert_eq!(ks.sign, -1.0);
            assert!((ks.calibration.printed_integral + 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn heat_kernel_anchor() {
        let ks = spec(1, 1.0, 1.0, -0.5);
        for &(x, y) in &[(0.0, 1.0), (0.7, 0.3), (-2.0, 1.7)] {
            let v = gamma_b(&ks, x, y, 1e-14).unwrap();
            let heat = (-x * x / (4.0 * y)).exp() / (2.0 * (PI * y).sqrt());
            assert!((v.value - heat).abs() < 1e-14 * heat.max(1.0));
        }
    }

    #[test]
    fn even_and_odd() {
        let ks = spec(2, 0.9, 0.5, -0.2);
        let a = gamma_b(&ks, 0.7, 0.9, 1e-13).unwrap().value;
        let b = gamma_b(&ks, -0.7, 0.9, 1e-13).unwrap().value;
        assert_eq!(a, b);
        let a = gamma_b_dx(&ks, 1, 0.7, 0.9, 1e-13).unwrap().value;
        let b = gamma_b_dx(&ks, 1, -0.7, 0.9, 1e-13).unwrap().value;
        assert_eq!(a, -b);
    }

    #[test]
    fn jump_selector() {
        let ks = spec(2, 0.8, 0.5, -0.2);
        assert_eq!(ks.jump_closed_form(0, 1.0), 0.0);
        assert_eq!(ks.jump_closed_form(1, 1.0), 0.0);
        assert_eq!(ks.jump_closed_form(2, 1.0), 0.0);
        // printed form (−1)^{n−1}/Γ(0.2), flipped by the calibration
        let want = recip_gamma(0.2);
        assert!((ks.jump_closed_form(3, 1.0) - want).abs() < 1e-15);
    }

    #[test]
    fn truncation_radius_monotone_and_scaling() {
        let ks = spec(2, 0.8, 0.5, -0.2);
        let r1 = ks.truncation_radius(1.0, 1e-8).unwrap();
        let r2 = ks.truncation_radius(1.0, 1e-12).unwrap();
        assert!(r2 > r1);
        let mass = ks.tail_mass(r1, 1.0);
        assert!(mass <= 1e-8 * (1.0 + 1e-9));
    }
}
