//! Envelope |φ(−δ, b+1, −λt)| ≤ C t^{−q(b+½)} exp(−σ t^q), q = 2n/(2n−α).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::wright::{wright_phi, WrightParams};
use crate::error::{invalid, Result};
use crate::quad::{adaptive, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayBound {
    pub n: u32,
    pub alpha: f64,
    pub sigma: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub exponent_b: f64,
    /// Calibration point T₀.
    pub t0: f64,
}

/// σ = (1 − α/2n) (α/2n)^{α/(2n−α)} cos((n−1)π/(2n−α)).
pub fn decay_sigma(n: u32, alpha: f64) -> f64 {
    let nn = 2.0 * n as f64;
    let r = alpha / nn;
    (1.0 - r) * r.powf(alpha / (nn - alpha)) * ((n as f64 - 1.0) * PI / (nn - alpha)).cos()
}

fn check(n: u32, alpha: f64) -> Result<()> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if !(alpha > 0.0 && alpha < 2.0 * n as f64) {
        return Err(invalid(format!("decay bound needs 0 < alpha < 2n, got alpha = {alpha}, n = {n}")));
    }
    Ok(())
}

impl DecayBound {
    /// Calibrates C at T₀ = (ln 10¹² / σ)^{1/q} / 2 against every root and inflates by 2.
    pub fn calibrate(n: u32, alpha: f64, b: f64) -> Result<Self> {
        check(n, alpha)?;
        let sigma = decay_sigma(n, alpha);
        let q = Self::q_of(n, alpha);
        let t0 = (1e12f64.ln() / sigma).powf(1.0 / q) / 2.0;
        let p = WrightParams::new(alpha / (2.0 * n as f64), b + 1.0)?;
        let mut cmax: f64 = 0.0;
        for lam in crate::kernel::roots(n) {
            let v = wright_phi(&p, -lam * t0, 1e-14)?;
            cmax = cmax.max(v.value.norm() + v.err_bound);
        }
        let partial = DecayBound { n, alpha, sigma, c: 1.0, exponent_b: b, t0 };
        let c = (2.0 * cmax / partial.envelope(t0)).max(f64::MIN_POSITIVE);
        Ok(DecayBound { c, ..partial })
    }

    fn q_of(n: u32, alpha: f64) -> f64 {
        let nn = 2.0 * n as f64;
        nn / (nn - alpha)
    }

    pub fn q(&self) -> f64 {
        Self::q_of(self.n, self.alpha)
    }

    /// Power of t in the envelope, −q(b + ½).
    pub fn power(&self) -> f64 {
        -self.q() * (self.exponent_b + 0.5)
    }

    /// t^{−q(b+½)} exp(−σ t^q), without C.
    pub fn envelope(&self, t: f64) -> f64 {
        t.powf(self.power()) * (-self.sigma * t.powf(self.q())).exp()
    }

    /// The bound C t^{−q(b+½)} exp(−σ t^q).
    pub fn eval(&self, t: f64) -> f64 {
        self.c * self.envelope(t)
    }

    /// Upper bound on ∫_T^∞ envelope(t) dt (without C).
    pub fn tail_integral(&self, t: f64) -> f64 {
        let q = self.q();
        let a = self.power();
        let e = a - q + 1.0;
        let closed = |t: f64| t.powf(e) * (-self.sigma * t.powf(q)).exp() / (self.sigma * q);
        if e <= 0.0 {
            return closed(t);
        }
        // t^e e^{−σt^q/2} decreases once t^q ≥ 2e/(σq)
        let t_star = (2.0 * e / (self.sigma * q)).powf(1.0 / q);
        if t >= t_star {
            return 2.0 * closed(t);
        }
        let head = adaptive(|s| self.envelope(s), t, t_star, &[], QuadOptions::new(1e-10, 0.0));
        head.value + head.error + 2.0 * closed(t_star)
    }
}

/// C t^{−q(b+½)} exp(−σ t^q) with C calibrated for (n, α, b).
pub fn decay_bound(n: u32, alpha: f64, b: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid("decay bound needs t > 0"));
    }
    Ok(DecayBound::calibrate(n, alpha, b)?.eval(t))
}

/// Magnitude of φ(−δ, b+1, −λt) maximized over the roots, for tests.
pub fn max_root_phi(n: u32, alpha: f64, b: f64, t: f64) -> Result<f64> {
    let p = WrightParams::new(alpha / (2.0 * n as f64), b + 1.0)?;
    let mut m: f64 = 0.0;
    for lam in crate::kernel::roots(n) {
        let v = wright_phi(&p, -lam * Complex64::new(t, 0.0), 1e-14)?;
        m = m.max(v.value.norm());
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_closed_form() {
        assert!((decay_sigma(1, 1.0) - 0.25).abs() < 1e-16);
        let expected = 0.75 * 0.25f64.powf(1.0 / 3.0) * 0.5;
        assert!((decay_sigma(2, 1.0) - expected).abs() < 1e-16);
    }

    #[test]
    fn rejects_alpha_at_or_above_2n() {
        assert!(decay_bound(1, 2.0, 0.0, 1.0).is_err());
        assert!(DecayBound::calibrate(2, 4.5, 0.0).is_err());
    }

    #[test]
    fn bound_decreases_for_large_t() {
        let a = decay_bound(2, 0.8, -0.2, 5.0).unwrap();
        let b = decay_bound(2, 0.8, -0.2, 10.0).unwrap();
        assert!(b < a);
    }

    #[test]
    fn tail_integral_dominates_quadrature() {
        let db = DecayBound::calibrate(2, 0.8, 1.5).unwrap();
        for &t in &[0.5, 3.0, 12.0] {
            let q = adaptive(|s| db.envelope(s), t, t + 200.0, &[], QuadOptions::default());
            assert!(db.tail_integral(t) >= q.value, "t={t}");
        }
    }
}
