//! Self-similar solutions u_j = y^b t^{γ_j} Σ c_n t^n, t = x^{m+α₂} y^{−α₁−k},
//! of x^m D^{α₁,β₁}_y u − d y^k D^{α₂,β₂}_x u = 0.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fracops::{power_rule, GeneralEquationSpec};
use crate::specfun::{gen_wright, ln_gamma, recip_gamma, wright_phi, GenWrightParams, SeriesValue, WrightParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityExponents {
    /// Power of x in t, m + α₂.
    pub a: f64,
    /// Power of y in t, −α₁ − k.
    pub y_exp: f64,
    /// γ_j = (α₂ − j)/(α₂ + m), j = 1..p.
    pub gamma: Vec<f64>,
    pub b: f64,
}

impl SimilarityExponents {
    pub fn gamma_j(&self, j: u32) -> f64 {
        self.gamma[j as usize - 1]
    }

    pub fn t(&self, x: f64, y: f64) -> f64 {
        x.powf(self.a) * y.powf(self.y_exp)
    }
}

pub fn similarity_exponents(g: &GeneralEquationSpec, b: f64) -> SimilarityExponents {
    let a = g.m + g.alpha2;
    let gamma = (1..=g.p).map(|j| (g.alpha2 - j as f64) / a).collect();
    SimilarityExponents { a, y_exp: -g.alpha1 - g.k, gamma, b }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable {
    pub j: u32,
    pub c: Vec<f64>,
    pub c0: f64,
}

/// Gamma arguments of the l-th factor: (num₁, num₂, den₁, den₂).
fn factor_args(g: &GeneralEquationSpec, e: &SimilarityExponents, j: u32, l: usize) -> [f64; 4] {
    let arg = e.y_exp * (l as f64 - 1.0 + e.gamma_j(j)) + e.b;
    let al = e.a * l as f64;
    [arg + 1.0, al - j as f64 + 1.0, arg - g.alpha1 + 1.0, al + g.alpha2 - j as f64 + 1.0]
}

fn check_j(g: &GeneralEquationSpec, j: u32) -> Result<()> {
    if j == 0 || j > g.p {
        return Err(invalid(format!("branch index j = {j} must lie in 1..={}", g.p)));
    }
    Ok(())
}

/// c_n^j for n = 0..=N by the one-step recurrence, with the gamma ratios
/// taken in log space and signs tracked separately.
pub fn coefficients(
    g: &GeneralEquationSpec,
    e: &SimilarityExponents,
    j: u32,
    n_max: usize,
    c0: f64,
) -> Result<CoefficientTable> {
    check_j(g, j)?;
    let mut c = Vec::with_capacity(n_max + 1);
    c.push(c0);
    let mut ln_mag = c0.abs().ln();
    let mut sign = c0.signum() * if c0 == 0.0 { 0.0 } else { 1.0 };
    for l in 1..=n_max {
        let [n1, n2, d1, d2] = factor_args(g, e, j, l);
        for arg in [n1, n2] {
            if arg <= 0.0 && arg == arg.trunc() {
                return Err(Error::NumeratorPole { l, arg });
            }
        }
        if recip_gamma(d1) == 0.0 || recip_gamma(d2) == 0.0 {
            sign = 0.0;
        }
        if sign != 0.0 {
            let (l1, s1) = ln_gamma(n1);
            let (l2, s2) = ln_gamma(n2);
            let (l3, s3) = ln_gamma(d1);
            let (l4, s4) = ln_gamma(d2);
            ln_mag += l1 + l2 - l3 - l4;
            sign *= s1 * s2 * s3 * s4 * g.d;
        }
        c.push(if sign == 0.0 { 0.0 } else { sign * ln_mag.exp() });
    }
    Ok(CoefficientTable { j, c, c0 })
}

/// c_n^j as the direct product of gamma values (no logs), for cross-checks.
pub fn coefficient_product(g: &GeneralEquationSpec, e: &SimilarityExponents, j: u32, n: usize, c0: f64) -> Result<f64> {
    check_j(g, j)?;
    let mut v = c0;
    for l in 1..=n {
        let [n1, n2, d1, d2] = factor_args(g, e, j, l);
        let num = recip_gamma(n1) * recip_gamma(n2);
        if num == 0.0 {
            return Err(Error::NumeratorPole { l, arg: if recip_gamma(n1) == 0.0 { n1 } else { n2 } });
        }
        v *= g.d * recip_gamma(d1) * recip_gamma(d2) / num;
    }
    Ok(v)
}

/// Relative size of the last retained term that the validated radius allows.
const TAIL_TARGET: f64 = 1e-13;

impl CoefficientTable {
    /// Largest |t| at which the truncated series is trusted: the last term
    /// stays below 1e-13·|c₀| and the observed ratios over the upper half of
    /// the table are at most ½.
    pub fn validated_radius(&self) -> f64 {
        let n = self.c.len() - 1;
        if n == 0 {
            return 0.0;
        }
        let last = self.c[n].abs();
        let mut r = if last == 0.0 { f64::INFINITY } else { (TAIL_TARGET * self.c0.abs() / last).powf(1.0 / n as f64) };
        for i in (n / 2).max(1)..=n {
            let (p, q) = (self.c[i - 1].abs(), self.c[i].abs());
            if q > 0.0 && p > 0.0 {
                r = r.min(0.5 * p / q);
            }
        }
        r
    }
}

/// u_j(x, y) = y^b t^{γ_j} Σ c_n t^n with a last-term tail estimate.
pub fn eval_selfsimilar(
    g: &GeneralEquationSpec,
    e: &SimilarityExponents,
    table: &CoefficientTable,
    x: f64,
    y: f64,
) -> Result<SeriesValue> {
    let _ = g;
    if !(x > 0.0 && y > 0.0) {
        return Err(invalid("self-similar series needs x > 0 and y > 0"));
    }
    let t = e.t(x, y);
    let limit = table.validated_radius();
    if t > limit {
        return Err(Error::OutsideRadius { t, limit });
    }
    let mut sum = 0.0;
    let mut comp = crate::specfun::CompensatedSum::new();
    let mut p = 1.0;
    let mut last = 0.0;
    for c in &table.c {
        last = c * p;
        comp.add(Complex64::new(last, 0.0));
        sum += last.abs();
        p *= t;
    }
    let pre = y.powf(e.b) * t.powf(e.gamma_j(table.j));
    let value = pre * comp.value().re;
    let err = pre.abs() * (last.abs() + 4.0 * f64::EPSILON * sum);
    Ok(SeriesValue {
        value: Complex64::new(value, 0.0),
        err_bound: err,
        terms_used: table.c.len(),
        status: crate::specfun::SeriesStatus::Converged,
    })
}

/// Seed that turns the m = k = 0 series into a generalized Wright function.
pub fn wright_seed(g: &GeneralEquationSpec, j: u32, b: f64) -> f64 {
    recip_gamma(-g.alpha1 * (1.0 - j as f64 / g.alpha2) + b + 1.0) * recip_gamma(g.alpha2 - j as f64 + 1.0)
}

/// u_j = y^b t^{1−j/α₂} W_{(−α₁, −α₁+α₁j/α₂+b+1),(α₂, α₂−j+1)}(d t) for m = k = 0.
pub fn eval_gen_wright_case(g: &GeneralEquationSpec, j: u32, b: f64, x: f64, y: f64, tol: f64) -> Result<SeriesValue> {
    check_j(g, j)?;
    if g.m != 0.0 || g.k != 0.0 {
        return Err(invalid("the generalized Wright form needs m = k = 0"));
    }
    let (a1, a2) = (g.alpha1, g.alpha2);
    let p = GenWrightParams::new(-a1, -a1 + a1 * j as f64 / a2 + b + 1.0, a2, a2 - j as f64 + 1.0)?;
    let t = x.powf(a2) * y.powf(-a1);
    let w = gen_wright(&p, Complex64::new(g.d * t, 0.0), tol)?;
    let pre = y.powf(b) * t.powf(1.0 - j as f64 / a2);
    Ok(SeriesValue { value: w.value * pre, err_bound: w.err_bound * pre.abs(), ..w })
}

/// u = y^b φ(−α/p, b+1, c x y^{−α/p}) with c^p = d.
pub fn eval_wright_case(p_order: u32, alpha: f64, b: f64, c_root: Complex64, x: f64, y: f64, tol: f64) -> Result<SeriesValue> {
    if p_order == 0 {
        return Err(invalid("p must be at least 1"));
    }
    if !(y > 0.0) {
        return Err(invalid("Wright-case solution needs y > 0"));
    }
    let d = c_root.powu(p_order);
    if (d.im.abs() > 1e-12) || ((d.re.abs() - 1.0).abs() > 1e-12) {
        return Err(invalid(format!("c^p = {d} is not ±1")));
    }
    let delta = alpha / p_order as f64;
    let wp = WrightParams::new(delta, b + 1.0)?;
    let v = wright_phi(&wp, c_root * x * y.powf(-delta), tol)?;
    let pre = y.powf(b);
    Ok(SeriesValue { value: v.value * pre, err_bound: v.err_bound * pre, ..v })
}

/// Term-by-term residual of the truncated series against the general equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TermwiseResidual {
    /// x^m D^{α₁,β₁}_y u_N.
    pub time_term: f64,
    /// d y^k D^{α₂,β₂}_x u_N.
    pub space_term: f64,
    /// (time − space) / max(1, |time|).
    pub normalized: f64,
}

/// Applies both Hilfer derivatives to every retained term c_n x^{a(n+γ)} y^{s(n+γ)+b}
/// through the exact power rule; the result is β-independent.
pub fn termwise_residual(
    g: &GeneralEquationSpec,
    e: &SimilarityExponents,
    table: &CoefficientTable,
    x: f64,
    y: f64,
) -> Result<TermwiseResidual> {
    if !(x > 0.0 && y > 0.0) {
        return Err(invalid("residual needs x > 0 and y > 0"));
    }
    let gj = e.gamma_j(table.j);
    let mut lhs = crate::specfun::CompensatedSum::new();
    let mut rhs = crate::specfun::CompensatedSum::new();
    for (n, c) in table.c.iter().enumerate() {
        let px = e.a * (n as f64 + gj);
        let py = e.y_exp * (n as f64 + gj) + e.b;
        let base = c * x.powf(px) * y.powf(py);
        let dy = power_rule(py, g.alpha1) * x.powf(g.m) * y.powf(-g.alpha1);
        let dx = power_rule(px, g.alpha2) * g.d * y.powf(g.k) * x.powf(-g.alpha2);
        lhs.add(Complex64::new(base * dy, 0.0));
        rhs.add(Complex64::new(base * dx, 0.0));
    }
    let (l, r) = (lhs.value().re, rhs.value().re);
    Ok(TermwiseResidual { time_term: l, space_term: r, normalized: (l - r) / l.abs().max(1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic() -> GeneralEquationSpec {
        GeneralEquationSpec::new(0.5, 0.25, 0.5, 0.5, 2.5, 0.5, 1.0).unwrap()
    }

    #[test]
    fn exponents_by_substitution() {
        let g = GeneralEquationSpec::new(1.0, 0.0, 0.5, 0.5, 1.5, 0.5, 1.0).unwrap();
        let e = similarity_exponents(&g, 0.0);
        assert_eq!(e.a, 2.5);
        assert_eq!(e.y_exp, -0.5);
        assert_eq!(e.gamma.len(), 2);
        assert!((e.gamma[0] - 0.2).abs() < 1e-15 && (e.gamma[1] + 0.2).abs() < 1e-15);
        let g = GeneralEquationSpec::new(0.0, 0.0, 0.7, 0.5, 3.0, 0.5, 1.0).unwrap();
        let e = similarity_exponents(&g, 0.0);
        assert_eq!(e.gamma_j(3), 0.0);
    }

    #[test]
    fn recurrence_matches_product() {
        let g = generic();
        let e = similarity_exponents(&g, 0.0);
        let t = coefficients(&g, &e, 1, 12, 1.0).unwrap();
        assert_eq!(t.c[0], 1.0);
        for n in 1..=12 {
            let p = coefficient_product(&g, &e, 1, n, 1.0).unwrap();
            assert!((t.c[n] - p).abs() <= 1e-12 * p.abs(), "n={n}: {} vs {p}", t.c[n]);
        }
    }

    #[test]
    fn numerator_pole_is_reported() {
        // b chosen so that s(γ₁) + b + 1 = 0 at l = 1
        let g = generic();
        let e0 = similarity_exponents(&g, 0.0);
        let b = -1.0 - e0.y_exp * e0.gamma_j(1);
        let e = similarity_exponents(&g, b);
        match coefficients(&g, &e, 1, 3, 1.0) {
            Err(Error::NumeratorPole { l, .. }) => assert_eq!(l, 1),
            other => panic!("expected a pole, got {other:?}"),
        }
    }

    #[test]
    fn residual_shrinks_with_truncation() {
        let g = generic();
        let e = similarity_exponents(&g, 0.0);
        let mut prev = f64::INFINITY;
        for n in [2, 4, 8] {
            let t = coefficients(&g, &e, 1, n, 1.0).unwrap();
            let r = termwise_residual(&g, &e, &t, 0.7, 1.3).unwrap().normalized.abs();
            assert!(r < prev);
            prev = r;
        }
        assert!(prev < 1e-10);
    }

    #[test]
    fn wright_case_at_origin() {
        let v = eval_wright_case(4, 0.7, 0.3, Complex64::new(-1.0, 0.0), 0.0, 2.0, 1e-14).unwrap();
        assert!((v.value.re - 2f64.powf(0.3) * recip_gamma(1.3)).abs() < 1e-15);
    }

    #[test]
    fn refuses_beyond_radius() {
        let g = generic();
        let e = similarity_exponents(&g, 0.0);
        let t = coefficients(&g, &e, 1, 4, 1.0).unwrap();
        let r = t.validated_radius();
        let x = (2.0 * r).powf(1.0 / e.a);
        assert!(matches!(eval_selfsimilar(&g, &e, &t, x, 1.0), Err(Error::OutsideRadius { .. })));
    }
}
