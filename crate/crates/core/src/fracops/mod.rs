//! Numerical fractional operators used as independent oracles: the
//! Riemann–Liouville integral, the Hilfer derivative, high-order spatial
//! finite differences and the residual of the target equation.

mod fd;
mod spec;

pub use fd::{central_weights, fd_weights, x_derivative};
pub use spec::{EquationSpec, GeneralEquationSpec, HilferOrder};

use crate::error::{invalid, Error, Result};
use crate::quad::{adaptive_weighted, weighted_on_partition, QuadOptions, WPanel, Weights};
use crate::specfun::{gamma, recip_gamma};

/// Exact action of the Hilfer derivative on a power: Γ(c+1)/Γ(c+1−α).
///
/// Independent of β whenever the intermediate integrals converge (c > −1).
pub fn power_rule(c: f64, alpha: f64) -> f64 {
    gamma(c + 1.0) * recip_gamma(c + 1.0 - alpha)
}

/// Value of a quadrature-based operator with its error estimate.
#[derive(Debug, Clone)]
pub struct RlIntegral {
    pub value: f64,
    pub error: f64,
    pub partition: Vec<WPanel>,
}

fn rl_weights(mu: f64, lead: f64) -> Result<Weights> {
    if !(lead > -1.0) {
        return Err(invalid(format!("declared exponent {lead} must exceed -1")));
    }
    Ok(Weights { gamma: lead, lambda: mu - 1.0 })
}

/// (1/Γ(μ)) ∫₀^y (y−z)^{μ−1} f(z) dz by adaptive product integration.
///
/// `lead` is the caller-declared power of f at z = 0 (f(z) ~ z^lead), which is
/// absorbed into the Gauss–Jacobi weight of the first panel.
pub fn rl_integral(f: &dyn Fn(f64) -> f64, mu: f64, y: f64, lead: f64) -> Result<RlIntegral> {
    rl_integral_opts(f, mu, y, lead, QuadOptions::new(1e-12, 1e-300))
}

pub fn rl_integral_opts(
    f: &dyn Fn(f64) -> f64,
    mu: f64,
    y: f64,
    lead: f64,
    opts: QuadOptions,
) -> Result<RlIntegral> {
    if !(mu > 0.0) {
        return Err(invalid(format!("integral order mu = {mu} must be positive")));
    }
    if !(y > 0.0) {
        return Err(invalid("rl_integral needs y > 0"));
    }
    let w = rl_weights(mu, lead)?;
    let r = adaptive_weighted(|u, _| f(y * u), w, opts);
    let scale = y.powf(mu) * recip_gamma(mu);
    let value = scale * r.value;
    let error = scale.abs() * r.error;
    if !r.converged && error > 1e-6 * value.abs().max(1e-300) {
        return Err(Error::Quadrature { estimate: value, error });
    }
    Ok(RlIntegral { value, error, partition: r.partition })
}

/// I^μ f(y) on a fixed partition (for smooth finite differences).
pub fn rl_integral_on(f: &dyn Fn(f64) -> f64, mu: f64, y: f64, lead: f64, partition: &[WPanel]) -> Result<f64> {
    let w = rl_weights(mu, lead)?;
    Ok(y.powf(mu) * recip_gamma(mu) * weighted_on_partition(|u, _| f(y * u), w, partition))
}

/// Declared behaviour of a function near y = 0 for the Hilfer oracle.
#[derive(Debug, Clone, Copy)]
pub struct Singularity {
    /// f(z) ~ z^inner near 0.
    pub inner: f64,
    /// Leading power of d^s/dz^s I^{μ₁} f near 0; derived from `inner` when `None`.
    pub outer: Option<f64>,
}

impl Singularity {
    pub fn power(inner: f64) -> Self {
        Singularity { inner, outer: None }
    }
}

/// Tolerances of the composed Hilfer oracle.
#[derive(Debug, Clone, Copy)]
pub struct HilferOptions {
    pub inner: QuadOptions,
    pub outer: QuadOptions,
}

impl Default for HilferOptions {
    fn default() -> Self {
        HilferOptions {
            inner: QuadOptions::new(1e-11, 1e-300),
            outer: QuadOptions { rel_tol: 1e-7, abs_tol: 1e-300, max_panels: 200 },
        }
    }
}

/// s-th derivative of `g` at `z` by the minimal central stencil with step
/// h = z ε^{1/(s+2)}, which balances O(h²) truncation against ε/h^s rounding.
pub fn fd_y(g: &dyn Fn(f64) -> f64, s: u32, z: f64) -> f64 {
    let h = z * f64::EPSILON.powf(1.0 / (s as f64 + 2.0));
    let mut acc = 0.0;
    for (off, c) in central_weights(s) {
        acc += c * g(z + off as f64 * h);
    }
    acc / h.powi(s as i32)
}

/// d^k/dy^k I^μ f(y), the regularized k-th trace operator; μ = 0 skips the
/// integral. The integral's partition is adapted at y and reused for the
/// finite-difference neighbours.
pub fn derivative_of_integral(f: &dyn Fn(f64) -> f64, mu: f64, k: u32, y: f64, lead: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(invalid("derivative_of_integral needs y > 0"));
    }
    if mu == 0.0 {
        return Ok(if k == 0 { f(y) } else { fd_y(f, k, y) });
    }
    let r = rl_integral_opts(f, mu, y, lead, QuadOptions::new(1e-12, 1e-300))?;
    if k == 0 {
        return Ok(r.value);
    }
    let g = |t: f64| rl_integral_on(f, mu, t, lead, &r.partition).unwrap_or(f64::NAN);
    Ok(fd_y(&g, k, y))
}

/// Hilfer derivative D^{α,β} f(y) = I^{β(s−α)} d^s/dy^s I^{(1−β)(s−α)} f(y).
///
/// The inner integral is adapted once at z = y and its partition is reused at
/// every smaller z, which keeps the finite differences free of quadrature
/// noise (the partition in the scaled variable does not move with z).
pub fn hilfer_derivative(f: &dyn Fn(f64) -> f64, order: HilferOrder, y: f64, sing: Singularity) -> Result<f64> {
    hilfer_derivative_opts(f, order, y, sing, HilferOptions::default())
}

pub fn hilfer_derivative_opts(
    f: &dyn Fn(f64) -> f64,
    order: HilferOrder,
    y: f64,
    sing: Singularity,
    opts: HilferOptions,
) -> Result<f64> {
    if !(y > 0.0) {
        return Err(invalid("hilfer_derivative needs y > 0"));
    }
    let (mu1, mu2, s) = (order.mu_inner(), order.mu_outer(), order.s);
    let inner: Box<dyn Fn(f64) -> f64 + '_> = if mu1 == 0.0 {
        Box::new(|z| fd_y(f, s, z))
    } else {
        let part = rl_integral_opts(f, mu1, y, sing.inner, opts.inner)?.partition;
        let w = rl_weights(mu1, sing.inner)?;
        Box::new(move |z| {
            let g = |t: f64| t.powf(mu1) * recip_gamma(mu1) * weighted_on_partition(|u, _| f(t * u), w, &part);
            fd_y(&g, s, z)
        })
    };
    if mu2 == 0.0 {
        return Ok(inner(y));
    }
    let mut outer = sing.outer.unwrap_or(sing.inner + mu1 - s as f64);
    if outer <= -1.0 {
        outer = 0.0;
    }
    let w = rl_weights(mu2, outer)?;
    let r = adaptive_weighted(|u, _| inner(y * u), w, opts.outer);
    let scale = y.powf(mu2) * recip_gamma(mu2);
    let value = scale * r.value;
    if !r.converged && scale.abs() * r.error > 1e-5 * value.abs().max(1e-300) {
        return Err(Error::Quadrature { estimate: value, error: scale.abs() * r.error });
    }
    Ok(value)
}

/// Options for [`pde_residual`].
#[derive(Debug, Clone, Copy)]
pub struct ResidualOptions {
    /// Finite-difference step for the x-derivative.
    pub h: f64,
    pub sing: Singularity,
    pub hilfer: HilferOptions,
}

/// Residual parts of the target equation at one point.
#[derive(Debug, Clone, Copy)]
pub struct Residual {
    pub time_term: f64,
    pub space_term: f64,
    /// (D_y u − (−1)^{n−1} ∂_x^{2n} u) / max(1, |D_y u|).
    pub normalized: f64,
}

/// D^{α,β}_y u − (−1)^{n−1} ∂^{2n}_x u at (x, y), normalized by max(1, |D^{α,β}_y u|).
pub fn pde_residual(
    u: &(dyn Fn(f64, f64) -> f64 + Sync),
    spec: &EquationSpec,
    x: f64,
    y: f64,
    opts: ResidualOptions,
) -> Result<Residual> {
    let dy = hilfer_derivative_opts(&|t| u(x, t), spec.order(), y, opts.sing, opts.hilfer)?;
    let dx = x_derivative(&|s| u(s, y), 2 * spec.n, x, opts.h);
    let space = spec.space_sign() * dx;
    Ok(Residual { time_term: dy, space_term: space, normalized: (dy - space) / dy.abs().max(1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::ln_gamma;

    #[test]
    fn power_rule_for_rl_integral() {
        let nu: f64 = 0.3;
        let mu = 0.6;
        let y = 1.7;
        let r = rl_integral(&|z: f64| z.powf(nu), mu, y, nu).unwrap();
        let exact = (ln_gamma(nu + 1.0).0 - ln_gamma(nu + mu + 1.0).0).exp() * y.powf(nu + mu);
        assert!((r.value - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn unit_order_integral_of_one() {
        let r = rl_integral(&|_| 1.0, 1.0, 2.5, 0.0).unwrap();
        assert!((r.value - 2.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_nonpositive_order() {
        assert!(rl_integral(&|_| 1.0, 0.0, 1.0, 0.0).is_err());
        assert!(rl_integral(&|_| 1.0, -0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn semigroup() {
        let f = |z: f64| z.powf(0.3);
        for &y in &[0.5, 1.0, 2.0] {
            let inner = |t: f64| rl_integral(&f, 0.4, t, 0.3).unwrap().value;
            let lhs = rl_integral(&inner, 0.4, y, 0.7).unwrap().value;
            let rhs = rl_integral(&f, 0.8, y, 0.3).unwrap().value;
            assert!((lhs - rhs).abs() < 1e-6 * rhs.abs(), "y={y}");
        }
    }

    #[test]
    fn hilfer_on_powers() {
        let cases = [(0.7, 0.5, 0.3), (2.0, 1.0, 0.4), (1.3, 1.5, 0.0), (1.3, 1.5, 1.0), (0.2, 0.8, 0.6)];
        for &(b, alpha, beta) in &cases {
            let ord = HilferOrder::new(alpha, beta).unwrap();
            let y: f64 = 0.8;
            let got = hilfer_derivative(&|t: f64| t.powf(b), ord, y, Singularity::power(b)).unwrap();
            let want = power_rule(b, alpha) * y.powf(b - alpha);
            assert!((got - want).abs() < 1e-5 * want.abs(), "b={b} α={alpha} β={beta}: {got} vs {want}");
        }
    }

    #[test]
    fn unit_order_is_first_derivative() {
        for &beta in &[0.0, 0.4, 1.0] {
            let ord = HilferOrder::new(1.0, beta).unwrap();
            let got = hilfer_derivative(&|t: f64| t * t, ord, 1.3, Singularity::power(2.0)).unwrap();
            assert!((got - 2.6).abs() < 1e-8);
        }
    }
}
