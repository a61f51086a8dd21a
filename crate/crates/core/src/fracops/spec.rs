use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::specfun::decay_sigma;

/// Orders of a Hilfer derivative: s − 1 < α ≤ s, 0 ≤ β ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HilferOrder {
    pub alpha: f64,
    pub beta: f64,
    pub s: u32,
}

impl HilferOrder {
    /// s = ⌈α⌉, so α = 1 gives s = 1.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha = {alpha} must be positive")));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(invalid(format!("beta must lie in [0,1], got {beta}")));
        }
        Ok(HilferOrder { alpha, beta, s: alpha.ceil() as u32 })
    }

    /// Order (1−β)(s−α) of the integral applied first.
    pub fn mu_inner(&self) -> f64 {
        (1.0 - self.beta) * (self.s as f64 - self.alpha)
    }

    /// Order β(s−α) of the integral applied last.
    pub fn mu_outer(&self) -> f64 {
        self.beta * (self.s as f64 - self.alpha)
    }
}

/// D^{α,β}_y u − (−1)^{n−1} ∂^{2n}_x u = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquationSpec {
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
    pub s_count: u32,
}

impl EquationSpec {
    pub fn new(n: u32, alpha: f64, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(invalid(format!("alpha must lie in (0,2), got {alpha}")));
        }
        let ord = HilferOrder::new(alpha, beta)?;
        Ok(EquationSpec { n, alpha, beta, s_count: ord.s })
    }

    pub fn order(&self) -> HilferOrder {
        HilferOrder { alpha: self.alpha, beta: self.beta, s: self.s_count }
    }

    /// δ = α/(2n), the Wright parameter of the kernel.
    pub fn delta(&self) -> f64 {
        self.alpha / (2.0 * self.n as f64)
    }

    /// (−1)^{n−1}.
    pub fn space_sign(&self) -> f64 {
        if self.n % 2 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn roots(&self) -> Vec<Complex64> {
        crate::kernel::roots(self.n)
    }

    /// Decay constant of the kernel envelope.
    pub fn sigma(&self) -> f64 {
        decay_sigma(self.n, self.alpha)
    }

    /// Exponent 2n/(2n−α) of the growth and decay classes.
    pub fn growth_power(&self) -> f64 {
        let nn = 2.0 * self.n as f64;
        nn / (nn - self.alpha)
    }
}

/// x^m D^{α₁,β₁}_y u − d y^k D^{α₂,β₂}_x u = 0 (the degenerate equation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralEquationSpec {
    pub m: f64,
    pub k: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    pub d: f64,
    pub q: u32,
    pub p: u32,
}

impl GeneralEquationSpec {
    /// q and p are derived from α₁ and α₂ as ⌈α⌉.
    pub fn new(m: f64, k: f64, alpha1: f64, beta1: f64, alpha2: f64, beta2: f64, d: f64) -> Result<Self> {
        let o1 = HilferOrder::new(alpha1, beta1)?;
        let o2 = HilferOrder::new(alpha2, beta2)?;
        if d != 1.0 && d != -1.0 {
            return Err(invalid(format!("d must be +1 or -1, got {d}")));
        }
        if !(m > -alpha2) {
            return Err(invalid(format!("requires m > -alpha2 (m = {m}, alpha2 = {alpha2})")));
        }
        if !(k > -alpha1) {
            return Err(invalid(format!("requires k > -alpha1 (k = {k}, alpha1 = {alpha1})")));
        }
        if o1.s >= o2.s {
            return Err(invalid(format!("requires q < p (q = {}, p = {})", o1.s, o2.s)));
        }
        Ok(GeneralEquationSpec { m, k, alpha1, beta1, alpha2, beta2, d, q: o1.s, p: o2.s })
    }

    pub fn order_y(&self) -> HilferOrder {
        HilferOrder { alpha: self.alpha1, beta: self.beta1, s: self.q }
    }

    pub fn order_x(&self) -> HilferOrder {
        HilferOrder { alpha: self.alpha2, beta: self.beta2, s: self.p }
    }
}
