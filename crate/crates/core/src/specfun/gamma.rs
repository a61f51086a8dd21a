//! Reciprocal gamma and log-gamma on the whole real line.

use std::f64::consts::PI;

/// Taylor coefficients of 1/Γ(1+t) about t = 0.
const RG_TAYLOR: [f64; 31] = [
    1.0,
    0.5772156649015329,
    -0.6558780715202539,
    -0.04200263503409524,
    0.16653861138229148,
    -0.04219773455554433,
    -0.009621971527876973,
    0.0072189432466631,
    -0.0011651675918590652,
    -0.00021524167411495098,
    0.0001280502823881162,
    -2.013485478078824e-05,
    -1.2504934821426706e-06,
    1.133027231981696e-06,
    -2.056338416977607e-07,
    6.116095104481416e-09,
    5.002007644469223e-09,
    -1.18127457048702e-09,
    1.0434267116911005e-10,
    7.782263439905071e-12,
    -3.696805618642206e-12,
    5.100370287454476e-13,
    -2.0583260535665066e-14,
    -5.348122539423018e-15,
    1.2267786282382608e-15,
    -1.1812593016974588e-16,
    1.1866922547516004e-18,
    1.4123806553180319e-18,
    -2.29874568443537e-19,
    1.7144063219273374e-20,
    1.337351730493693e-22,
];

const STIRLING_FROM: f64 = 12.0;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// 1/Γ(1+t) for |t| ≤ 0.5.
fn rg1p(t: f64) -> f64 {
    RG_TAYLOR.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Stirling correction ln Γ(x) − [(x−½)ln x − x + ln√(2π)] for x ≥ 12.
fn stirling_tail(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0
        + r2 * (-1.0 / 360.0
            + r2 * (1.0 / 1260.0
                + r2 * (-1.0 / 1680.0
                    + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360360.0 + r2 * (1.0 / 156.0)))))))
}

/// sin(πx) with exact argument reduction; exactly zero at integers.
pub fn sinpi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    if x == x.trunc() {
        return 0.0;
    }
    let mut r = x % 2.0;
    if r > 1.0 {
        r -= 2.0;
    } else if r <= -1.0 {
        r += 2.0;
    }
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.trunc()
}

/// 1/Γ(x). Exactly zero at the poles 0, −1, −2, …
pub fn recip_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x.abs() <= 0.5 {
        return x * rg1p(x);
    }
    if x > 0.5 && x <= 1.5 {
        return rg1p(x - 1.0);
    }
    if x > 1.5 && x < STIRLING_FROM {
        let m = (x - 0.5).ceil() - 1.0;
        let y = x - m;
        let mut den = 1.0;
        let mut i = 0.0;
        while i < m {
            den *= y + i;
            i += 1.0;
        }
        return rg1p(y - 1.0) / den;
    }
    if x >= STIRLING_FROM {
        if x > 200.0 {
            return 0.0;
        }
        let half = x.powf(-(x - 0.5) / 2.0) * (x / 2.0).exp();
        return half * half * (-stirling_tail(x)).exp() / (2.0 * PI).sqrt();
    }
    // x < -0.5: climb into (-0.5, 0.5] by 1/Γ(x) = x(x+1)…(x+m−1)/Γ(x+m).
    if x < -180.0 {
        let (lg, sg) = ln_gamma(x);
        return sg * (-lg).exp();
    }
    let m = (-0.5 - x).ceil();
    let y = x + m;
    let mut num = y * rg1p(y);
    let mut i = 1.0;
    while i <= m {
        num *= y - i;
        i += 1.0;
    }
    num
}

/// ln|Γ(x)| together with the sign of Γ(x). At poles returns (+∞, 1).
pub fn ln_gamma(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, 1.0);
    }
    if is_nonpositive_integer(x) {
        return (f64::INFINITY, 1.0);
    }
    if x >= STIRLING_FROM {
        return ((x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_tail(x), 1.0);
    }
    if x > -150.0 {
        let r = recip_gamma(x);
        return (-r.abs().ln(), r.signum());
    }
    let s = sinpi(x);
    let (l1, _) = ln_gamma(1.0 - x);
    (PI.ln() - s.abs().ln() - l1, s.signum())
}

/// Γ(x) as 1/recip_gamma(x); ±∞ at poles.
pub fn gamma(x: f64) -> f64 {
    let r = recip_gamma(x);
    if r == 0.0 {
        if is_nonpositive_integer(x) {
            f64::INFINITY
        } else {
            (ln_gamma(x).0).exp()
        }
    } else {
        1.0 / r
    }
}

/// Upper bound on |1/Γ(x)| that is monotone in the tail of a series, in log form.
///
/// For x ≥ ½ this is ln|1/Γ(x)| itself; for x < ½ the reflection bound
/// |1/Γ(x)| ≤ Γ(1−x)/π is used, which ignores the oscillating sine.
pub(crate) fn ln_recip_gamma_bound(x: f64) -> f64 {
    if x >= 0.5 {
        -ln_gamma(x).0
    } else {
        ln_gamma(1.0 - x).0 - PI.ln()
    }
}
