//! Certified summation of entire power series with gamma-function coefficients.

use num_complex::Complex64;
use serde::Serialize;

/// Ratio Σ|term| / |Σ term| above which a double-precision sum is not trusted.
pub const CANCELLATION_GUARD: f64 = 1e8;

/// Rounding charge per unit of Σ (k+4)|term_k|: term k is built from a running
/// product of k complex factors plus a reciprocal-gamma value.
const ROUNDING_PER_TERM: f64 = 2.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesStatus {
    Converged,
    BoundReturned,
}

/// A complex value with an absolute error bound.
///
/// When `status` is `Converged`, `err_bound ≤ tol · max(1, |value|)` for the
/// requested `tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub err_bound: f64,
    pub terms_used: usize,
    pub status: SeriesStatus,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

impl SeriesValue {
    pub fn converged(&self) -> bool {
        self.status == SeriesStatus::Converged
    }

    pub(crate) fn exact(value: Complex64) -> Self {
        SeriesValue { value, err_bound: 0.0, terms_used: 1, status: SeriesStatus::Converged }
    }

    pub(crate) fn conj(self) -> Self {
        SeriesValue { value: self.value.conj(), ..self }
    }
}

/// Neumaier compensated accumulator for complex sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

fn two_sum_step(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        two_sum_step(&mut self.re, &mut self.re_c, z.re);
        two_sum_step(&mut self.im, &mut self.im_c, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

/// Real Neumaier sum.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for x in xs {
        two_sum_step(&mut s, &mut c, x);
    }
    s + c
}

/// Outcome of a raw series summation, before the caller decides what to trust.
#[derive(Debug, Clone, Copy)]
pub struct RawSum {
    pub value: Complex64,
    pub abs_sum: f64,
    pub abs_weighted: f64,
    pub tail: f64,
    pub terms: usize,
    pub finished: bool,
}

impl RawSum {
    pub fn rounding(&self) -> f64 {
        ROUNDING_PER_TERM * self.abs_weighted
    }

    pub fn err(&self) -> f64 {
        self.tail + self.rounding()
    }

    pub fn cancellation_ratio(&self) -> f64 {
        let m = self.value.norm();
        if m == 0.0 {
            if self.abs_sum == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            self.abs_sum / m
        }
    }

    /// Series result acceptable under the guard and the mixed tolerance.
    pub fn trusted(&self, tol: f64) -> bool {
        self.finished
            && self.cancellation_ratio() <= CANCELLATION_GUARD
            && self.err() <= tol * self.value.norm().max(1.0)
    }

    pub fn to_value(self) -> SeriesValue {
        SeriesValue {
            value: self.value,
            err_bound: self.err(),
            terms_used: self.terms,
            status: SeriesStatus::Converged,
        }
    }
}

/// Sums Σ_k term(k) until a certified tail bound falls below `tol · max(1, |S|)`.
///
/// `ln_bound(k)` must bound ln|term(k)| from above and have ratios
/// bound(k+1)/bound(k) that decrease in k once they drop below one; the tail
/// beyond k is then bounded by a geometric series.
pub(crate) fn sum_certified(
    mut term: impl FnMut(usize) -> Complex64,
    ln_bound: impl Fn(usize) -> f64,
    k_min: usize,
    tol: f64,
    max_terms: usize,
) -> RawSum {
    let mut acc = CompensatedSum::new();
    let mut abs_sum = 0.0;
    let mut abs_weighted = 0.0;
    let mut k = 0;
    // ln_bound(k + 2) of the previous step is this step's ln_bound(k + 1)
    let mut carried: Option<f64> = None;
    loop {
        let t = term(k);
        acc.add(t);
        abs_sum += t.norm();
        abs_weighted += t.norm() * (k + 4) as f64;
        if k >= k_min {
            let b1 = carried.unwrap_or_else(|| ln_bound(k + 1));
            let b2 = ln_bound(k + 2);
            carried = Some(b2);
            let ratio = (b2 - b1).exp();
            if ratio < 1.0 {
                let tail = b1.exp() / (1.0 - ratio);
                let scale = acc.value().norm().max(1.0);
                if tail <= 1e-3 * tol * scale || b1 < -745.0 {
                    return RawSum { value: acc.value(), abs_sum, abs_weighted, tail, terms: k + 1, finished: true };
                }
            }
        }
        k += 1;
        if k >= max_terms {
            return RawSum {
                value: acc.value(),
                abs_sum,
                abs_weighted,
                tail: f64::INFINITY,
                terms: k,
                finished: false,
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_units() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(neumaier_sum(xs), 2.0);
        let naive: f64 = xs.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn exponential_series_certified() {
        let z = Complex64::new(-3.0, 1.0);
        let mut p = Complex64::new(1.0, 0.0);
        let raw = sum_certified(
            |k| {
                if k > 0 {
                    p = p * z / k as f64;
                }
                p
            },
            |k| k as f64 * z.norm().ln() - super::super::gamma::ln_gamma(k as f64 + 1.0).0,
            4,
            1e-15,
            500,
        );
        assert!(raw.finished);
        assert!((raw.value - z.exp()).norm() < 1e-14);
        assert!(raw.tail < 1e-17);
    }
}
