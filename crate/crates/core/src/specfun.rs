//! Sine and cosine integrals and the small helpers the response formulas need.
//!
//! For `|x| <= SERIES_CUTOFF` the integrals are summed from their power series;
//! above it the auxiliary functions are obtained from the continued fraction of
//! `E1(ix)` (modified Lentz), which converges quickly once `x` exceeds ~2.

use crate::error::{domain, Result};
use core::f64::consts::FRAC_PI_2;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_431;

const SERIES_CUTOFF: f64 = 4.0;
const EPS: f64 = f64::EPSILON;
const MAX_TERMS: usize = 200;

/// A special-function value together with a bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialValue {
    pub value: f64,
    pub est_abs_error: f64,
}

impl SpecialValue {
    fn new(value: f64, est_abs_error: f64) -> Self {
        Self { value, est_abs_error }
    }
}

/// `Si(z) = ∫₀^z sin t / t dt`.
pub fn sin_integral(z: f64) -> Result<SpecialValue> {
    if !z.is_finite() {
        return Err(domain("sine integral argument must be finite", z));
    }
    let (v, e) = si_abs(z.abs());
    Ok(SpecialValue::new(if z < 0.0 { -v } else { v }, e))
}

/// `Ci(z) = γ + ln z + ∫₀^z (cos t − 1)/t dt` for `z > 0`.
pub fn cos_integral(z: f64) -> Result<SpecialValue> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain("cosine integral needs a finite argument > 0", z));
    }
    if z <= SERIES_CUTOFF {
        let (cin, e) = cin_series(z);
        let ln = libm::log(z);
        let v = EULER_GAMMA + ln - cin;
        Ok(SpecialValue::new(v, e + 4.0 * EPS * (EULER_GAMMA + ln.abs() + cin)))
    } else {
        let (_, ci, e) = cisi_cf(z);
        Ok(SpecialValue::new(ci, e))
    }
}

/// `∫₀^x (cos ξ − 1)/ξ dξ` for `x >= 0`; never positive.
pub fn cos_deficit_integral(x: f64) -> Result<SpecialValue> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain("cosine-deficit integral needs a finite argument >= 0", x));
    }
    let (cin, e) = cin_abs(x);
    Ok(SpecialValue::new(-cin, e))
}

/// Heaviside step with `Θ(0) = 1/2`.
pub fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Si on `x >= 0`, value and error bound.
pub(crate) fn si_abs(x: f64) -> (f64, f64) {
    if x <= SERIES_CUTOFF {
        si_series(x)
    } else {
        let (si, _, e) = cisi_cf(x);
        (si, e)
    }
}

/// `Cin(x) = ∫₀^x (1 − cos t)/t dt` on `x >= 0`, value and error bound.
pub(crate) fn cin_abs(x: f64) -> (f64, f64) {
    if x <= SERIES_CUTOFF {
        cin_series(x)
    } else {
        let (_, ci, e) = cisi_cf(x);
        let ln = libm::log(x);
        let v = EULER_GAMMA + ln - ci;
        (v, e + 4.0 * EPS * (EULER_GAMMA + ln + v.abs()))
    }
}

/// Plain Si for internal closed forms (argument of either sign).
pub(crate) fn si(x: f64) -> f64 {
    let v = si_abs(x.abs()).0;
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Plain Cin for internal closed forms, `x >= 0`.
pub(crate) fn cin(x: f64) -> f64 {
    cin_abs(x).0
}

// Si(x) = Σ (-1)^k x^{2k+1} / ((2k+1)(2k+1)!)
fn si_series(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 0.0);
    }
    let x2 = x * x;
    let mut p = x; // x^{2k+1}/(2k+1)!
    let mut sum = 0.0;
    let mut sum_abs = 0.0;
    let mut last = 0.0;
    for k in 0..MAX_TERMS {
        let n = (2 * k + 1) as f64;
        let term = p / n;
        let signed = if k % 2 == 0 { term } else { -term };
        sum += signed;
        sum_abs += term;
        last = term;
        if term < EPS * sum.abs() * 0.5 {
            break;
        }
        p *= x2 / ((n + 1.0) * (n + 2.0));
    }
    (sum, 4.0 * EPS * sum_abs + last)
}

// Cin(x) = Σ_{k>=1} (-1)^{k+1} x^{2k} / (2k (2k)!)
fn cin_series(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 0.0);
    }
    let x2 = x * x;
    let mut p = x2 / 2.0; // x^{2k}/(2k)!
    let mut sum = 0.0;
    let mut sum_abs = 0.0;
    let mut last = 0.0;
    for k in 1..MAX_TERMS {
        let n = (2 * k) as f64;
        let term = p / n;
        let signed = if k % 2 == 1 { term } else { -term };
        sum += signed;
        sum_abs += term;
        last = term;
        if term < EPS * sum.abs() * 0.5 {
            break;
        }
        p *= x2 / ((n + 1.0) * (n + 2.0));
    }
    (sum, 4.0 * EPS * sum_abs + last)
}

#[derive(Clone, Copy)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
    fn scale(self, s: f64) -> Self {
        Self::new(self.re * s, self.im * s)
    }
    fn recip(self) -> Self {
        let d = self.re * self.re + self.im * self.im;
        Self::new(self.re / d, -self.im / d)
    }
    fn abs(self) -> f64 {
        libm::hypot(self.re, self.im)
    }
}

/// (Si, Ci, error bound) for `x > SERIES_CUTOFF` from the continued fraction
/// of `E1(ix)`.
fn cisi_cf(x: f64) -> (f64, f64, f64) {
    const TINY: f64 = 1e-300;
    let mut b = C64::new(1.0, x);
    let mut c = C64::new(1.0 / TINY, 0.0);
    let mut d = b.recip();
    let mut h = d;
    let mut last_delta = 0.0;
    for i in 2..=MAX_TERMS {
        let a = -(((i - 1) * (i - 1)) as f64);
        b = b.add(C64::new(2.0, 0.0));
        d = d.scale(a).add(b).recip();
        c = b.add(c.recip().scale(a));
        let del = c.mul(d);
        h = h.mul(del);
        last_delta = (del.re - 1.0).abs() + del.im.abs();
        if last_delta < EPS {
            break;
        }
    }
    let (s, co) = (libm::sin(x), libm::cos(x));
    let h = C64::new(co, -s).mul(h);
    let ci = -h.re;
    let si = FRAC_PI_2 + h.im;
    let habs = h.abs();
    let err_ci = 8.0 * EPS * habs + last_delta * habs;
    let err_si = err_ci + 2.0 * EPS * FRAC_PI_2;
    (si, ci, err_si.max(err_ci))
}
