//! Symmetric q-numbers `{k} = q^k − q^{−k}` and the log-stable ratios the
//! closed-form bases are written in.
//!
//! Everything here is a function of `h = ln q`; ratios of hyperbolic
//! functions are evaluated through logarithms so that neither `q → 1`
//! (0/0) nor small `q` (∞/∞) loses precision.

use crate::algebra::HalfInt;
use crate::error::{Error, Result};
use crate::rmatrices::{QKind, QParam};

/// `{k}` at a positive `q`.
pub fn qnumber(k: f64, q: QParam) -> Result<f64> {
    let h = q.h().ok_or(Error::UnsupportedAtZero)?;
    Ok(2.0 * (k * h).sinh())
}

/// `{k}/{m}`: the analytic value `k/m` at `q = 1` and the leading-order
/// ratio at `q = 0`, which exists only when `|k| = |m|`.
pub fn qnumber_ratio(k: HalfInt, m: HalfInt, q: QParam) -> Result<f64> {
    if m.twice() == 0 {
        return Err(Error::ZeroDenominator);
    }
    if k.twice() == 0 {
        return Ok(0.0);
    }
    match q.kind() {
        QKind::One => Ok(k.as_f64() / m.as_f64()),
        QKind::Zero => {
            // {k} ~ −sign(k)·q^{−|k|} as q → 0
            if k.twice().abs() == m.twice().abs() {
                Ok(f64::from(k.twice().signum() * m.twice().signum()))
            } else {
                Err(Error::ZeroDenominatorOrder {
                    k: k.as_f64(),
                    m: m.as_f64(),
                })
            }
        }
        QKind::Generic => Ok(sinh_ratio(k.as_f64(), m.as_f64(), q.h().expect("positive q"))),
    }
}

/// `ln sinh x` for `x > 0`.
fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 1e-3 {
        let x2 = x * x;
        x.ln() + x2 / 6.0 - x2 * x2 / 180.0
    } else {
        x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2
    }
}

/// `ln cosh x`.
pub(crate) fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `ln({a}/{b})` for `a, b > 0`; even in `h`.
pub(crate) fn ln_sinh_ratio(a: f64, b: f64, h: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    let x = h.abs();
    if x == 0.0 {
        (a / b).ln()
    } else if x * a.max(b) < 1e-3 {
        // both arguments small: series keeps the relative error at ε
        let x2 = x * x;
        (a / b).ln() + (a * a - b * b) * x2 / 6.0 - (a.powi(4) - b.powi(4)) * x2 * x2 / 180.0
    } else {
        ln_sinh(a * x) - ln_sinh(b * x)
    }
}

/// `{a}/{b}` for real `a` and nonzero `b`.
pub(crate) fn sinh_ratio(a: f64, b: f64, h: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let sign = a.signum() * b.signum();
    sign * ln_sinh_ratio(a.abs(), b.abs(), h).exp()
}

/// `(q^a + q^{−a}) / (q^b + q^{−b})`.
pub(crate) fn cosh_ratio(a: f64, b: f64, h: f64) -> f64 {
    (ln_cosh(a * h) - ln_cosh(b * h)).exp()
}

/// `{1} · √({1}/{2}) / √((q^a + q^{−a})(q^b + q^{−b}))`; odd in `h`.
pub(crate) fn odd_factor(a: f64, b: f64, h: f64) -> f64 {
    if h == 0.0 {
        return 0.0;
    }
    let ln = ln_sinh(h.abs()) + 0.5 * ln_sinh_ratio(1.0, 2.0, h)
        - 0.5 * (ln_cosh(a * h) + ln_cosh(b * h));
    h.signum() * ln.exp()
}
