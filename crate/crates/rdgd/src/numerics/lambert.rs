//! Real branch W_-1 of the Lambert W function.
//!
//! W_-1 maps [-1/e, 0) onto (-inf, -1], inverting f(w) = w*exp(w). The root
//! is bracketed first (bisection guarantees we stay on the w <= -1 branch)
//! and then polished with safeguarded Halley steps.

use crate::error::{Error, Result};

/// exp(-1), the left end of the branch domain.
const EXP_NEG1: f64 = 0.367_879_441_171_442_33;

fn f_and_derivs(w: f64, x: f64) -> (f64, f64, f64) {
    let ew = w.exp();
    (w * ew - x, (1.0 + w) * ew, (2.0 + w) * ew)
}

/// W_-1(x) for x in [-1/e, 0), with |w*exp(w) - x| <= 1e-12.
pub fn lambert_w_minus1(x: f64) -> Result<f64> {
    if !(-EXP_NEG1 - 1e-15..0.0).contains(&x) {
        return Err(Error::LambertDomain(x));
    }
    if x <= -EXP_NEG1 {
        return Ok(-1.0);
    }

    // Asymptotic guess w ~ ln(-x) - ln(-ln(-x)), then expand a bracket
    // [lo, hi] with f(lo) > 0 >= f(hi) (f is decreasing on w <= -1).
    let l1 = (-x).ln(); // <= -1
    let guess = if l1 < -2.0 { l1 - (-l1).ln() } else { -2.0 };
    let mut hi = -1.0;
    let mut lo = guess.min(-2.0);
    let mut margin = 1.0;
    while f_and_derivs(lo, x).0 <= 0.0 {
        lo -= margin;
        margin *= 2.0;
        if lo < -1e6 {
            return Err(Error::LambertDomain(x));
        }
    }

    let mut w = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (f, df, d2f) = f_and_derivs(w, x);
        if f.abs() <= 1e-15 {
            return Ok(w);
        }
        // Maintain the bracket.
        if f > 0.0 {
            lo = w;
        } else {
            hi = w;
        }
        let denom = 2.0 * df * df - f * d2f;
        let halley = if denom != 0.0 { w - 2.0 * f * df / denom } else { f64::NAN };
        w = if halley.is_finite() && halley > lo && halley < hi {
            halley
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi.abs() {
            break;
        }
    }
    Ok(w)
}
