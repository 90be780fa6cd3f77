//! Principal real branch of the Lambert W function.
//!
//! `W(x)` is the inverse of `w * exp(w)` restricted to `w >= 0`, evaluated
//! here for `x >= 0` by Halley iteration. The two-sided logarithmic estimate
//! `ln x - ln(ln x) <= W(x) <= ln x - ln(ln x)/2` (valid for `x >= e`, with
//! equality only at `x = e`) doubles as the initial guess and is exposed for
//! testing.

use std::f64::consts::E;

use crate::error::{Error, Result};

const MAX_ITER: u32 = 50;
const STEP_TOL: f64 = 1e-15;

/// Outcome of a W evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WResult {
    /// The value `W(x)`, nonnegative for `x >= 0` and zero only at `x = 0`.
    pub value: f64,
    /// `|W exp(W) - x|` relative to `max(1, x)`.
    pub residual: f64,
    pub iterations: u32,
}

/// Evaluate the principal branch `W(x)` for finite `x >= 0`.
pub fn lambert_w0(x: f64) -> Result<WResult> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "lambert_w0 requires finite x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(WResult {
            value: 0.0,
            residual: 0.0,
            iterations: 0,
        });
    }
    // Two-term series; avoids ln(0) underflow for denormal-scale inputs.
    if x < 1e-300 {
        let w = x * (1.0 - x);
        return Ok(WResult {
            value: w,
            residual: (w * w.exp() - x).abs() / x.max(1.0),
            iterations: 0,
        });
    }
    if x < E {
        halley_direct(x)
    } else {
        halley_log(x)
    }
}

/// The logarithmic estimate `(ln x - ln(ln x), ln x - ln(ln x)/2)` for `x >= e`.
///
/// Both ends equal `W(x)` exactly when `x = e`.
pub fn w0_bracket(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() || x < E {
        return Err(Error::Domain(format!(
            "logarithmic W estimate requires x >= e, got {x}"
        )));
    }
    let lx = x.ln();
    let llx = lx.ln();
    Ok((lx - llx, lx - 0.5 * llx))
}

// Halley iteration on w*exp(w) - x = 0. Used below e where the values are
// small enough that exp(w) cannot overflow.
fn halley_direct(x: f64) -> Result<WResult> {
    let mut w = x.ln_1p();
    for it in 1..=MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let d1 = ew * (w + 1.0);
        let d2 = ew * (w + 2.0);
        let step = 2.0 * f * d1 / (2.0 * d1 * d1 - f * d2);
        w -= step;
        if step.abs() <= STEP_TOL * w.abs().max(1.0) {
            let residual = (w * w.exp() - x).abs() / x.max(1.0);
            return Ok(WResult {
                value: w,
                residual,
                iterations: it,
            });
        }
    }
    Err(Error::Convergence(format!("lambert_w0({x}) stalled")))
}

// Halley iteration on the equivalent w + ln w = ln x, which stays finite for
// every representable x. Only used for x >= e, so w >= 1 and ln w is safe.
fn halley_log(x: f64) -> Result<WResult> {
    let lx = x.ln();
    let llx = lx.ln();
    let mut w = lx - 0.75 * llx;
    for it in 1..=MAX_ITER {
        let g = w + w.ln() - lx;
        let d1 = 1.0 + 1.0 / w;
        let d2 = -1.0 / (w * w);
        let step = 2.0 * g * d1 / (2.0 * d1 * d1 - g * d2);
        w -= step;
        if step.abs() <= STEP_TOL * w.abs().max(1.0) {
            // |w e^w - x| / x without forming w e^w, which overflows near
            // the top of the double range.
            let residual = (w + w.ln() - lx).exp_m1().abs();
            return Ok(WResult {
                value: w,
                residual,
                iterations: it,
            });
        }
    }
    Err(Error::Convergence(format!("lambert_w0({x}) stalled")))
}
