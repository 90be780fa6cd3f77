//! The extended associated function
//! `T(k) = sup_p ln+ ( h^(p^sigma) k^p / M_p )` for `M_p = p^(tau p^sigma)`,
//! together with its continuous relaxation, the critical point in closed
//! form through the Lambert W function, and the two-sided envelope
//! expressions it is squeezed between for `k` above an explicit threshold.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lambert::lambert_w0;
use crate::sequence::GevreyParams;

/// Parameters `(tau, sigma, h)` with `tau > 0`, `sigma > 1`, `h > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssocParams {
    pub tau: f64,
    pub sigma: f64,
    pub h: f64,
}

impl AssocParams {
    pub fn new(tau: f64, sigma: f64, h: f64) -> Result<Self> {
        GevreyParams::new(tau, sigma)?;
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Domain(format!("h must be finite and > 0, got {h}")));
        }
        Ok(Self { tau, sigma, h })
    }

    pub fn gevrey(&self) -> GevreyParams {
        GevreyParams {
            tau: self.tau,
            sigma: self.sigma,
        }
    }
}

/// Value and integer maximizer of the discrete supremum. `p_star = 0`
/// signals that the positive-part clamp is active (the sup is <= 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssocValue {
    pub value: f64,
    pub p_star: u64,
}

/// Per-`k` record tying the discrete value to the continuous machinery.
#[derive(Debug, Clone, Copy)]
pub struct BoundsReport {
    pub k: f64,
    pub t: f64,
    pub p_star: u64,
    /// Continuous supremum `f(r0)`.
    pub f_sup: f64,
    pub r0: f64,
    /// `W` evaluated at the rescaled logarithm.
    pub w_r: f64,
    pub lower: f64,
    pub upper: f64,
}

/// The rescaled logarithm `h^(-(sigma-1)/tau) e^((sigma-1)/sigma)
/// (sigma-1)/(tau sigma) ln k` that feeds every W evaluation. Requires
/// `k > e` so that `ln k > 1` on the envelope formulas downstream.
pub fn rescaled_log(params: &AssocParams, k: f64) -> Result<f64> {
    if !(k.is_finite() && k > E) {
        return Err(Error::Domain(format!("rescaled_log requires k > e, got {k}")));
    }
    Ok(rescaled_log_raw(params, k))
}

// Same formula without the domain gate; nonnegative whenever k >= 1.
pub(crate) fn rescaled_log_raw(params: &AssocParams, k: f64) -> f64 {
    let s = params.sigma;
    let t = params.tau;
    params.h.powf(-(s - 1.0) / t) * ((s - 1.0) / s).exp() * ((s - 1.0) / (t * s)) * k.ln()
}

/// The continuous objective `f(r) = r^sigma ln h + r ln k - tau r^sigma ln r`.
pub fn continuous_objective(r: f64, params: &AssocParams, k: f64) -> f64 {
    debug_assert!(r > 0.0 && k > 0.0);
    let rs = r.powf(params.sigma);
    rs * params.h.ln() + r * k.ln() - params.tau * rs * r.ln()
}

/// `f'(r) = sigma r^(sigma-1) ln h + ln k - tau sigma r^(sigma-1) ln r
/// - tau r^(sigma-1)`.
pub fn objective_derivative(r: f64, params: &AssocParams, k: f64) -> f64 {
    debug_assert!(r > 0.0 && k > 0.0);
    let s = params.sigma;
    let rs1 = r.powf(s - 1.0);
    s * rs1 * params.h.ln() + k.ln() - params.tau * s * rs1 * r.ln() - params.tau * rs1
}

/// The unique zero of `f'`: `r0 = h^(1/tau) exp(W(R)/(sigma-1) - 1/sigma)`.
pub fn critical_radius(params: &AssocParams, k: f64) -> Result<f64> {
    let r = rescaled_log(params, k)?;
    Ok(critical_radius_from_w(params, w_of(r)))
}

pub(crate) fn critical_radius_raw(params: &AssocParams, k: f64) -> f64 {
    debug_assert!(k > 1.0);
    critical_radius_from_w(params, w_of(rescaled_log_raw(params, k)))
}

fn critical_radius_from_w(params: &AssocParams, w: f64) -> f64 {
    params.h.powf(1.0 / params.tau) * (w / (params.sigma - 1.0) - 1.0 / params.sigma).exp()
}

// W of a nonnegative finite argument; failure is unreachable there.
fn w_of(x: f64) -> f64 {
    lambert_w0(x).expect("W on [0, inf) converges").value
}

// Brackets wider than this are narrowed by ternary steps before the exact
// linear pass; below it a straight scan is already cheap.
const LINEAR_SCAN_MAX: u64 = 32_768;
const BRACKET_CAP: u64 = 1 << 62;

/// The discrete supremum and its maximizer, total over `k > 0`. Ties go to
/// the smallest `p`. The search bracket comes from the continuous critical
/// point when `k > 1` (the objective is unimodal there); for `k <= 1` the
/// objective is convex up to the derivative's turning point and concave
/// after it, so the maximum is `p = 1` or the peak of the concave tail.
/// Wide brackets (they grow like `h^(1/tau)`) are narrowed in
/// logarithmically many steps; the final window is scanned linearly, so
/// argmax ties still go to the smallest index. If a maximum lands on the
/// bracket edge the bracket doubles.
pub fn associated(params: &AssocParams, k: f64) -> AssocValue {
    debug_assert!(k.is_finite() && k > 0.0);
    let ln_k = k.ln();
    let ln_h = params.h.ln();
    if ln_k <= 0.0 && ln_h <= 0.0 {
        // every term is <= 0 and the clamp wins
        return AssocValue {
            value: 0.0,
            p_star: 0,
        };
    }
    let clamp = |best: f64, arg: u64| {
        if best <= 0.0 {
            AssocValue {
                value: 0.0,
                p_star: 0,
            }
        } else {
            AssocValue {
                value: best,
                p_star: arg,
            }
        }
    };
    if k > 1.0 {
        let mut hi = ((2.0 * critical_radius_raw(params, k)).ceil() as u64)
            .saturating_add(2)
            .clamp(3, BRACKET_CAP);
        loop {
            let (best, arg) = unimodal_max(params, ln_k, ln_h, 1, hi);
            if arg < hi || hi >= BRACKET_CAP {
                return clamp(best, arg);
            }
            hi = hi.saturating_mul(2).min(BRACKET_CAP);
        }
    } else {
        // ln k <= 0 < ln h: the objective falls, may rise to an interior
        // peak, and falls for good past h^(1/tau) e^(-1/sigma)
        let r_top = params.h.powf(1.0 / params.tau) * (-1.0 / params.sigma).exp();
        let hi = ((r_top.ceil() as u64).saturating_add(2)).clamp(3, BRACKET_CAP);
        if hi <= LINEAR_SCAN_MAX {
            let (best, arg) = scan_terms(params, ln_k, ln_h, 1, hi);
            return clamp(best, arg);
        }
        // concavity holds from the turning point of the derivative on
        let concave_from =
            ((r_top * (-1.0 / (params.sigma - 1.0)).exp()).ceil() as u64).clamp(1, hi);
        let (best, arg) = unimodal_max(params, ln_k, ln_h, concave_from, hi);
        // on the convex stretch before it the maximum sits at an endpoint,
        // and the right endpoint is already covered
        let first = term(params, ln_k, ln_h, 1);
        if first >= best {
            return clamp(first, 1);
        }
        clamp(best, arg)
    }
}

#[inline]
fn term(params: &AssocParams, ln_k: f64, ln_h: f64, p: u64) -> f64 {
    let pf = p as f64;
    let ps = pf.powf(params.sigma);
    ps * ln_h + pf * ln_k - params.tau * ps * pf.ln()
}

fn scan_terms(params: &AssocParams, ln_k: f64, ln_h: f64, lo: u64, hi: u64) -> (f64, u64) {
    let mut best = f64::NEG_INFINITY;
    let mut arg = lo;
    for p in lo..=hi {
        let t = term(params, ln_k, ln_h, p);
        if t > best {
            best = t;
            arg = p;
        }
    }
    (best, arg)
}

// Exact integer maximum of a unimodal objective. Brackets the plain scan
// can afford stay linear; wider ones are ternary-narrowed to a fixed
// window first, then the final pass keeps the smallest maximizer.
fn unimodal_max(params: &AssocParams, ln_k: f64, ln_h: f64, lo: u64, hi: u64) -> (f64, u64) {
    let (mut lo, mut hi) = (lo, hi.max(lo));
    if hi - lo > LINEAR_SCAN_MAX {
        while hi - lo > 64 {
            let m1 = lo + (hi - lo) / 3;
            let m2 = hi - (hi - lo) / 3;
            if term(params, ln_k, ln_h, m1) < term(params, ln_k, ln_h, m2) {
                // the peak cannot sit at or before m1
                lo = m1 + 1;
            } else {
                // the peak cannot sit past m2
                hi = m2;
            }
        }
    }
    scan_terms(params, ln_k, ln_h, lo, hi)
}

/// Closed form of the continuous supremum `f(r0)`:
/// `tau^(-1/(sigma-1)) ((sigma-1)/sigma)^(sigma/(sigma-1))
///  W(R)^(-sigma/(sigma-1)) (ln k)^(sigma/(sigma-1)) (1/sigma + W(R))`.
pub fn continuous_sup(params: &AssocParams, k: f64) -> Result<f64> {
    let s = params.sigma;
    let w = w_of(rescaled_log(params, k)?);
    let q = s / (s - 1.0);
    Ok(params.tau.powf(-1.0 / (s - 1.0))
        * ((s - 1.0) / s).powf(q)
        * w.powf(-q)
        * k.ln().powf(q)
        * (1.0 / s + w))
}

/// Lower envelope expression of the two-sided estimate (holds up to an
/// additive constant that is only asserted to exist).
pub fn lower_bound_expr(params: &AssocParams, k: f64) -> Result<f64> {
    let s = params.sigma;
    let w = w_of(rescaled_log(params, k)?);
    Ok((2f64.powf(s - 1.0) * params.tau).powf(-1.0 / (s - 1.0))
        * ((s - 1.0) / s).powf(s / (s - 1.0))
        * w.powf(-1.0 / (s - 1.0))
        * k.ln().powf(s / (s - 1.0)))
}

/// Upper envelope expression; bounds `T` with no additive constant once
/// `k >= upper_bound_threshold`.
pub fn upper_bound_expr(params: &AssocParams, k: f64) -> Result<f64> {
    let s = params.sigma;
    let w = w_of(rescaled_log(params, k)?);
    Ok(((s - 1.0) / (params.tau * s)).powf(1.0 / (s - 1.0))
        * w.powf(-1.0 / (s - 1.0))
        * k.ln().powf(s / (s - 1.0)))
}

/// The threshold `exp(tau h^((sigma-1)/tau))`; at this `k` the rescaled
/// logarithm satisfies `W(R) = (sigma-1)/sigma` exactly.
pub fn upper_bound_threshold(params: &AssocParams) -> f64 {
    (params.tau * params.h.powf((params.sigma - 1.0) / params.tau)).exp()
}

/// The log-log asymptotic form `(ln k / ln(C_h ln k))^(1/(sigma-1)) ln k`,
/// comparable to the W-based envelope for large `k`.
pub fn asymptotic_form(params: &AssocParams, k: f64) -> Result<f64> {
    let s = params.sigma;
    let ln_k = rescaled_log(params, k).map(|_| k.ln())?;
    let scaled = rescaled_log_raw(params, k); // C_h * ln k
    if scaled <= E {
        return Err(Error::Domain(format!(
            "asymptotic form needs C_h * ln k > e, got {scaled}"
        )));
    }
    Ok((ln_k / scaled.ln()).powf(1.0 / (s - 1.0)) * ln_k)
}

/// Power majorant `k^(1/t)`; `T(k)` with `h = 1` grows slower than this for
/// every `t > 1`.
pub fn gevrey_majorant(t: f64, k: f64) -> f64 {
    debug_assert!(t > 1.0 && k > 0.0);
    k.powf(1.0 / t)
}

/// Assemble the full per-`k` record (requires `k > e`).
pub fn bounds_report(params: &AssocParams, k: f64) -> Result<BoundsReport> {
    let r = rescaled_log(params, k)?;
    let w_r = w_of(r);
    let disc = associated(params, k);
    Ok(BoundsReport {
        k,
        t: disc.value,
        p_star: disc.p_star,
        f_sup: continuous_sup(params, k)?,
        r0: critical_radius_from_w(params, w_r),
        w_r,
        lower: lower_bound_expr(params, k)?,
        upper: upper_bound_expr(params, k)?,
    })
}
