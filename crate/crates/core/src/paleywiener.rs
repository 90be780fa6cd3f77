//! Decay envelopes for Fourier-Laplace transforms of compactly supported
//! functions in the extended classes, plus a concrete test object: the
//! iterated convolution of box kernels whose widths follow the sequence
//! ratios. Its transform is an exact finite product of sinc factors, so the
//! forward decay inequality can be checked pointwise with no discretization.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::associated::{rescaled_log_raw, AssocParams};
use crate::error::{Error, Result};
use crate::lambert::lambert_w0;
use crate::sequence::log_m;

/// Axis-aligned compact box in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl CompactBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len().max(1),
                got: hi.len(),
            });
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(Error::Domain(format!("invalid box side [{a}, {b}]")));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }
}

/// Support function `H_K(mu) = sup_{y in K} y . mu`, exact for a box:
/// per-coordinate maximization.
pub fn support_function(k: &CompactBox, mu: &[f64]) -> Result<f64> {
    if mu.len() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: mu.len(),
        });
    }
    Ok(k.lo
        .iter()
        .zip(&k.hi)
        .zip(mu)
        .map(|((lo, hi), m)| (lo * m).max(hi * m))
        .sum())
}

fn w_of(x: f64) -> f64 {
    lambert_w0(x).expect("W on [0, inf) converges").value
}

/// Exponent of the forward decay estimate: a compactly supported function of
/// class `(tau, sigma, h)` in dimension `d` has
/// `|phi_hat(eta)| <= A exp(-E(|eta|) + H_K(Im eta))` with
/// `E(x) = (tau 2^(sigma-1))^(-1/(sigma-1)) ((sigma-1)/sigma)^(sigma/(sigma-1))
///         W(R(1/(2 e h sqrt(d)), e+x))^(-1/(sigma-1)) ln^(sigma/(sigma-1))(e+x)`.
pub fn forward_envelope(params: &AssocParams, d: u32, xi_abs: f64) -> f64 {
    debug_assert!(d >= 1 && xi_abs >= 0.0);
    let s = params.sigma;
    let scale = 1.0 / (2.0 * E * params.h * f64::from(d).sqrt());
    let scaled = AssocParams {
        h: scale,
        ..*params
    };
    let w = w_of(rescaled_log_raw(&scaled, E + xi_abs));
    (params.tau * 2f64.powf(s - 1.0)).powf(-1.0 / (s - 1.0))
        * ((s - 1.0) / s).powf(s / (s - 1.0))
        * w.powf(-1.0 / (s - 1.0))
        * (E + xi_abs).ln().powf(s / (s - 1.0))
}

/// Exponent an entire function must beat for the converse direction; the
/// class index it lands in inflates to `2^(sigma-1) tau`.
pub fn inverse_envelope(params: &AssocParams, xi_abs: f64) -> f64 {
    debug_assert!(xi_abs >= 0.0);
    let s = params.sigma;
    let scaled = AssocParams {
        h: 2f64.powf(params.tau) / params.h,
        ..*params
    };
    let w = w_of(rescaled_log_raw(&scaled, E + xi_abs));
    ((s - 1.0) / (params.tau * s)).powf(1.0 / (s - 1.0))
        * w.powf(-1.0 / (s - 1.0))
        * (E + xi_abs).ln().powf(s / (s - 1.0))
}

/// A compactly supported test function: the `N`-fold convolution of
/// normalized box kernels with widths `a_p = h^-(p^sigma - (p-1)^sigma) *
/// M_{p-1}/M_p`, centered at 0. Total integral 1, support radius
/// `sum(a_p)/2`, transform `prod_p sinc(a_p xi / 2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub tau: f64,
    pub sigma: f64,
    pub h: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub lengths: Vec<f64>,
    pub support_radius: f64,
}

impl BumpSpec {
    pub fn params(&self) -> AssocParams {
        AssocParams {
            tau: self.tau,
            sigma: self.sigma,
            h: self.h,
        }
    }
}

/// Build the convolution-factor lengths; errors if any factor leaves the
/// representable range.
pub fn make_bump(params: &AssocParams, n: u32) -> Result<BumpSpec> {
    if n < 1 {
        return Err(Error::Domain("bump needs at least one factor".into()));
    }
    let g = params.gevrey();
    let ln_h = params.h.ln();
    let mut lengths = Vec::with_capacity(n as usize);
    let mut sum = 0.0;
    for p in 1..=n {
        let pf = f64::from(p);
        let exponent = pf.powf(params.sigma) - (pf - 1.0).powf(params.sigma);
        let ln_a = -exponent * ln_h + log_m(p - 1, &g).log() - log_m(p, &g).log();
        if ln_a.abs() > 700.0 {
            return Err(Error::BumpUnderflow { p });
        }
        let a = ln_a.exp();
        sum += a;
        lengths.push(a);
    }
    Ok(BumpSpec {
        tau: params.tau,
        sigma: params.sigma,
        h: params.h,
        n,
        lengths,
        support_radius: sum / 2.0,
    })
}

/// `sin(x)/x` with a series fallback near zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// The exact transform `phi_hat(xi) = prod_p sinc(a_p xi / 2)`.
pub fn bump_spectrum(spec: &BumpSpec, xi: f64) -> f64 {
    spec.lengths.iter().map(|a| sinc(a * xi / 2.0)).product()
}

/// Telescoped envelope: the sinc-product bound
/// `prod_{p<=n} 2/(a_p |xi|) = h^(n^sigma) M_n (|xi|/2)^(-n)` minimized over
/// the available factors, i.e. `exp` of the negative truncated supremum.
pub fn spectral_envelope(spec: &BumpSpec, xi_abs: f64) -> f64 {
    if xi_abs <= 0.0 {
        return 1.0;
    }
    let g = spec.params().gevrey();
    let ln_k = (xi_abs / 2.0).ln();
    let ln_h = spec.h.ln();
    let mut best = f64::NEG_INFINITY;
    for p in 1..=spec.n {
        let pf = f64::from(p);
        let term = pf * ln_k - pf.powf(spec.sigma) * ln_h - log_m(p, &g).log();
        if term > best {
            best = term;
        }
    }
    (-best.max(0.0)).exp()
}

/// One grid point of a spectrum check.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumCheck {
    pub xi: f64,
    pub abs_spec: f64,
    pub envelope: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ForwardReport {
    pub rows: Vec<SpectrumCheck>,
    /// Fitted constant of the forward-direction display (class weight `tau`,
    /// effective scale `1/(2 e h sqrt(d))`): `|phi_hat| <= A* exp(-forward_envelope)`
    /// on the grid.
    pub ln_a_star: f64,
    /// Fitted constant of the converse-direction display (class weight
    /// inflates to `2^(sigma-1) tau`, scale `2^tau/h`):
    /// `|phi_hat| <= A* exp(-inverse_envelope)`.
    pub ln_a_star_inverse: f64,
    pub all_pass: bool,
}

pub const SPECTRUM_SLACK: f64 = 1e-10;

/// Check `|phi_hat(xi)| <= spectral_envelope + 1e-10` pointwise and fit the
/// constants of both theorem-form envelopes along the way.
pub fn verify_forward(spec: &BumpSpec, xi_grid: &[f64]) -> ForwardReport {
    let params = spec.params();
    let mut rows = Vec::with_capacity(xi_grid.len());
    let mut ln_a_star = f64::NEG_INFINITY;
    let mut ln_a_star_inverse = f64::NEG_INFINITY;
    let mut all_pass = true;
    for &xi in xi_grid {
        let abs_spec = bump_spectrum(spec, xi).abs();
        let envelope = spectral_envelope(spec, xi.abs());
        let pass = abs_spec <= envelope + SPECTRUM_SLACK;
        all_pass &= pass;
        let ln_spec = abs_spec.max(1e-300).ln();
        ln_a_star = ln_a_star.max(ln_spec + forward_envelope(&params, 1, xi.abs()));
        ln_a_star_inverse = ln_a_star_inverse.max(ln_spec + inverse_envelope(&params, xi.abs()));
        rows.push(SpectrumCheck {
            xi,
            abs_spec,
            envelope,
            pass,
        });
    }
    ForwardReport {
        rows,
        ln_a_star,
        ln_a_star_inverse,
        all_pass,
    }
}
