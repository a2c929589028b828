//! Outage probability, SNR distribution and ergodic capacity by numerical
//! integration or by the closed-form high-SNR approximation.
//!
//! Every protocol and both modes go through the same engines; only the
//! constants `(a, b, c, d)` change. With `z` the source → relay gain and
//! `s(z) = (a z + b) / (c z (z − d/c) λ_g)` the relay → destination term,
//!
//! ```text
//! P(γ_D < γ★) = 1 − (1/λ_h) ∫_{d/c}^∞ exp(−z/λ_h − s(z)) dz
//! ```
//!
//! Internally the integration runs over `y = (z − d/c)/λ_h`, which pulls
//! `exp(−d/(c λ_h))` out front and makes the remaining kernel scale-free.

use std::cell::RefCell;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Protocol, SystemParams};
use crate::snr::noise_decomposition;
use crate::specfun::{exp_or_zero, integrate, integrate_semi_infinite, k0_k1, x_k1, QuadratureSettings};

/// How an analytic quantity is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticMethod {
    /// Numerical integration of the exact expression.
    Exact,
    /// Closed form obtained by dropping `b`, in terms of K₀ and K₁.
    HighSnrApprox,
}

impl AnalyticMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            AnalyticMethod::Exact => "exact",
            AnalyticMethod::HighSnrApprox => "high_snr_approx",
        }
    }
}

/// The constants that parameterize every analytic formula at one SNR point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// √(4a / (c λ_h λ_g))
    pub u: f64,
}

impl IntegralConstants {
    /// Recomputes `u` after `a` or `c` have been edited.
    pub fn with_u(mut self, params: &SystemParams) -> Self {
        self.u = (4.0 * self.a / (self.c * params.fading_mean_sr * params.fading_mean_rd)).sqrt();
        self
    }

    /// Lower limit `d/c` of the source → relay gain.
    pub fn lower_limit(&self) -> f64 {
        self.d / self.c
    }
}

/// Constants at SNR point `snr_point`: the threshold γ₀ for outage, or the
/// running variable γ for the SNR distribution.
///
/// Returns [`Error::DegenerateConstants`] when `c = 0`, i.e. the relay
/// harvests nothing.
pub fn constants(params: &SystemParams, protocol: &Protocol, snr_point: f64) -> Result<IntegralConstants> {
    if !(snr_point > 0.0 && snr_point.is_finite()) {
        return Err(Error::invalid(
            "snr_point",
            format!("must be finite and > 0, got {snr_point}"),
        ));
    }
    let noise = noise_decomposition(params, protocol);
    let sr = noise.relay_total_var;
    let sd = noise.dest_total_var;
    let ps = params.source_power;
    let eta = params.harvesting_efficiency;
    let l1 = params.path_loss_sr();
    let l2 = params.path_loss_rd();
    let g = snr_point;

    let a0 = ps * l1 * l2 * sd * g;
    let b0 = l1 * l1 * l2 * sr * sd * g;
    let d0 = eta * ps * l1 * sr * g;
    let (a, b, c, d) = match protocol {
        Protocol::Tsr(alpha) => {
            let x = alpha.get();
            (a0 * (1.0 - x), b0 * (1.0 - x), 2.0 * eta * ps * ps * x, 2.0 * d0 * x)
        }
        Protocol::Psr(rho) => {
            let x = rho.get();
            (a0 * (1.0 - x), b0, eta * ps * ps * x * (1.0 - x), d0 * x)
        }
        Protocol::Ideal => (a0, b0, eta * ps * ps, d0),
    };
    if c <= 0.0 {
        return Err(Error::DegenerateConstants);
    }
    if ![a, b, c, d].iter().all(|v| v.is_finite()) {
        return Err(Error::Unsupported(format!(
            "integral constants overflow at SNR point {snr_point:e}: a = {a:e}, b = {b:e}, c = {c:e}, d = {d:e}"
        )));
    }
    Ok(IntegralConstants { a, b, c, d, u: 0.0 }.with_u(params))
}

/// A clamped analytic result with its numerical error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticValue {
    pub value: f64,
    pub abs_error: f64,
    /// Set when clamping moved the raw value by more than 10·rel_tol.
    pub note: Option<String>,
}

impl AnalyticValue {
    fn exact(value: f64) -> Self {
        AnalyticValue {
            value,
            abs_error: 0.0,
            note: None,
        }
    }

    fn clamped(raw: f64, abs_error: f64, lo: f64, hi: f64, settings: &QuadratureSettings) -> Self {
        let value = raw.clamp(lo, hi);
        let excursion = (raw - value).abs();
        let note = (excursion > 10.0 * settings.rel_tol * value.abs().max(1.0))
            .then(|| format!("raw value {raw:e} clamped to {value}"));
        AnalyticValue { value, abs_error, note }
    }
}

fn lower_offset(k: &IntegralConstants, params: &SystemParams) -> f64 {
    1e-12 * k.lower_limit().max(1.0) / params.fading_mean_sr
}

/// exponent pieces at offset `y` (in units of λ_h): returns (s, z/x)
#[inline]
fn relay_term(k: &IntegralConstants, params: &SystemParams, y: f64) -> (f64, f64) {
    let x = params.fading_mean_sr * y;
    let z = k.lower_limit() + x;
    let s = (k.a * z + k.b) / (k.c * z * x * params.fading_mean_rd);
    (s, z / x)
}

/// P(γ_D < γ★) from precomputed constants.
pub fn cdf_from_constants(
    k: &IntegralConstants,
    params: &SystemParams,
    method: AnalyticMethod,
    settings: &QuadratureSettings,
) -> Result<AnalyticValue> {
    let front = exp_or_zero(-k.lower_limit() / params.fading_mean_sr);
    let (survival, abs_error) = match method {
        AnalyticMethod::HighSnrApprox => (front * x_k1(k.u), 0.0),
        AnalyticMethod::Exact => {
            if front == 0.0 {
                (0.0, 0.0)
            } else {
                let kernel = |y: f64| {
                    let (s, _) = relay_term(k, params, y);
                    exp_or_zero(-y - s)
                };
                let r = integrate_semi_infinite(kernel, lower_offset(k, params), settings)?;
                (front * r.value, front * r.abs_error)
            }
        }
    };
    Ok(AnalyticValue::clamped(1.0 - survival, abs_error, 0.0, 1.0, settings))
}

/// Density of γ_D at `gamma` from the constants evaluated at that same `gamma`.
pub fn pdf_from_constants(
    k: &IntegralConstants,
    params: &SystemParams,
    gamma: f64,
    method: AnalyticMethod,
    settings: &QuadratureSettings,
) -> Result<AnalyticValue> {
    let lh = params.fading_mean_sr;
    let front = exp_or_zero(-k.lower_limit() / lh);
    if front == 0.0 {
        return Ok(AnalyticValue::exact(0.0));
    }
    let closed_form = || {
        let u = k.u;
        let bessel_part = if u == 0.0 {
            0.0
        } else {
            u * u * k0_k1(u).0 / (2.0 * gamma)
        };
        front * (bessel_part + k.d * x_k1(u) / (gamma * k.c * lh))
    };
    // With a = b = 0 the closed form is exact.
    if method == AnalyticMethod::HighSnrApprox || (k.a == 0.0 && k.b == 0.0) {
        return Ok(AnalyticValue::clamped(closed_form(), 0.0, 0.0, f64::INFINITY, settings));
    }
    let kernel = |y: f64| {
        let (s, ratio) = relay_term(k, params, y);
        let e = exp_or_zero(-y - s);
        if e == 0.0 {
            0.0
        } else {
            s * ratio * e
        }
    };
    let r = integrate_semi_infinite(kernel, lower_offset(k, params), settings)?;
    let scale = front / gamma;
    Ok(AnalyticValue::clamped(
        scale * r.value,
        scale * r.abs_error,
        0.0,
        f64::INFINITY,
        settings,
    ))
}

/// Outage probability at the rate threshold γ₀ = 2^R − 1.
pub fn outage_probability(params: &SystemParams, protocol: &Protocol, method: AnalyticMethod) -> Result<f64> {
    outage_probability_with(params, protocol, method, &QuadratureSettings::default()).map(|v| v.value)
}

pub fn outage_probability_with(
    params: &SystemParams,
    protocol: &Protocol,
    method: AnalyticMethod,
    settings: &QuadratureSettings,
) -> Result<AnalyticValue> {
    snr_cdf_with(params, protocol, params.snr_threshold()?, method, settings)
}

/// P(γ_D < γ), evaluated exactly.
pub fn snr_cdf(params: &SystemParams, protocol: &Protocol, gamma: f64) -> Result<f64> {
    snr_cdf_with(
        params,
        protocol,
        gamma,
        AnalyticMethod::Exact,
        &QuadratureSettings::default(),
    )
    .map(|v| v.value)
}

pub fn snr_cdf_with(
    params: &SystemParams,
    protocol: &Protocol,
    gamma: f64,
    method: AnalyticMethod,
    settings: &QuadratureSettings,
) -> Result<AnalyticValue> {
    let params = params.validate()?;
    let settings = settings.validate()?;
    if gamma == 0.0 {
        return Ok(AnalyticValue::exact(0.0));
    }
    match constants(&params, protocol, gamma) {
        Ok(k) => cdf_from_constants(&k, &params, method, &settings),
        Err(Error::DegenerateConstants) => Ok(AnalyticValue::exact(1.0)),
        Err(e) => Err(e),
    }
}

/// Density of γ_D at `gamma > 0`. Degenerate constants are an error here
/// since γ_D is then identically zero and has no density.
pub fn snr_pdf(params: &SystemParams, protocol: &Protocol, gamma: f64, method: AnalyticMethod) -> Result<f64> {
    snr_pdf_with(params, protocol, gamma, method, &QuadratureSettings::default()).map(|v| v.value)
}

pub fn snr_pdf_with(
    params: &SystemParams,
    protocol: &Protocol,
    gamma: f64,
    method: AnalyticMethod,
    settings: &QuadratureSettings,
) -> Result<AnalyticValue> {
    let params = params.validate()?;
    let settings = settings.validate()?;
    let k = constants(&params, protocol, gamma)?;
    pdf_from_constants(&k, &params, gamma, method, &settings)
}

/// Ergodic capacity 𝔼[log₂(1 + γ_D)] in bits/sec/Hz.
pub fn ergodic_capacity(params: &SystemParams, protocol: &Protocol, method: AnalyticMethod) -> Result<f64> {
    ergodic_capacity_with(params, protocol, method, &QuadratureSettings::default()).map(|v| v.value)
}

const FIRST_CAPACITY_PIECE: f64 = 64.0;

/// The outer γ-integral runs over [0, Γ₀], then over [Γ, 2Γ] pieces until a
/// piece adds less than `rel_tol` of the running total. Γ₀ is 64 or the SNR
/// scale of the link, whichever is larger. Inner integrals use tolerances ten
/// times tighter.
pub fn ergodic_capacity_with(
    params: &SystemParams,
    protocol: &Protocol,
    method: AnalyticMethod,
    settings: &QuadratureSettings,
) -> Result<AnalyticValue> {
    let params = params.validate()?;
    let settings = settings.validate()?;
    let unit = match constants(&params, protocol, 1.0) {
        Err(Error::DegenerateConstants) => return Ok(AnalyticValue::exact(0.0)),
        Err(e) => return Err(e),
        Ok(k) => k,
    };
    // a, b, d and u² are linear in γ
    let scale = (1.0 / (unit.u * unit.u)).min(unit.c * params.fading_mean_sr / unit.d);
    let first_piece = if scale.is_finite() {
        FIRST_CAPACITY_PIECE.max(scale)
    } else {
        FIRST_CAPACITY_PIECE
    };
    let inner = settings.tightened(10.0);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |gamma: f64| {
        let density =
            constants(&params, protocol, gamma).and_then(|k| pdf_from_constants(&k, &params, gamma, method, &inner));
        match density {
            Ok(v) => v.value * (gamma.ln_1p() / LN_2),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let take_failure = || failure.borrow_mut().take();

    let first = integrate(integrand, 0.0, first_piece, &settings);
    if let Some(e) = take_failure() {
        return Err(e);
    }
    let first = first?;
    let mut total = first.value;
    let mut abs_error = first.abs_error;
    let mut upper = first_piece;
    let mut converged = false;
    for _ in 0..settings.max_doublings {
        let piece = integrate(integrand, upper, 2.0 * upper, &settings);
        if let Some(e) = take_failure() {
            return Err(e);
        }
        let piece = piece?;
        total += piece.value;
        abs_error += piece.abs_error;
        upper *= 2.0;
        if piece.value.abs() <= settings.rel_tol * total.abs() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            value: total,
            abs_error,
            subdivisions: settings.max_doublings,
        });
    }
    Ok(AnalyticValue::clamped(total, abs_error, 0.0, f64::INFINITY, &settings))
}
