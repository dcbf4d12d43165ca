//! Closed-form and semi-analytic rate and coverage for a CoMP aUE.
//!
//! The serving set is the four nearest aBSs, combined coherently, so the
//! received signal power is `(Σ r_i^(-α/2))²`. Every other aBS interferes
//! with power `r^(-α)`. Rates are in nats per channel use.

mod bridge;
mod field;
mod general;
mod ppp;
mod worst;

pub use bridge::rate_from_coverage;
pub use field::{power_integral, GammaApprox, InterferenceField};
pub use general::{coverage_general, rate_general, thinned_rate, GeneralCoverageModel};
pub use ppp::{mean_total_interference_ppp, PppInterference};
pub use worst::{coverage_worst, rate_worst, rate_worst_thinned};

use crate::distributions::BppParams;
use crate::error::{domain, param, Result};
use crate::quadrature::{integrate_panels, QuadConfig};

/// Path-loss exponent, number of aBSs and ball radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub alpha: f64,
    pub n_abs: usize,
    pub radius: f64,
}

impl ChannelConfig {
    /// Requires `α > 0`, `N ≥ 5`, `R > 0`.
    pub fn new(alpha: f64, n_abs: usize, radius: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(param(format!("path-loss exponent must be positive, got {alpha}")));
        }
        BppParams::new(n_abs, radius)?;
        Ok(Self { alpha, n_abs, radius })
    }

    pub fn bpp(&self) -> BppParams {
        BppParams { n_abs: self.n_abs, radius: self.radius }
    }

    /// The `N - 4` non-serving aBSs.
    pub fn interference_field(&self) -> InterferenceField {
        InterferenceField { alpha: self.alpha, radius: self.radius, interferers: (self.n_abs - 4) as f64 }
    }

    /// The interference field after thinning by a reuse factor `eta`.
    pub fn thinned_field(&self, eta: f64) -> Result<InterferenceField> {
        if !(eta >= 1.0) || !eta.is_finite() {
            return Err(param(format!("reuse factor must be >= 1, got {eta}")));
        }
        Ok(InterferenceField { interferers: (self.n_abs - 4) as f64 / eta, ..self.interference_field() })
    }
}

/// Coherent CoMP signal power `(Σ r_i^(-α/2))²`.
pub fn signal_power(distances: &[f64], alpha: f64) -> f64 {
    let a: f64 = distances.iter().map(|r| r.powf(-alpha / 2.0)).sum();
    a * a
}

/// Laplace transform of the deterministic signal power `S`: `e^(-z S)`.
pub fn mgf_signal_general(distances: &[f64], alpha: f64, z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(domain(format!("MGF argument must be non-negative, got {z}")));
    }
    Ok((-z * signal_power(distances, alpha)).exp())
}

/// Laplace transform of the interference from the `N - 4` aBSs beyond `d4`.
pub fn mgf_interference_general(cfg: &ChannelConfig, d4: f64, z: f64) -> Result<f64> {
    cfg.interference_field().mgf(d4, z)
}

/// Mean and variance of the interference beyond `d`.
pub fn interference_moments(cfg: &ChannelConfig, d: f64) -> Result<(f64, f64)> {
    cfg.interference_field().moments(d)
}

/// Moment-matched Gamma law of the interference beyond `d`.
pub fn gamma_approx_params(cfg: &ChannelConfig, d: f64) -> Result<GammaApprox> {
    cfg.interference_field().gamma_approx(d)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Conditional ergodic rate `E[ln(1 + S/I) | S, d]` for a deterministic
/// signal power `s` and interference field beyond `d`:
/// `∫ (1 - e^(-t)) M_I(t/s) dt / t`, integrated in `ln t`.
pub fn conditional_rate(field: &InterferenceField, d: f64, s: f64, rel_tol: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain(format!("signal power must be positive and finite, got {s}")));
    }
    if field.interferers <= 0.0 {
        return Err(crate::Error::Divergent("rate is unbounded without interferers".into()));
    }
    let u_lo = -28.0f64; // below this, 1 - e^-t ≈ t and M_I ≈ 1
    let tail = u_lo.exp();
    // M_I(z) <= exp(-z n R^-α); beyond z_hi the integrand is below 1e-17
    let z_hi = 40.0 * field.radius.powf(field.alpha) / field.interferers;
    let u_hi = (s * z_hi).ln();
    if u_hi <= u_lo {
        return Ok(tail);
    }
    let u_mid = std::f64::consts::LN_2.ln();
    let mut points = vec![u_lo];
    let mut u = u_lo;
    while u + 3.0 < u_hi {
        u += 3.0;
        if (u - u_mid).abs() > 0.5 {
            points.push(u);
        }
    }
    if u_mid > u_lo && u_mid < u_hi {
        points.push(u_mid);
    }
    points.push(u_hi);
    points.sort_by(f64::total_cmp);
    let mut err = None;
    let res = integrate_panels(
        |u| {
            let t = u.exp();
            match field.mgf(d, t / s) {
                Ok(m) => -(-t).exp_m1() * m,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        },
        &points,
        QuadConfig { abs_tol: 1e-15, rel_tol, max_subdivisions: 4000 },
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(res.value + tail)
}
