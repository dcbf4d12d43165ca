//! Frequency planning: effective interference radius, reuse factors, FCC
//! sphere clusters and greedy-coloring band allocation.
//!
//! Planning assumes free-space propagation, `α = 2`.

mod cells;
mod coloring;
mod export;
mod fcc;

pub use cells::{classify_cells, form_clusters, CellClass, CellClassification, SphereCluster};
pub use coloring::{greedy_frequency_allocation, plan_frequencies, FrequencyPlan, PlanViolation};
pub use export::{write_plan_csv, write_spheres_csv};
pub use fcc::{fcc_packing_efficiency, fcc_sphere_centers};

use crate::analytics::ChannelConfig;
use crate::error::{domain, param, Error, Result};
use crate::special::ln_gamma;

/// Which aUE the radius is sized for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UeCase {
    General,
    Worst,
}

impl std::str::FromStr for UeCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Self::General),
            "worst" => Ok(Self::Worst),
            _ => Err(param(format!("unknown aUE case '{s}', expected general or worst"))),
        }
    }
}

/// Rate target and network size for planning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReuseConfig {
    /// Target rate in nats/s/Hz.
    pub rate_threshold: f64,
    pub n_abs: usize,
    pub radius: f64,
}

impl ReuseConfig {
    pub fn new(rate_threshold: f64, n_abs: usize, radius: f64) -> Result<Self> {
        if !(rate_threshold > 0.0) || !rate_threshold.is_finite() {
            return Err(param(format!("rate threshold must be positive, got {rate_threshold}")));
        }
        crate::distributions::BppParams::new(n_abs, radius)?;
        Ok(Self { rate_threshold, n_abs, radius })
    }

    /// The matching free-space channel.
    pub fn channel(&self) -> ChannelConfig {
        ChannelConfig { alpha: 2.0, n_abs: self.n_abs, radius: self.radius }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(domain(format!("radius must be positive and finite, got {eps}")));
    }
    Ok(())
}

/// `Δ(N) = E[X] ε² / (3N)`, independent of `ε`.
pub fn delta(cfg: &ReuseConfig, case: UeCase) -> Result<f64> {
    let n = cfg.n_abs as f64;
    Ok(match case {
        UeCase::General => 65.0 / (36.0 * n) * (ln_gamma(n + 1.0)? + ln_gamma(10.0 / 3.0)? - ln_gamma(n + 1.0 / 3.0)?).exp(),
        UeCase::Worst => 8.0 / (3.0 * n) * (ln_gamma(n)? + ln_gamma(7.0 / 3.0)? - ln_gamma(n - 2.0 / 3.0)?).exp(),
    })
}

/// Mean CoMP signal power when the four serving aBSs lie within `eps`.
///
/// ```
/// use aircomp::planner::{expected_signal_power, ReuseConfig, UeCase};
/// let cfg = ReuseConfig::new(6.9, 50, 3000.0).unwrap();
/// let a = expected_signal_power(&cfg, UeCase::General, 500.0).unwrap();
/// let b = expected_signal_power(&cfg, UeCase::General, 1000.0).unwrap();
/// assert!((a / b - 4.0).abs() < 1e-12);
/// ```
pub fn expected_signal_power(cfg: &ReuseConfig, case: UeCase, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(3.0 * cfg.n_abs as f64 * delta(cfg, case)? / (eps * eps))
}

/// Mean interference from aBSs outside the ball of radius `eps`:
/// `3 N ε³ / (R³ (R² + R ε + ε²))`.
pub fn expected_interference_outside(cfg: &ReuseConfig, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let r = cfg.radius;
    if eps >= r {
        return Err(domain(format!("radius {eps} must be below R = {r}")));
    }
    Ok(3.0 * cfg.n_abs as f64 * eps.powi(3) / (r.powi(3) * (r * r + r * eps + eps * eps)))
}

/// Left side of the radius equation
/// `(e^Rth - 1) ε⁵ - Δ R³ ε² - Δ R⁴ ε - Δ R⁵`.
pub fn epsilon_polynomial(cfg: &ReuseConfig, case: UeCase, eps: f64) -> Result<f64> {
    let d = delta(cfg, case)?;
    let r = cfg.radius;
    let c5 = cfg.rate_threshold.exp_m1();
    Ok(c5 * eps.powi(5) - d * (r.powi(3) * eps * eps + r.powi(4) * eps + r.powi(5)))
}

/// Root of the radius equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonStar {
    /// Radius in meters, clamped to `R`.
    pub value: f64,
    /// Unclamped root.
    pub root: f64,
    /// `|polynomial(root)| / ((e^Rth - 1) root⁵)`.
    pub relative_residual: f64,
    pub clamped: bool,
}

/// Solves for the effective interference radius by bracketing and bisection.
pub fn solve_epsilon_star(cfg: &ReuseConfig, case: UeCase) -> Result<EpsilonStar> {
    let d = delta(cfg, case)?;
    let c5 = cfg.rate_threshold.exp_m1();
    // dimensionless form in s = ε / R: c5 s⁵ = Δ (s² + s + 1)
    let f = |s: f64| c5 * s.powi(5) - d * (s * s + s + 1.0);
    let (mut lo, mut hi) = (0.0f64, 10.0f64);
    if f(hi) <= 0.0 {
        return Err(Error::Solver(format!("no sign change of the radius equation in (0, 10R] (Δ = {d}, threshold {})", cfg.rate_threshold)));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let s = 0.5 * (lo + hi);
    let root = s * cfg.radius;
    let relative_residual = (f(s) / (c5 * s.powi(5))).abs();
    let clamped = s > 1.0;
    if clamped {
        log::warn!("effective interference radius {root:.1} m exceeds R = {}; using R", cfg.radius);
    }
    Ok(EpsilonStar { value: root.min(cfg.radius), root, relative_residual, clamped })
}

/// `η = ⌈(24/35) N π² (ε/R)³⌉`.
///
/// ```
/// use aircomp::planner::{reuse_factor, ReuseConfig};
/// let cfg = ReuseConfig::new(6.9, 50, 3000.0).unwrap();
/// assert_eq!(reuse_factor(&cfg, 3000.0).unwrap(), 339);
/// assert_eq!(reuse_factor(&cfg, 900.0).unwrap(), 10);
/// ```
pub fn reuse_factor(cfg: &ReuseConfig, eps: f64) -> Result<u64> {
    check_eps(eps)?;
    let x = 24.0 / 35.0 * cfg.n_abs as f64 * std::f64::consts::PI.powi(2) * (eps / cfg.radius).powi(3);
    Ok((x.ceil() as u64).max(1))
}

/// Same-band interferer count `ψ` and equivalent reuse factor `η'` of the
/// hard-core model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MhcppParams {
    pub psi: u64,
    pub eta_prime: u64,
}

/// `ψ = round((N-4) exp(-(N-4)(ε/R)³))`, `η' = round((N-4)/ψ)`, with
/// half-way cases rounded to even and `ψ ≥ 1`.
pub fn mhcpp_params(cfg: &ReuseConfig, eps: f64) -> Result<MhcppParams> {
    check_eps(eps)?;
    let m = (cfg.n_abs - 4) as f64;
    let mut psi = (m * (-m * (eps / cfg.radius).powi(3)).exp()).round_ties_even();
    if psi < 1.0 {
        log::warn!("hard-core thinning leaves no same-band interferer at radius {eps}; using one");
        psi = 1.0;
    }
    let eta_prime = (m / psi).round_ties_even().max(1.0);
    Ok(MhcppParams { psi: psi as u64, eta_prime: eta_prime as u64 })
}

/// Rate of a general aUE whose same-band interferers follow the hard-core
/// model with equivalent reuse factor `eta_prime`.
pub fn rate_mhcpp(cfg: &ChannelConfig, eta_prime: u64, samples: usize, seed: u64) -> Result<crate::stats::MetricEstimate> {
    if eta_prime < 1 {
        return Err(param("equivalent reuse factor must be >= 1"));
    }
    crate::analytics::thinned_rate(cfg, eta_prime as f64, samples, seed)
}
