use super::{conditional_rate, ChannelConfig, InterferenceField};
use crate::error::{param, Result};
use crate::quadrature::{integrate_panels, QuadConfig};
use crate::special;
use crate::stats::MetricEstimate;

const OUTER: QuadConfig = QuadConfig { abs_tol: 1e-14, rel_tol: 1e-8, max_subdivisions: 4000 };
const INNER_REL_TOL: f64 = 1e-10;

/// Integrates `g(x)` against the equidistant density of a worst-case aUE.
fn against_equidistant<G: FnMut(f64) -> Result<f64>>(cfg: &ChannelConfig, mut g: G) -> Result<MetricEstimate> {
    let bpp = cfg.bpp();
    let r = cfg.radius;
    let points: Vec<f64> = (0..=32).map(|i| r * i as f64 / 32.0).collect();
    let mut err = None;
    let res = integrate_panels(
        |x| {
            if err.is_some() || x <= 0.0 || x >= r * (1.0 - 1e-6) {
                return 0.0;
            }
            let w = match bpp.equidistant_pdf(4, x) {
                Ok(w) => w,
                Err(e) => {
                    err = Some(e);
                    return 0.0;
                }
            };
            if w < 1e-300 {
                return 0.0;
            }
            match g(x) {
                Ok(v) => w * v,
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            }
        },
        &points,
        OUTER,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(MetricEstimate::analytic(res.value, res.error))
}

fn worst_rate_for(cfg: &ChannelConfig, field: InterferenceField, prefactor: f64) -> Result<MetricEstimate> {
    let a = cfg.alpha;
    let est = against_equidistant(cfg, |x| conditional_rate(&field, x, 16.0 * x.powf(-a), INNER_REL_TOL))?;
    Ok(MetricEstimate::analytic(prefactor * est.value, prefactor * est.error))
}

/// Ergodic rate of a worst-case aUE, equidistant at `x` from its four
/// serving aBSs (signal power `16 x^-α`), averaged over the law of `x`.
pub fn rate_worst(cfg: &ChannelConfig) -> Result<MetricEstimate> {
    worst_rate_for(cfg, cfg.interference_field(), 1.0)
}

/// Worst-case rate with reuse factor `eta`.
pub fn rate_worst_thinned(cfg: &ChannelConfig, eta: f64) -> Result<MetricEstimate> {
    let field = cfg.thinned_field(eta)?;
    worst_rate_for(cfg, field, 1.0 / eta)
}

/// Coverage of a worst-case aUE under the Gamma interference law.
pub fn coverage_worst(cfg: &ChannelConfig, gamma: f64) -> Result<MetricEstimate> {
    if !(gamma > 0.0) {
        return Err(param(format!("SIR threshold must be positive, got {gamma}")));
    }
    let field = cfg.interference_field();
    let a = cfg.alpha;
    let est = against_equidistant(cfg, |x| {
        let g = field.gamma_approx(x)?;
        special::regularized_lower_gamma(g.shape, 16.0 * x.powf(-a) / (gamma * g.scale))
    })?;
    Ok(MetricEstimate { value: est.value.clamp(0.0, 1.0), ..est })
}
