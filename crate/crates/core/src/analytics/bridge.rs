use crate::error::Result;
use crate::quadrature::{integrate, QuadConfig, QuadResult};

/// Ergodic rate from a coverage curve: `∫_0^∞ P(γ) / (1 + γ) dγ`, with
/// `γ` the linear SIR threshold. Integrated on `(0, 1)` through
/// `γ = t / (1 - t)`.
///
/// ```
/// use aircomp::analytics::rate_from_coverage;
/// use aircomp::quadrature::QuadConfig;
/// // SIR ~ Exp(1): P(γ) = e^-γ, E[ln(1 + SIR)] = e E_1(1)
/// let r = rate_from_coverage(|g| Ok((-g).exp()), QuadConfig::default()).unwrap();
/// assert!((r.value - 0.596_347_362_323_194).abs() < 1e-10);
/// ```
pub fn rate_from_coverage<P>(mut coverage: P, cfg: QuadConfig) -> Result<QuadResult>
where
    P: FnMut(f64) -> Result<f64>,
{
    let mut err = None;
    let res = integrate(
        |t| {
            if err.is_some() {
                return 0.0;
            }
            let u = 1.0 - t;
            match coverage(t / u) {
                Ok(p) => p / u,
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            }
        },
        0.0,
        1.0,
        cfg,
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(res),
    }
}
