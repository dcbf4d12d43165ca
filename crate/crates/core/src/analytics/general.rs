use super::{conditional_rate, signal_power, ChannelConfig, GammaApprox, InterferenceField};
use crate::error::{param, Result};
use crate::rng;
use crate::special;
use crate::stats::{mean_and_stderr, EstimateKind, MetricEstimate};
use rayon::prelude::*;

const MIN_OUTER_SAMPLES: usize = 1000;
const INNER_REL_TOL: f64 = 1e-7;

fn check_samples(n: usize) -> Result<()> {
    if n < MIN_OUTER_SAMPLES {
        return Err(param(format!("need at least {MIN_OUTER_SAMPLES} outer samples, got {n}")));
    }
    Ok(())
}

fn averaged_rate(cfg: &ChannelConfig, field: InterferenceField, prefactor: f64, samples: usize, seed: u64) -> Result<MetricEstimate> {
    check_samples(samples)?;
    let bpp = cfg.bpp();
    let values = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::substream(seed, i);
            let d = bpp.sample_four_nearest(&mut rng)?;
            let s = signal_power(&d.r, cfg.alpha);
            Ok(prefactor * conditional_rate(&field, d.r[3], s, INNER_REL_TOL)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    MetricEstimate::from_samples(&values)
}

/// Ergodic rate of a general aUE served by its four nearest aBSs.
///
/// The inner Laplace-domain integral is evaluated by quadrature; the outer
/// expectation over the ordered distances is averaged over `samples`
/// draws, so the result carries a Monte Carlo standard error.
pub fn rate_general(cfg: &ChannelConfig, samples: usize, seed: u64) -> Result<MetricEstimate> {
    averaged_rate(cfg, cfg.interference_field(), 1.0, samples, seed)
}

/// Rate with frequency reuse factor `eta`: bandwidth shrinks to `1/eta`
/// and only `(N - 4)/eta` aBSs share the serving band.
pub fn thinned_rate(cfg: &ChannelConfig, eta: f64, samples: usize, seed: u64) -> Result<MetricEstimate> {
    let field = cfg.thinned_field(eta)?;
    averaged_rate(cfg, field, 1.0 / eta, samples, seed)
}

/// Draws of `(S, Gamma law of I)` for the general aUE, reusable across
/// many SIR thresholds.
#[derive(Debug, Clone)]
pub struct GeneralCoverageModel {
    draws: Vec<(f64, GammaApprox)>,
}

impl GeneralCoverageModel {
    pub fn draw(cfg: &ChannelConfig, samples: usize, seed: u64) -> Result<Self> {
        check_samples(samples)?;
        let bpp = cfg.bpp();
        let field = cfg.interference_field();
        let draws = (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng::substream(seed, i);
                let d = bpp.sample_four_nearest(&mut rng)?;
                Ok((signal_power(&d.r, cfg.alpha), field.gamma_approx(d.r[3])?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { draws })
    }

    /// `P(S/I > γ)` for a linear threshold `γ`.
    pub fn coverage(&self, gamma: f64) -> Result<MetricEstimate> {
        if !(gamma > 0.0) {
            return Err(param(format!("SIR threshold must be positive, got {gamma}")));
        }
        let vals = self
            .draws
            .iter()
            .map(|(s, g)| special::regularized_lower_gamma(g.shape, s / (gamma * g.scale)))
            .collect::<Result<Vec<f64>>>()?;
        let (m, se) = mean_and_stderr(&vals)?;
        Ok(MetricEstimate { value: m, error: se, kind: EstimateKind::MonteCarlo { trials: vals.len() as u64 } })
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }
}

/// Coverage probability `P(SIR > γ)` of a general aUE, with the
/// interference replaced by its moment-matched Gamma law.
pub fn coverage_general(cfg: &ChannelConfig, gamma: f64, samples: usize, seed: u64) -> Result<MetricEstimate> {
    GeneralCoverageModel::draw(cfg, samples, seed)?.coverage(gamma)
}
