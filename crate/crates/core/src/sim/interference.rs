use crate::analytics::ChannelConfig;
use crate::error::{param, Result};
use crate::geometry::{delaunay, sample_bpp_with};
use crate::rng;
use crate::stats::Histogram;
use rand::Rng;
use rayon::prelude::*;

/// Where the interference is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterferenceSite {
    /// A typical aUE at the origin, interferers i.i.d. beyond `d`.
    Origin,
    /// The circumcenter of a Delaunay cell with circumradius near `d`.
    Circumcenter,
}

/// Interference at the origin from `N - 4` aBSs uniform beyond `d`.
pub fn origin_interference_samples(cfg: &ChannelConfig, d: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
    let bpp = cfg.bpp();
    let n = cfg.n_abs - 4;
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::substream(seed, i);
            Ok(bpp.sample_interferers_with(&mut rng, d, n)?.iter().map(|x| x.powf(-cfg.alpha)).sum())
        })
        .collect()
}

/// Interference at a cell circumcenter and, for the same serving
/// distance, under the origin model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferencePair {
    pub circumradius: f64,
    pub at_circumcenter: f64,
    pub origin_model: f64,
}

/// For each realization, picks a random cell whose circumcenter lies in
/// the ball and records the interference there from the non-vertex aBSs,
/// paired with an origin-model draw at the same distance.
pub fn vertex_vs_origin_interference(cfg: &ChannelConfig, trials: u64, seed: u64) -> Result<Vec<InterferencePair>> {
    let bpp = cfg.bpp();
    let out = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Option<InterferencePair>> {
            let mut rng = rng::substream(seed, t);
            let net = sample_bpp_with(&mut rng, cfg.n_abs, cfg.radius)?;
            let tess = delaunay(&net)?;
            for _ in 0..super::CIRCUMCENTER_RETRIES {
                let k = rng.random_range(0..tess.tetrahedra.len());
                let Ok(s) = tess.circumsphere(k) else { continue };
                if s.center.norm() > cfg.radius || s.radius >= cfg.radius {
                    continue;
                }
                let tet = tess.tetrahedra[k];
                let at: f64 = net
                    .points
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !tet.contains_vertex(*i))
                    .map(|(_, p)| p.distance(s.center).powf(-cfg.alpha))
                    .sum();
                let model: f64 =
                    bpp.sample_interferers_with(&mut rng, s.radius, cfg.n_abs - 4)?.iter().map(|x| x.powf(-cfg.alpha)).sum();
                return Ok(Some(InterferencePair { circumradius: s.radius, at_circumcenter: at, origin_model: model }));
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(out.into_iter().flatten().collect())
}

/// Normalized histogram of the interference at `site` for serving
/// distance `d`. Circumcenter samples keep cells with circumradius within
/// 10% of `d`.
pub fn interference_histogram(
    cfg: &ChannelConfig,
    site: InterferenceSite,
    d: f64,
    samples: usize,
    bins: usize,
    seed: u64,
) -> Result<Histogram> {
    if bins < 10 {
        return Err(param(format!("need at least 10 bins, got {bins}")));
    }
    let values = match site {
        InterferenceSite::Origin => origin_interference_samples(cfg, d, samples, seed)?,
        InterferenceSite::Circumcenter => {
            let pairs = vertex_vs_origin_interference(cfg, samples as u64, seed)?;
            pairs.into_iter().filter(|p| (p.circumradius - d).abs() <= 0.1 * d).map(|p| p.at_circumcenter).collect()
        }
    };
    Histogram::from_samples(&values, bins)
}
