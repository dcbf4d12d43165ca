//! Monte Carlo simulation of the SIR seen by an aUE.
//!
//! Trial `t` of a run with seed `s` draws everything from the substream
//! `(s, t)`, so results are reproducible and independent of thread count,
//! and two configurations with the same seed see the same networks.

mod compare;
mod interference;
pub mod report;

pub use compare::{compare_schemes, SchemeComparison};
pub use interference::{interference_histogram, origin_interference_samples, vertex_vs_origin_interference, InterferencePair, InterferenceSite};

use crate::analytics::{db_to_linear, ChannelConfig};
use crate::error::{param, Error, Result};
use crate::geometry::{delaunay, sample_bpp_with, NetworkRealization, Point3, Tetrahedralization};
use crate::planner::{plan_frequencies, ReuseConfig, UeCase};
use crate::rng::{self, SimRng};
use crate::stats::{mean_and_stderr, EstimateKind, MetricEstimate};
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rayon::prelude::*;

/// Attempts at finding a cell whose circumcenter lies in the ball.
pub const CIRCUMCENTER_RETRIES: usize = 50;

/// How the serving aBSs are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Association {
    /// Vertices of the Delaunay cell containing the aUE.
    DelaunayComp,
    /// Four nearest aBSs.
    Nearest4Comp,
    /// Nearest aBS only, no cooperation.
    VoronoiNoComp,
    /// `n` nearest aBSs.
    DynamicComp(usize),
    /// aUE at the circumcenter of a random Delaunay cell, served by its vertices.
    WorstCaseCircumcenter,
}

impl Association {
    pub fn name(&self) -> String {
        match self {
            Self::DelaunayComp => "delaunay_comp".into(),
            Self::Nearest4Comp => "nearest4_comp".into(),
            Self::VoronoiNoComp => "voronoi_no_comp".into(),
            Self::DynamicComp(n) => format!("dynamic_comp_{n}"),
            Self::WorstCaseCircumcenter => "worst_case_circumcenter".into(),
        }
    }

    fn needs_tessellation(&self) -> bool {
        matches!(self, Self::DelaunayComp | Self::WorstCaseCircumcenter)
    }
}

impl std::fmt::Display for Association {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name())
    }
}

impl std::str::FromStr for Association {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delaunay_comp" => Ok(Self::DelaunayComp),
            "nearest4_comp" => Ok(Self::Nearest4Comp),
            "voronoi_no_comp" => Ok(Self::VoronoiNoComp),
            "worst_case_circumcenter" => Ok(Self::WorstCaseCircumcenter),
            _ => {
                let n = s
                    .strip_prefix("dynamic_comp_")
                    .or_else(|| s.strip_prefix("dynamic_comp(").and_then(|r| r.strip_suffix(')')))
                    .and_then(|n| n.parse::<usize>().ok());
                n.map(Self::DynamicComp).ok_or_else(|| {
                    param(format!(
                        "unknown mode '{s}'; expected delaunay_comp, nearest4_comp, voronoi_no_comp, dynamic_comp_<n> or worst_case_circumcenter"
                    ))
                })
            }
        }
    }
}

/// Which non-serving aBSs share the serving band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencyReuse {
    /// `eta` bands assigned at random: a uniformly chosen subset of about
    /// `(N - n_serving)/eta` aBSs interferes, and the aUE gets `1/eta` of
    /// the bandwidth.
    RandomBands { eta: f64 },
    /// A greedy-coloring plan is built on every realization; interferers
    /// are the vertices of cells with the serving cell's color.
    Planned { rate_threshold: f64, case: UeCase, restarts: u32, radius_override: Option<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub channel: ChannelConfig,
    pub mode: Association,
    pub trials: u64,
    pub seed: u64,
    /// SIR thresholds in dB.
    pub gamma_grid_db: Vec<f64>,
    pub reuse: Option<FrequencyReuse>,
}

impl SimConfig {
    pub fn new(channel: ChannelConfig, mode: Association, trials: u64, seed: u64, gamma_grid_db: Vec<f64>) -> Result<Self> {
        let cfg = Self { channel, mode, trials, seed, gamma_grid_db, reuse: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_reuse(mut self, reuse: FrequencyReuse) -> Result<Self> {
        self.reuse = Some(reuse);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(param("need at least one trial"));
        }
        if self.gamma_grid_db.iter().any(|g| !g.is_finite()) {
            return Err(param("SIR thresholds must be finite"));
        }
        if let Association::DynamicComp(n) = self.mode {
            if n == 0 || n >= self.channel.n_abs {
                return Err(param(format!("dynamic CoMP size {n} must lie in 1..{}", self.channel.n_abs)));
            }
        }
        match self.reuse {
            Some(FrequencyReuse::RandomBands { eta }) if !(eta >= 1.0) || !eta.is_finite() => {
                Err(param(format!("reuse factor must be >= 1, got {eta}")))
            }
            Some(FrequencyReuse::Planned { restarts, .. }) if restarts == 0 => Err(param("planned reuse needs restarts >= 1")),
            Some(FrequencyReuse::Planned { .. }) if !self.mode.needs_tessellation() => Err(param(format!(
                "planned reuse needs a cell-based mode (delaunay_comp or worst_case_circumcenter), got {}",
                self.mode
            ))),
            _ => Ok(()),
        }
    }
}

/// SIR of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct SirSample {
    pub trial: u64,
    /// Seed of the run; with `trial` it identifies the realization.
    pub realization_seed: u64,
    pub sir: f64,
    pub serving_ids: Vec<usize>,
    /// Largest serving distance.
    pub serving_distance: f64,
    pub bandwidth_fraction: f64,
}

impl SirSample {
    /// `bandwidth_fraction · ln(1 + SIR)`.
    pub fn rate(&self) -> f64 {
        self.bandwidth_fraction * self.sir.ln_1p()
    }
}

/// Why a trial produced no sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    /// No cell circumcenter inside the ball after the retry budget.
    NoCircumcenter,
    /// The aUE lies outside the convex hull of the aBSs.
    OutsideHull,
    /// No aBS shares the serving band.
    NoInterferer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    /// Samples in trial order; skipped trials are absent.
    pub samples: Vec<SirSample>,
    pub skipped: Vec<(u64, SkipReason)>,
    /// Delaunay trials where the aUE fell outside the hull and the four
    /// nearest aBSs served instead.
    pub hull_fallbacks: u64,
}

enum Trial {
    Sample(SirSample, bool),
    Skip(SkipReason),
}

fn nearest(points: &[Point3], at: Point3, k: usize) -> Vec<usize> {
    let mut idx: Vec<(f64, usize)> = points.iter().enumerate().map(|(i, p)| (p.distance(at), i)).collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < idx.len() {
        idx.select_nth_unstable_by(k, cmp);
        idx.truncate(k);
    }
    idx.sort_by(cmp);
    idx.into_iter().map(|(_, i)| i).collect()
}

fn pick_circumcenter_cell(tess: &Tetrahedralization, rng: &mut SimRng) -> Option<(usize, Point3)> {
    if tess.tetrahedra.is_empty() {
        return None;
    }
    for _ in 0..CIRCUMCENTER_RETRIES {
        let t = rng.random_range(0..tess.tetrahedra.len());
        if let Ok(s) = tess.circumsphere(t) {
            if s.center.norm() <= tess.network.radius_m {
                return Some((t, s.center));
            }
        }
    }
    None
}

fn run_trial(cfg: &SimConfig, trial: u64) -> Result<Trial> {
    let ch = &cfg.channel;
    let mut rng = rng::substream(cfg.seed, trial);
    let net: NetworkRealization = sample_bpp_with(&mut rng, ch.n_abs, ch.radius)?;
    let pts = &net.points;
    let tess = if cfg.mode.needs_tessellation() { Some(delaunay(&net)?) } else { None };

    let mut fallback = false;
    let (ue, serving, cell) = match cfg.mode {
        Association::Nearest4Comp => (Point3::ORIGIN, nearest(pts, Point3::ORIGIN, 4), None),
        Association::VoronoiNoComp => (Point3::ORIGIN, nearest(pts, Point3::ORIGIN, 1), None),
        Association::DynamicComp(n) => (Point3::ORIGIN, nearest(pts, Point3::ORIGIN, n), None),
        Association::DelaunayComp => {
            let tess = tess.as_ref().expect("tessellation built");
            match tess.locate_tetrahedron(Point3::ORIGIN) {
                Some(t) => (Point3::ORIGIN, tess.tetrahedra[t].vertex_ids.to_vec(), Some(t)),
                None => {
                    if matches!(cfg.reuse, Some(FrequencyReuse::Planned { .. })) {
                        return Ok(Trial::Skip(SkipReason::OutsideHull));
                    }
                    fallback = true;
                    (Point3::ORIGIN, nearest(pts, Point3::ORIGIN, 4), None)
                }
            }
        }
        Association::WorstCaseCircumcenter => {
            let tess = tess.as_ref().expect("tessellation built");
            match pick_circumcenter_cell(tess, &mut rng) {
                Some((t, c)) => (c, tess.tetrahedra[t].vertex_ids.to_vec(), Some(t)),
                None => return Ok(Trial::Skip(SkipReason::NoCircumcenter)),
            }
        }
    };

    let mut is_serving = vec![false; pts.len()];
    for &s in &serving {
        is_serving[s] = true;
    }
    let others: Vec<usize> = (0..pts.len()).filter(|&i| !is_serving[i]).collect();

    let (interferers, bandwidth_fraction) = match cfg.reuse {
        None => (others, 1.0),
        Some(FrequencyReuse::RandomBands { eta }) => {
            let mean = others.len() as f64 / eta;
            let mut k = mean.floor() as usize;
            if rng.random::<f64>() < mean - mean.floor() {
                k += 1;
            }
            let k = k.clamp(1, others.len());
            let mut chosen: Vec<usize> = sample_indices(&mut rng, others.len(), k).into_iter().map(|j| others[j]).collect();
            chosen.sort_unstable();
            (chosen, 1.0 / eta)
        }
        Some(FrequencyReuse::Planned { rate_threshold, case, restarts, radius_override }) => {
            let tess = tess.as_ref().expect("tessellation built");
            let cell = cell.expect("cell-based mode");
            let rc = ReuseConfig::new(rate_threshold, ch.n_abs, ch.radius)?;
            let plan_seed: u64 = rng.random();
            let plan = plan_frequencies(tess, &rc, case, radius_override, restarts, plan_seed)?;
            let color = plan.colors[cell];
            let mut mark = vec![false; pts.len()];
            for c in plan.cells_with_color(color) {
                for v in tess.tetrahedra[c].vertex_ids {
                    mark[v] = true;
                }
            }
            let chosen: Vec<usize> = others.into_iter().filter(|&i| mark[i]).collect();
            (chosen, plan.bandwidth_fraction())
        }
    };
    if interferers.is_empty() {
        return Ok(Trial::Skip(SkipReason::NoInterferer));
    }

    let ds: Vec<f64> = serving.iter().map(|&i| pts[i].distance(ue)).collect();
    let di: Vec<f64> = interferers.iter().map(|&i| pts[i].distance(ue)).collect();
    let serving_distance = ds.iter().copied().fold(0.0, f64::max);
    let sir = sir_from_distances(&ds, &di, ch.alpha).map_err(|e| Error::Numeric(format!("trial {trial}: {e}")))?;
    Ok(Trial::Sample(
        SirSample { trial, realization_seed: cfg.seed, sir, serving_ids: serving, serving_distance, bandwidth_fraction },
        fallback,
    ))
}

/// Coherent joint-transmission SIR: `(Σ d_s^{-α/2})² / Σ d_i^{-α}`.
///
/// ```
/// use aircomp::sim::sir_from_distances;
/// let sir = sir_from_distances(&[100.0; 4], &[200.0], 2.0).unwrap();
/// assert!((sir - 64.0).abs() < 1e-12);
/// ```
pub fn sir_from_distances(serving: &[f64], interferers: &[f64], alpha: f64) -> Result<f64> {
    if serving.is_empty() || interferers.is_empty() {
        return Err(param("need at least one serving and one interfering aBS"));
    }
    let amp: f64 = serving.iter().map(|d| d.powf(-alpha / 2.0)).sum();
    let interference: f64 = interferers.iter().map(|d| d.powf(-alpha)).sum();
    let sir = amp * amp / interference;
    if !sir.is_finite() || sir <= 0.0 {
        return Err(Error::Numeric(format!("SIR {sir} is not a positive finite number")));
    }
    Ok(sir)
}

/// Runs all trials of `cfg`.
///
/// ```
/// use aircomp::analytics::ChannelConfig;
/// use aircomp::sim::{simulate_sir, Association, SimConfig};
/// let ch = ChannelConfig::new(2.8, 50, 3000.0).unwrap();
/// let cfg = SimConfig::new(ch, Association::Nearest4Comp, 200, 1, vec![0.0]).unwrap();
/// let out = simulate_sir(&cfg).unwrap();
/// assert_eq!(out.samples.len(), 200);
/// assert!(out.samples.iter().all(|s| s.sir > 0.0 && s.serving_ids.len() == 4));
/// ```
pub fn simulate_sir(cfg: &SimConfig) -> Result<SimOutput> {
    cfg.validate()?;
    let results = (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect::<Result<Vec<Trial>>>()?;
    let mut out = SimOutput { samples: Vec::with_capacity(results.len()), skipped: Vec::new(), hull_fallbacks: 0 };
    for (t, r) in results.into_iter().enumerate() {
        match r {
            Trial::Sample(s, fb) => {
                out.hull_fallbacks += fb as u64;
                out.samples.push(s);
            }
            Trial::Skip(why) => out.skipped.push((t as u64, why)),
        }
    }
    if !out.skipped.is_empty() {
        log::info!("{} of {} trials produced no sample", out.skipped.len(), cfg.trials);
    }
    if out.hull_fallbacks > 0 {
        log::debug!("{} trials fell back to the four nearest aBSs", out.hull_fallbacks);
    }
    Ok(out)
}

/// Empirical `P(SIR > γ)` with binomial standard error.
pub fn coverage_from_samples(samples: &[SirSample], gamma_db: f64) -> Result<MetricEstimate> {
    if samples.is_empty() {
        return Err(param("no samples to estimate coverage from"));
    }
    let g = db_to_linear(gamma_db);
    let hits = samples.iter().filter(|s| s.sir > g).count() as f64;
    let n = samples.len() as f64;
    let p = hits / n;
    Ok(MetricEstimate { value: p, error: (p * (1.0 - p) / n).sqrt(), kind: EstimateKind::MonteCarlo { trials: samples.len() as u64 } })
}

/// Mean of `bandwidth_fraction · ln(1 + SIR)`.
pub fn rate_from_samples(samples: &[SirSample]) -> Result<MetricEstimate> {
    let r: Vec<f64> = samples.iter().map(SirSample::rate).collect();
    let (m, se) = mean_and_stderr(&r)?;
    Ok(MetricEstimate { value: m, error: se, kind: EstimateKind::MonteCarlo { trials: r.len() as u64 } })
}

/// Coverage at one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveragePoint {
    pub gamma_db: f64,
    pub estimate: MetricEstimate,
}

/// Coverage over `cfg.gamma_grid_db`.
pub fn estimate_coverage(cfg: &SimConfig) -> Result<Vec<CoveragePoint>> {
    if cfg.gamma_grid_db.is_empty() {
        return Err(param("empty SIR threshold grid"));
    }
    let out = simulate_sir(cfg)?;
    cfg.gamma_grid_db
        .iter()
        .map(|&g| Ok(CoveragePoint { gamma_db: g, estimate: coverage_from_samples(&out.samples, g)? }))
        .collect()
}

/// Ergodic rate in nats/s/Hz.
pub fn estimate_rate(cfg: &SimConfig) -> Result<MetricEstimate> {
    rate_from_samples(&simulate_sir(cfg)?.samples)
}
