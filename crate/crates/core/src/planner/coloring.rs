use super::cells::{classify_cells, form_clusters, CellClass, CellClassification, SphereCluster};
use super::fcc::fcc_sphere_centers;
use super::{solve_epsilon_star, ReuseConfig, UeCase};
use crate::error::{param, Result};
use crate::geometry::Tetrahedralization;
use crate::rng;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

/// Band assignment for every cell of a tessellation.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyPlan {
    pub epsilon_star: f64,
    pub clusters: Vec<SphereCluster>,
    pub classifications: Vec<CellClassification>,
    /// `colors[cell_id]` is the band index of that cell.
    pub colors: Vec<u32>,
    /// Number of bands in use (largest color + 1).
    pub n_colors: u32,
    /// Member count of the largest sphere.
    pub k1: usize,
    /// Restart that produced this plan.
    pub restart: u32,
}

/// Two cells in one sphere share a band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanViolation {
    pub sphere_id: usize,
    pub cell_a: usize,
    pub cell_b: usize,
    pub color: u32,
}

impl FrequencyPlan {
    /// Share of the total bandwidth given to each cell.
    pub fn bandwidth_fraction(&self) -> f64 {
        1.0 / self.n_colors.max(1) as f64
    }

    /// Every pair of cells that share a sphere and a color.
    pub fn violations(&self) -> Vec<PlanViolation> {
        let mut out = Vec::new();
        for c in &self.clusters {
            let m = &c.member_cell_ids;
            for i in 0..m.len() {
                for j in i + 1..m.len() {
                    if self.colors[m[i]] == self.colors[m[j]] {
                        out.push(PlanViolation { sphere_id: c.sphere_id, cell_a: m[i], cell_b: m[j], color: self.colors[m[i]] });
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.violations().is_empty()
    }

    /// Cells colored `color`.
    pub fn cells_with_color(&self, color: u32) -> impl Iterator<Item = usize> + '_ {
        self.colors.iter().enumerate().filter(move |(_, &c)| c == color).map(|(i, _)| i)
    }
}

fn color_once(
    n_cells: usize,
    clusters: &[SphereCluster],
    cell_clusters: &[Vec<usize>],
    independent: &[usize],
    seed: u64,
    restart: u32,
) -> Vec<u32> {
    let mut rng = rng::substream(seed, restart as u64);
    let mut colors: Vec<Option<u32>> = vec![None; n_cells];
    let mut used = Vec::new();
    for cluster in clusters {
        let mut order = cluster.member_cell_ids.clone();
        order.shuffle(&mut rng);
        for cell in order {
            if colors[cell].is_some() {
                continue;
            }
            used.clear();
            for &k in &cell_clusters[cell] {
                used.extend(clusters[k].member_cell_ids.iter().filter_map(|&o| colors[o]));
            }
            let mut c = 0u32;
            while used.contains(&c) {
                c += 1;
            }
            colors[cell] = Some(c);
        }
    }
    let mut palette: Vec<u32> = clusters
        .first()
        .map(|c| c.member_cell_ids.iter().filter_map(|&m| colors[m]).collect())
        .unwrap_or_default();
    palette.sort_unstable();
    palette.dedup();
    if palette.is_empty() {
        palette.push(0);
    }
    for &cell in independent {
        colors[cell] = Some(palette[rng.random_range(0..palette.len())]);
    }
    colors.into_iter().map(|c| c.unwrap_or(0)).collect()
}

/// Greedy sphere-by-sphere coloring, repeated over `restarts` random
/// within-sphere orders; keeps the plan with the fewest colors (ties go to
/// the lowest restart index).
pub fn greedy_frequency_allocation(
    tess: &Tetrahedralization,
    epsilon_star: f64,
    clusters: Vec<SphereCluster>,
    classifications: Vec<CellClassification>,
    restarts: u32,
    seed: u64,
) -> Result<FrequencyPlan> {
    if restarts == 0 {
        return Err(param("need at least one coloring restart"));
    }
    let n_cells = tess.tetrahedra.len();
    if classifications.len() != n_cells {
        return Err(param(format!("{} classifications for {n_cells} cells", classifications.len())));
    }
    let mut cell_clusters = vec![Vec::new(); n_cells];
    for (k, c) in clusters.iter().enumerate() {
        for &m in &c.member_cell_ids {
            if m >= n_cells {
                return Err(param(format!("cluster member {m} is not a cell")));
            }
            cell_clusters[m].push(k);
        }
    }
    let independent: Vec<usize> =
        classifications.iter().filter(|c| c.class == CellClass::Independent).map(|c| c.cell_id).collect();
    let (restart, colors) = (0..restarts)
        .into_par_iter()
        .map(|r| (r, color_once(n_cells, &clusters, &cell_clusters, &independent, seed, r)))
        .min_by_key(|(r, colors)| (colors.iter().max().copied().unwrap_or(0), *r))
        .expect("at least one restart");
    let n_colors = colors.iter().max().map_or(0, |m| m + 1);
    let k1 = clusters.first().map_or(0, |c| c.member_cell_ids.len());
    Ok(FrequencyPlan { epsilon_star, clusters, classifications, colors, n_colors, k1, restart })
}

/// Full planning pipeline for one tessellation: solve the radius (unless
/// `radius_override` is given), pack FCC spheres over the ball, classify
/// cells and color them.
pub fn plan_frequencies(
    tess: &Tetrahedralization,
    cfg: &ReuseConfig,
    case: UeCase,
    radius_override: Option<f64>,
    restarts: u32,
    seed: u64,
) -> Result<FrequencyPlan> {
    let eps = match radius_override {
        Some(e) if e > 0.0 && e.is_finite() => e,
        Some(e) => return Err(param(format!("radius override must be positive, got {e}"))),
        None => solve_epsilon_star(cfg, case)?.value,
    };
    let centers = fcc_sphere_centers(cfg.radius, eps)?;
    let classes = classify_cells(tess, &centers, eps);
    let clusters = form_clusters(&centers, eps, &classes);
    greedy_frequency_allocation(tess, eps, clusters, classes, restarts, seed)
}
