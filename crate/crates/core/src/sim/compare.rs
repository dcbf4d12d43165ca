use super::{coverage_from_samples, simulate_sir, SimConfig, SirSample};
use crate::analytics::db_to_linear;
use crate::error::{param, Result};
use crate::stats::{mean_and_stderr, EstimateKind, MetricEstimate};
use std::collections::HashMap;

/// Coverage of several schemes on shared realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeComparison {
    pub gamma_db: Vec<f64>,
    pub schemes: Vec<String>,
    /// `coverage[scheme][gamma]`.
    pub coverage: Vec<Vec<MetricEstimate>>,
    /// `diff_vs_baseline[scheme][gamma]`: paired mean of
    /// `1{SIR_scheme > γ} - 1{SIR_baseline > γ}` over trials where both
    /// produced a sample. The first scheme is the baseline.
    pub diff_vs_baseline: Vec<Vec<MetricEstimate>>,
}

/// Runs every configuration on the same seeds and compares coverage.
///
/// All configurations must share channel, trials, seed and threshold grid.
pub fn compare_schemes(cfgs: &[SimConfig]) -> Result<SchemeComparison> {
    let base = cfgs.first().ok_or_else(|| param("nothing to compare"))?;
    for c in &cfgs[1..] {
        if c.channel != base.channel || c.trials != base.trials || c.seed != base.seed || c.gamma_grid_db != base.gamma_grid_db {
            return Err(param("compared schemes must share channel, trials, seed and threshold grid"));
        }
    }
    if base.gamma_grid_db.is_empty() {
        return Err(param("empty SIR threshold grid"));
    }
    let runs = cfgs.iter().map(simulate_sir).collect::<Result<Vec<_>>>()?;
    let by_trial: Vec<HashMap<u64, &SirSample>> =
        runs.iter().map(|r| r.samples.iter().map(|s| (s.trial, s)).collect()).collect();
    let mut coverage = Vec::new();
    let mut diff = Vec::new();
    for run in &runs {
        coverage.push(base.gamma_grid_db.iter().map(|&g| coverage_from_samples(&run.samples, g)).collect::<Result<Vec<_>>>()?);
        let mut row = Vec::new();
        for &g in &base.gamma_grid_db {
            let thr = db_to_linear(g);
            let d: Vec<f64> = run
                .samples
                .iter()
                .filter_map(|s| by_trial[0].get(&s.trial).map(|b| (s.sir > thr) as i32 as f64 - (b.sir > thr) as i32 as f64))
                .collect();
            let (m, se) = if d.is_empty() { (0.0, 0.0) } else { mean_and_stderr(&d)? };
            row.push(MetricEstimate { value: m, error: se, kind: EstimateKind::MonteCarlo { trials: d.len() as u64 } });
        }
        diff.push(row);
    }
    Ok(SchemeComparison {
        gamma_db: base.gamma_grid_db.clone(),
        schemes: cfgs.iter().map(|c| c.mode.name()).collect(),
        coverage,
        diff_vs_baseline: diff,
    })
}
