//! Estimates, deterministic reductions and goodness-of-fit statistics.

use crate::error::{param, Result};
use crate::special;

/// How an estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimateKind {
    /// Deterministic evaluation; `error` is a numerical error bound.
    Analytic,
    /// Sample mean; `error` is one standard error.
    MonteCarlo { trials: u64 },
}

/// A scalar result with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricEstimate {
    pub value: f64,
    pub error: f64,
    pub kind: EstimateKind,
}

impl MetricEstimate {
    pub fn analytic(value: f64, error: f64) -> Self {
        Self { value, error, kind: EstimateKind::Analytic }
    }

    /// Mean and standard error of `samples`.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let (mean, se) = mean_and_stderr(samples)?;
        Ok(Self { value: mean, error: se, kind: EstimateKind::MonteCarlo { trials: samples.len() as u64 } })
    }

    pub fn trials(&self) -> Option<u64> {
        match self.kind {
            EstimateKind::MonteCarlo { trials } => Some(trials),
            EstimateKind::Analytic => None,
        }
    }
}

/// Pairwise summation. The result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sample mean and standard error of the mean.
pub fn mean_and_stderr(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.is_empty() {
        return Err(param("cannot average an empty sample"));
    }
    let n = xs.len() as f64;
    // shifted by the first value: exact for constant samples
    let shift = xs[0];
    let centered: Vec<f64> = xs.iter().map(|x| x - shift).collect();
    let mean = shift + pairwise_sum(&centered) / n;
    if xs.len() == 1 {
        return Ok((mean, 0.0));
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Sample variance (unbiased).
pub fn variance(xs: &[f64]) -> Result<f64> {
    let (_, se) = mean_and_stderr(xs)?;
    Ok(se * se * xs.len() as f64)
}

/// One-sample Kolmogorov–Smirnov statistic against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(param("KS statistic needs samples"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in xs.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(param("KS statistic needs two non-empty samples"));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / x.len() as f64 - j as f64 / y.len() as f64).abs());
    }
    Ok(d)
}

/// Asymptotic KS critical value at level `alpha` for effective sample size `n`.
pub fn ks_critical(n: f64, alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / n.sqrt()
}

/// Upper-tail p-value of a chi-square statistic with `dof` degrees of freedom.
pub fn chi_square_p_value(stat: f64, dof: usize) -> Result<f64> {
    special::regularized_upper_gamma(dof as f64 / 2.0, stat / 2.0)
}

/// Normalized histogram: `Σ density[i] * width[i] = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
    pub count: usize,
}

impl Histogram {
    /// Histogram of `samples` over `[lo, hi]` with `bins` equal bins.
    /// Samples outside the range are dropped.
    pub fn with_range(samples: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if bins == 0 || !(hi > lo) {
            return Err(param("histogram needs bins > 0 and hi > lo"));
        }
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0usize; bins];
        let mut count = 0;
        for &s in samples {
            if s < lo || s > hi || !s.is_finite() {
                continue;
            }
            let k = (((s - lo) / width) as usize).min(bins - 1);
            counts[k] += 1;
            count += 1;
        }
        if count == 0 {
            return Err(param("no samples inside the histogram range"));
        }
        let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
        let density = counts.iter().map(|&c| c as f64 / (count as f64 * width)).collect();
        Ok(Self { edges, density, count })
    }

    /// Histogram spanning the sample range.
    pub fn from_samples(samples: &[f64], bins: usize) -> Result<Self> {
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() || !hi.is_finite() {
            return Err(param("histogram needs finite samples"));
        }
        let hi = if hi > lo { hi } else { lo + 1.0 };
        Self::with_range(samples, bins, lo, hi)
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.edges.windows(2).zip(&self.density).map(|(w, d)| d * (w[1] - w[0])).sum()
    }
}
