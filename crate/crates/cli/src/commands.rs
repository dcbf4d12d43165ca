//! The `rate`, `coverage`, `compare`, `plan` and `validate` subcommands.

use crate::config::ExperimentConfig;
use crate::output::{opt, Outputs};
use crate::svg::{Chart, Series};
use aircomp::analytics::{coverage_worst, db_to_linear, rate_general, rate_worst, ChannelConfig, GeneralCoverageModel};
use aircomp::geometry::{delaunay, sample_bpp};
use aircomp::planner::{
    mhcpp_params, plan_frequencies, reuse_factor, solve_epsilon_star, write_plan_csv, write_spheres_csv, ReuseConfig, UeCase,
};
use aircomp::sim::{compare_schemes, estimate_coverage, estimate_rate, Association, SimConfig};
use aircomp::validate::{run_invariant_suite, ValidationOptions};
use anyhow::{bail, Result};
use std::collections::BTreeMap;

pub const DEFAULT_TRIALS: u64 = 10_000;

/// Closed-form model that describes a simulated mode, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticModel {
    General,
    Worst,
}

impl AnalyticModel {
    pub fn for_mode(mode: Association) -> Option<Self> {
        match mode {
            Association::Nearest4Comp | Association::DelaunayComp | Association::DynamicComp(4) => Some(Self::General),
            Association::WorstCaseCircumcenter => Some(Self::Worst),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::General => "general",
            Self::Worst => "worst",
        }
    }
}

fn trials(cfg: &ExperimentConfig) -> u64 {
    cfg.trials.unwrap_or(DEFAULT_TRIALS)
}

/// Every `(n_abs, alpha)` pair of the sweep, N outermost.
fn sweep(cfg: &ExperimentConfig) -> Vec<(usize, f64)> {
    let alphas = cfg.alpha.values();
    cfg.n_abs.to_vec().into_iter().flat_map(|n| alphas.iter().map(move |&a| (n, a))).collect()
}

/// One rate comparison: simulated and analytic values for a mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RateLine {
    pub alpha: f64,
    pub n_abs: usize,
    pub mode: String,
    pub mc: f64,
    pub mc_stderr: f64,
    pub trials: u64,
    pub model: Option<AnalyticModel>,
    pub analytic: Option<f64>,
    pub analytic_stderr: Option<f64>,
}

pub fn rate_lines(cfg: &ExperimentConfig) -> Result<Vec<RateLine>> {
    let grid = cfg.gamma_db_grid.values();
    let mut lines = Vec::new();
    for (n, alpha) in sweep(cfg) {
        let ch = ChannelConfig::new(alpha, n, cfg.radius_m)?;
        let mut cache: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
        for mode in cfg.modes() {
            log::info!("rate: N={n} alpha={alpha} mode={mode}");
            let sim = SimConfig::new(ch, mode, trials(cfg), cfg.seed, grid.clone())?;
            let mc = estimate_rate(&sim)?;
            let model = AnalyticModel::for_mode(mode);
            let analytic = match model {
                Some(m) => Some(match cache.get(m.name()) {
                    Some(v) => *v,
                    None => {
                        let e = match m {
                            AnalyticModel::General => rate_general(&ch, cfg.outer_samples, cfg.seed)?,
                            AnalyticModel::Worst => rate_worst(&ch)?,
                        };
                        cache.insert(m.name(), (e.value, e.error));
                        (e.value, e.error)
                    }
                }),
                None => None,
            };
            lines.push(RateLine {
                alpha,
                n_abs: n,
                mode: mode.name(),
                mc: mc.value,
                mc_stderr: mc.error,
                trials: mc.trials().unwrap_or(0),
                model,
                analytic: analytic.map(|a| a.0),
                analytic_stderr: analytic.map(|a| a.1),
            });
        }
    }
    Ok(lines)
}

pub fn rate(cfg: &ExperimentConfig, stem: &str, out: &mut Outputs) -> Result<()> {
    let lines = rate_lines(cfg)?;
    out.csv(
        &format!("{stem}.csv"),
        &["alpha", "n_abs", "mode", "mc_rate_nats", "mc_stderr", "trials", "analytic_model", "analytic_rate_nats", "analytic_stderr"],
        lines.iter().map(|l| {
            vec![
                l.alpha.to_string(),
                l.n_abs.to_string(),
                l.mode.clone(),
                l.mc.to_string(),
                l.mc_stderr.to_string(),
                l.trials.to_string(),
                l.model.map(|m| m.name().to_string()).unwrap_or_default(),
                opt(l.analytic),
                opt(l.analytic_stderr),
            ]
        }),
    )?;
    for l in &lines {
        println!(
            "N={:<4} alpha={:<4} {:<24} mc={:.4} (±{:.4}) analytic={}",
            l.n_abs,
            l.alpha,
            l.mode,
            l.mc,
            l.mc_stderr,
            l.analytic.map(|a| format!("{a:.4}")).unwrap_or_else(|| "-".into())
        );
    }
    if cfg.plot {
        out.raw(&format!("{stem}.svg"), rate_chart(cfg, &lines).render().into_bytes());
    }
    Ok(())
}

fn rate_chart(cfg: &ExperimentConfig, lines: &[RateLine]) -> Chart {
    let by_alpha = cfg.alpha.values().len() > 1;
    let x_of = |l: &RateLine| if by_alpha { l.alpha } else { l.n_abs as f64 };
    let group_of = |l: &RateLine| if by_alpha { format!("N={}", l.n_abs) } else { format!("α={}", l.alpha) };
    let mut mc: BTreeMap<(String, String), Vec<(f64, f64)>> = BTreeMap::new();
    let mut an: BTreeMap<(String, String), Vec<(f64, f64)>> = BTreeMap::new();
    for l in lines {
        mc.entry((l.mode.clone(), group_of(l))).or_default().push((x_of(l), l.mc));
        if let (Some(m), Some(a)) = (l.model, l.analytic) {
            let pts = an.entry((format!("analytic {}", m.name()), group_of(l))).or_default();
            if pts.last().map(|p| p.0) != Some(x_of(l)) {
                pts.push((x_of(l), a));
            }
        }
    }
    let mut series: Vec<Series> = mc.into_iter().map(|((m, g), p)| Series::new(format!("{m} {g}"), p, false)).collect();
    series.extend(an.into_iter().map(|((m, g), p)| Series::new(format!("{m} {g}"), p, true)));
    Chart {
        title: "Achievable rate".into(),
        x_label: if by_alpha { "path loss exponent α".into() } else { "number of aBSs N".into() },
        y_label: "rate (nats/s/Hz)".into(),
        series,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageLine {
    pub gamma_db: f64,
    pub alpha: f64,
    pub n_abs: usize,
    pub mode: String,
    pub mc: f64,
    pub mc_stderr: f64,
    pub trials: u64,
    pub model: Option<AnalyticModel>,
    pub analytic: Option<f64>,
    pub analytic_stderr: Option<f64>,
}

pub fn coverage_lines(cfg: &ExperimentConfig) -> Result<Vec<CoverageLine>> {
    let grid = cfg.gamma_db_grid.values();
    let mut lines = Vec::new();
    for (n, alpha) in sweep(cfg) {
        let ch = ChannelConfig::new(alpha, n, cfg.radius_m)?;
        let mut general: Option<GeneralCoverageModel> = None;
        let mut analytic: BTreeMap<(&str, u64), (f64, f64)> = BTreeMap::new();
        for mode in cfg.modes() {
            log::info!("coverage: N={n} alpha={alpha} mode={mode}");
            let sim = SimConfig::new(ch, mode, trials(cfg), cfg.seed, grid.clone())?;
            let points = estimate_coverage(&sim)?;
            let model = AnalyticModel::for_mode(mode);
            for p in points {
                let a = match model {
                    None => None,
                    Some(m) => {
                        let key = (m.name(), p.gamma_db.to_bits());
                        if !analytic.contains_key(&key) {
                            let g = db_to_linear(p.gamma_db);
                            let e = match m {
                                AnalyticModel::General => {
                                    if general.is_none() {
                                        general = Some(GeneralCoverageModel::draw(&ch, cfg.outer_samples, cfg.seed)?);
                                    }
                                    general.as_ref().expect("just drawn").coverage(g)?
                                }
                                AnalyticModel::Worst => coverage_worst(&ch, g)?,
                            };
                            analytic.insert(key, (e.value, e.error));
                        }
                        analytic.get(&key).copied()
                    }
                };
                lines.push(CoverageLine {
                    gamma_db: p.gamma_db,
                    alpha,
                    n_abs: n,
                    mode: mode.name(),
                    mc: p.estimate.value,
                    mc_stderr: p.estimate.error,
                    trials: p.estimate.trials().unwrap_or(0),
                    model,
                    analytic: a.map(|v| v.0),
                    analytic_stderr: a.map(|v| v.1),
                });
            }
        }
    }
    Ok(lines)
}

pub fn coverage(cfg: &ExperimentConfig, stem: &str, out: &mut Outputs) -> Result<()> {
    let lines = coverage_lines(cfg)?;
    out.csv(
        &format!("{stem}.csv"),
        &["gamma_db", "alpha", "n_abs", "mode", "mc_coverage", "mc_stderr", "trials", "analytic_model", "analytic_coverage", "analytic_stderr"],
        lines.iter().map(|l| {
            vec![
                l.gamma_db.to_string(),
                l.alpha.to_string(),
                l.n_abs.to_string(),
                l.mode.clone(),
                l.mc.to_string(),
                l.mc_stderr.to_string(),
                l.trials.to_string(),
                l.model.map(|m| m.name().to_string()).unwrap_or_default(),
                opt(l.analytic),
                opt(l.analytic_stderr),
            ]
        }),
    )?;
    println!("{} coverage points over {} (N, alpha) pairs", lines.len(), sweep(cfg).len());
    if cfg.plot {
        let mut mc: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        let mut an: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        for l in &lines {
            let tag = format!("N={} α={}", l.n_abs, l.alpha);
            mc.entry(format!("{} {tag}", l.mode)).or_default().push((l.gamma_db, l.mc));
            if let (Some(m), Some(a)) = (l.model, l.analytic) {
                let pts = an.entry(format!("analytic {} {tag}", m.name())).or_default();
                if pts.last().map(|p| p.0) != Some(l.gamma_db) {
                    pts.push((l.gamma_db, a));
                }
            }
        }
        let mut series: Vec<Series> = mc.into_iter().map(|(k, p)| Series::new(k, p, false)).collect();
        series.extend(an.into_iter().map(|(k, p)| Series::new(k, p, true)));
        let chart = Chart { title: "Coverage probability".into(), x_label: "SIR threshold (dB)".into(), y_label: "coverage".into(), series };
        out.raw(&format!("{stem}.svg"), chart.render().into_bytes());
    }
    Ok(())
}

/// Paired coverage comparison; the first configured mode is the baseline.
pub fn compare(cfg: &ExperimentConfig, stem: &str, out: &mut Outputs) -> Result<()> {
    let grid = cfg.gamma_db_grid.values();
    let mut rows = Vec::new();
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for (n, alpha) in sweep(cfg) {
        let ch = ChannelConfig::new(alpha, n, cfg.radius_m)?;
        log::info!("compare: N={n} alpha={alpha}");
        let cfgs = cfg.modes().into_iter().map(|m| SimConfig::new(ch, m, trials(cfg), cfg.seed, grid.clone())).collect::<Result<Vec<_>, _>>()?;
        let cmp = compare_schemes(&cfgs)?;
        for (s, name) in cmp.schemes.iter().enumerate() {
            for (k, g) in cmp.gamma_db.iter().enumerate() {
                let c = cmp.coverage[s][k];
                let d = cmp.diff_vs_baseline[s][k];
                rows.push(vec![
                    g.to_string(),
                    alpha.to_string(),
                    n.to_string(),
                    name.clone(),
                    c.value.to_string(),
                    c.error.to_string(),
                    d.value.to_string(),
                    d.error.to_string(),
                    c.trials().unwrap_or(0).to_string(),
                ]);
                series.entry(format!("{name} N={n} α={alpha}")).or_default().push((*g, c.value));
            }
            if s > 0 {
                let worst = cmp.diff_vs_baseline[s].iter().map(|d| d.value).fold(f64::INFINITY, f64::min);
                println!("N={n} alpha={alpha} {name} vs {}: smallest paired gain {worst:.5}", cmp.schemes[0]);
            }
        }
    }
    out.csv(
        &format!("{stem}.csv"),
        &["gamma_db", "alpha", "n_abs", "mode", "coverage", "stderr", "diff_vs_baseline", "diff_stderr", "trials"],
        rows,
    )?;
    if cfg.plot {
        let chart = Chart {
            title: "Coverage by scheme".into(),
            x_label: "SIR threshold (dB)".into(),
            y_label: "coverage".into(),
            series: series.into_iter().map(|(k, p)| Series::new(k, p, false)).collect(),
        };
        out.raw(&format!("{stem}.svg"), chart.render().into_bytes());
    }
    Ok(())
}

/// Summary of one planning run.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanSummary {
    pub n_abs: usize,
    pub case: UeCase,
    pub epsilon_star: f64,
    pub root: Option<f64>,
    pub relative_residual: Option<f64>,
    pub clamped: Option<bool>,
    pub overridden: bool,
    pub eta: u64,
    pub psi: u64,
    pub eta_prime: u64,
    pub n_colors: u32,
    pub k1: usize,
    pub valid: bool,
}

pub fn plan(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Vec<PlanSummary>> {
    let rth = cfg.rate_threshold_nats.expect("validated");
    let case: UeCase = cfg.case.parse()?;
    let mut summaries = Vec::new();
    for n in cfg.n_abs.to_vec() {
        let rc = ReuseConfig::new(rth, n, cfg.radius_m)?;
        let solved = solve_epsilon_star(&rc, case);
        let eps = match (cfg.epsilon_override_m, &solved) {
            (Some(e), _) => e,
            (None, Ok(s)) => s.value,
            (None, Err(e)) => bail!("radius equation for N={n}: {e}"),
        };
        let tess = delaunay(&sample_bpp(n, cfg.radius_m, cfg.seed)?)?;
        let plan = plan_frequencies(&tess, &rc, case, cfg.epsilon_override_m, cfg.restarts, cfg.seed)?;
        let m = mhcpp_params(&rc, eps)?;
        let solved = solved.ok();
        let s = PlanSummary {
            n_abs: n,
            case,
            epsilon_star: eps,
            root: solved.map(|s| s.root),
            relative_residual: solved.map(|s| s.relative_residual),
            clamped: solved.map(|s| s.clamped),
            overridden: cfg.epsilon_override_m.is_some(),
            eta: reuse_factor(&rc, eps)?,
            psi: m.psi,
            eta_prime: m.eta_prime,
            n_colors: plan.n_colors,
            k1: plan.k1,
            valid: plan.is_valid(),
        };
        if !s.valid {
            bail!("plan for N={n} gives two cells of one sphere the same band");
        }
        let mut buf = Vec::new();
        write_plan_csv(&tess, &plan, &mut buf)?;
        out.csv_bytes(&format!("plan_N{n}.csv"), buf);
        let mut buf = Vec::new();
        write_spheres_csv(&plan, &mut buf)?;
        out.csv_bytes(&format!("spheres_N{n}.csv"), buf);
        println!(
            "N={n}: eps*={:.2} m eta={} psi={} eta'={} bands={} (largest sphere {} cells){}",
            s.epsilon_star,
            s.eta,
            s.psi,
            s.eta_prime,
            s.n_colors,
            s.k1,
            if s.overridden { " [radius overridden]" } else { "" }
        );
        summaries.push(s);
    }
    out.csv(
        "plan_summary.csv",
        &[
            "n_abs", "case", "epsilon_star_m", "epsilon_root_m", "relative_residual", "clamped", "overridden", "eta", "psi", "eta_prime", "n_colors",
            "k1", "valid",
        ],
        summaries.iter().map(|s| {
            vec![
                s.n_abs.to_string(),
                match s.case {
                    UeCase::General => "general".into(),
                    UeCase::Worst => "worst".into(),
                },
                s.epsilon_star.to_string(),
                opt(s.root),
                opt(s.relative_residual),
                s.clamped.map(|c| c.to_string()).unwrap_or_default(),
                s.overridden.to_string(),
                s.eta.to_string(),
                s.psi.to_string(),
                s.eta_prime.to_string(),
                s.n_colors.to_string(),
                s.k1.to_string(),
                s.valid.to_string(),
            ]
        }),
    )?;
    Ok(summaries)
}

/// Runs the invariant suite; returns whether every check passed.
pub fn validate(cfg: &ExperimentConfig, corrupt_tessellation: bool, out: &mut Outputs) -> Result<bool> {
    let report = run_invariant_suite(&ValidationOptions { seed: cfg.seed, corrupt_tessellation });
    for c in &report.checks {
        println!("{:<4} {:<32} {:>12.4e} (threshold {:.1e})  {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.statistic, c.threshold, c.detail);
    }
    let mut buf = Vec::new();
    report.write_csv(&mut buf)?;
    out.csv_bytes("validate.csv", buf);
    Ok(report.all_passed())
}
