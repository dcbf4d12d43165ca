//! Presets and runners that regenerate each result figure.

use crate::commands;
use crate::config::ExperimentConfig;
use crate::output::Outputs;
use crate::svg::{Chart, Series};
use aircomp::analytics::{rate_from_coverage, rate_general, rate_worst_thinned, thinned_rate, ChannelConfig, GeneralCoverageModel};
use aircomp::planner::{mhcpp_params, rate_mhcpp, reuse_factor, solve_epsilon_star, ReuseConfig, UeCase};
use aircomp::quadrature::QuadConfig;
use aircomp::sim::{estimate_rate, origin_interference_samples, rate_from_samples, simulate_sir, vertex_vs_origin_interference, Association, FrequencyReuse, SimConfig};
use aircomp::stats::ks_statistic;
use anyhow::Result;
use clap::ValueEnum;

/// Serving distance of the interference-density figure, in meters.
pub const FIG4_DISTANCE_M: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Interference density at the origin vs its Gamma fit.
    Fig4,
    /// General-aUE rate vs path loss exponent.
    Fig9,
    /// General-aUE rate vs N with frequency reuse.
    Fig10,
    /// General-aUE coverage vs SIR threshold.
    Fig11,
    /// Rate from the coverage curve vs the direct rate.
    Fig12,
    /// Worst-case rate vs path loss exponent.
    Fig13,
    /// Interference at the origin vs at a cell vertex.
    Fig14,
    /// Worst-case rate vs N with frequency reuse.
    Fig15,
    /// Worst-case coverage vs SIR threshold.
    Fig16,
    /// Delaunay CoMP vs nearest-four CoMP vs no CoMP.
    Fig17,
    /// Dynamic cooperation sets of size 1 to 4 vs Delaunay CoMP.
    Fig18,
}

impl Figure {
    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig4 => "fig4",
            Figure::Fig9 => "fig9",
            Figure::Fig10 => "fig10",
            Figure::Fig11 => "fig11",
            Figure::Fig12 => "fig12",
            Figure::Fig13 => "fig13",
            Figure::Fig14 => "fig14",
            Figure::Fig15 => "fig15",
            Figure::Fig16 => "fig16",
            Figure::Fig17 => "fig17",
            Figure::Fig18 => "fig18",
        }
    }

    /// Defaults for this figure; the config file, environment and flags
    /// override them.
    pub fn preset(self) -> toml::Table {
        let text = match self {
            Figure::Fig4 => "n_abs = 150\nalpha = 2.8\ntrials = 100000",
            Figure::Fig9 => "n_abs = [50, 150]\nalpha = { start = 2.0, stop = 3.2, step = 0.1 }\ntrials = 5000",
            Figure::Fig10 | Figure::Fig15 => {
                "n_abs = [20, 50, 100, 150, 200, 250, 300]\nalpha = 2.0\nrate_threshold_nats = 6.90875477931522\ntrials = 1000"
            }
            Figure::Fig11 => "n_abs = 150\nalpha = [2.0, 2.8]\ngamma_db_grid = { start = -20.0, stop = 30.0, step = 2.5 }\ntrials = 20000",
            Figure::Fig12 => "n_abs = 150\nalpha = { start = 2.0, stop = 3.2, step = 0.2 }",
            Figure::Fig13 => {
                "n_abs = [50, 150]\nalpha = { start = 2.0, stop = 3.2, step = 0.2 }\nmode = \"worst_case_circumcenter\"\ntrials = 2000"
            }
            Figure::Fig14 => "n_abs = 150\nalpha = 2.8\ntrials = 20000",
            Figure::Fig16 => {
                "n_abs = 150\nalpha = [2.0, 3.0]\nmode = \"worst_case_circumcenter\"\ngamma_db_grid = { start = -20.0, stop = 30.0, step = 2.5 }\ntrials = 5000"
            }
            Figure::Fig17 => {
                "n_abs = 150\nalpha = [2.0, 3.0]\nmode = [\"voronoi_no_comp\", \"delaunay_comp\", \"nearest4_comp\"]\ntrials = 20000"
            }
            Figure::Fig18 => {
                "n_abs = 50\nalpha = [2.0, 3.0]\nmode = [\"delaunay_comp\", \"dynamic_comp_1\", \"dynamic_comp_2\", \"dynamic_comp_3\", \"dynamic_comp_4\"]\ntrials = 20000"
            }
        };
        let mut t: toml::Table = toml::from_str(text).expect("preset parses");
        if matches!(self, Figure::Fig10 | Figure::Fig15) {
            t.insert("case".into(), toml::Value::String(if self == Figure::Fig10 { "general" } else { "worst" }.into()));
        }
        t
    }

    pub fn needs(self) -> crate::config::Needs {
        use crate::config::Needs;
        match self {
            Figure::Fig11 | Figure::Fig16 => Needs::Coverage,
            Figure::Fig17 | Figure::Fig18 => Needs::Compare,
            Figure::Fig10 | Figure::Fig15 => Needs::Plan,
            _ => Needs::Rate,
        }
    }

    pub fn run(self, cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
        let stem = self.id();
        match self {
            Figure::Fig9 | Figure::Fig13 => commands::rate(cfg, stem, out),
            Figure::Fig11 | Figure::Fig16 => commands::coverage(cfg, stem, out),
            Figure::Fig17 | Figure::Fig18 => commands::compare(cfg, stem, out),
            Figure::Fig4 => interference_density(cfg, out),
            Figure::Fig10 => reuse_general(cfg, out),
            Figure::Fig12 => bridge(cfg, out),
            Figure::Fig14 => origin_vs_vertex(cfg, out),
            Figure::Fig15 => reuse_worst(cfg, out),
        }
    }
}

fn first_channel(cfg: &ExperimentConfig) -> Result<ChannelConfig> {
    let n = cfg.n_abs.to_vec()[0];
    let a = cfg.alpha.values()[0];
    Ok(ChannelConfig::new(a, n, cfg.radius_m)?)
}

/// Density of a sample set over `bins` equal bins on `[0, hi]`, normalized
/// by the full sample count so it stays comparable with a density curve.
fn density(samples: &[f64], bins: usize, hi: f64) -> Vec<f64> {
    let w = hi / bins as f64;
    let mut counts = vec![0usize; bins];
    for &s in samples {
        if (0.0..hi).contains(&s) {
            counts[(s / w) as usize] += 1;
        }
    }
    counts.iter().map(|&c| c as f64 / (samples.len() as f64 * w)).collect()
}

fn quantile(samples: &[f64], q: f64) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v[((v.len() - 1) as f64 * q).round() as usize]
}

fn interference_density(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let ch = first_channel(cfg)?;
    let d = FIG4_DISTANCE_M;
    let samples = cfg.trials.unwrap_or(100_000) as usize;
    let fit = ch.interference_field().gamma_approx(d)?;
    let xs = origin_interference_samples(&ch, d, samples, cfg.seed)?;
    let ks = ks_statistic(&xs, |x| fit.cdf(x).unwrap_or(f64::NAN))?;
    let bins = 60;
    let hi = quantile(&xs, 0.995);
    let w = hi / bins as f64;
    let emp = density(&xs, bins, hi);
    let rows: Vec<(f64, f64, f64)> = (0..bins)
        .map(|i| {
            let x = (i as f64 + 0.5) * w;
            Ok((x, emp[i], fit.pdf(x)?))
        })
        .collect::<Result<_, aircomp::Error>>()?;
    out.csv("fig4.csv", &["interference", "empirical_pdf", "gamma_pdf"], rows.iter().map(|r| vec![r.0.to_string(), r.1.to_string(), r.2.to_string()]))?;
    out.csv(
        "fig4_summary.csv",
        &["d_m", "alpha", "n_abs", "samples", "gamma_shape", "gamma_scale", "ks_statistic"],
        [vec![
            d.to_string(),
            ch.alpha.to_string(),
            ch.n_abs.to_string(),
            samples.to_string(),
            fit.shape.to_string(),
            fit.scale.to_string(),
            ks.to_string(),
        ]],
    )?;
    println!("Gamma fit shape={:.4} scale={:.4e}; KS distance {ks:.4} over {samples} samples", fit.shape, fit.scale);
    if cfg.plot {
        let chart = Chart {
            title: format!("Interference density, d = {d} m, α = {}, N = {}", ch.alpha, ch.n_abs),
            x_label: "interference".into(),
            y_label: "density".into(),
            series: vec![
                Series::new("simulation", rows.iter().map(|r| (r.0, r.1)).collect(), false),
                Series::new("Gamma fit", rows.iter().map(|r| (r.0, r.2)).collect(), true),
            ],
        };
        out.raw("fig4.svg", chart.render().into_bytes());
    }
    Ok(())
}

fn bridge(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let mut rows = Vec::new();
    for n in cfg.n_abs.to_vec() {
        for alpha in cfg.alpha.values() {
            let ch = ChannelConfig::new(alpha, n, cfg.radius_m)?;
            let direct = rate_general(&ch, cfg.outer_samples, cfg.seed)?;
            let model = GeneralCoverageModel::draw(&ch, cfg.outer_samples, cfg.seed)?;
            let via = rate_from_coverage(|g| model.coverage(g).map(|e| e.value), QuadConfig::with_rel_tol(1e-8))?;
            println!("N={n} alpha={alpha}: direct {:.4}, from coverage {:.4}", direct.value, via.value);
            rows.push((alpha, n, direct, via.value));
        }
    }
    out.csv(
        "fig12.csv",
        &["alpha", "n_abs", "rate_direct_nats", "rate_direct_stderr", "rate_from_coverage_nats", "relative_difference"],
        rows.iter().map(|(a, n, d, v)| {
            vec![a.to_string(), n.to_string(), d.value.to_string(), d.error.to_string(), v.to_string(), ((v - d.value) / d.value).to_string()]
        }),
    )?;
    if cfg.plot {
        let mut series = Vec::new();
        for n in cfg.n_abs.to_vec() {
            let sel = rows.iter().filter(|r| r.1 == n);
            series.push(Series::new(format!("direct N={n}"), sel.clone().map(|r| (r.0, r.2.value)).collect(), false));
            series.push(Series::new(format!("from coverage N={n}"), sel.map(|r| (r.0, r.3)).collect(), true));
        }
        let chart = Chart { title: "Rate: direct vs from coverage".into(), x_label: "path loss exponent α".into(), y_label: "rate (nats/s/Hz)".into(), series };
        out.raw("fig12.svg", chart.render().into_bytes());
    }
    Ok(())
}

fn origin_vs_vertex(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let ch = first_channel(cfg)?;
    let pairs = vertex_vs_origin_interference(&ch, cfg.trials.unwrap_or(20_000), cfg.seed)?;
    anyhow::ensure!(!pairs.is_empty(), "no realization produced a usable cell circumcenter");
    let origin: Vec<f64> = pairs.iter().map(|p| p.origin_model).collect();
    let vertex: Vec<f64> = pairs.iter().map(|p| p.at_circumcenter).collect();
    let all: Vec<f64> = origin.iter().chain(&vertex).copied().collect();
    let bins = 60;
    let hi = quantile(&all, 0.99);
    let w = hi / bins as f64;
    let (po, pv) = (density(&origin, bins, hi), density(&vertex, bins, hi));
    out.csv(
        "fig14.csv",
        &["interference", "origin_pdf", "vertex_pdf"],
        (0..bins).map(|i| vec![((i as f64 + 0.5) * w).to_string(), po[i].to_string(), pv[i].to_string()]),
    )?;
    let (mo, mv) = (quantile(&origin, 0.5), quantile(&vertex, 0.5));
    out.csv(
        "fig14_summary.csv",
        &["alpha", "n_abs", "realizations", "origin_median", "vertex_median"],
        [vec![ch.alpha.to_string(), ch.n_abs.to_string(), pairs.len().to_string(), mo.to_string(), mv.to_string()]],
    )?;
    println!("{} realizations: median interference at origin model {mo:.4e}, at vertex {mv:.4e}", pairs.len());
    if cfg.plot {
        let x = |i: usize| (i as f64 + 0.5) * w;
        let chart = Chart {
            title: format!("Interference at origin vs vertex, α = {}, N = {}", ch.alpha, ch.n_abs),
            x_label: "interference".into(),
            y_label: "density".into(),
            series: vec![
                Series::new("origin", (0..bins).map(|i| (x(i), po[i])).collect(), false),
                Series::new("vertex", (0..bins).map(|i| (x(i), pv[i])).collect(), false),
            ],
        };
        out.raw("fig14.svg", chart.render().into_bytes());
    }
    Ok(())
}

struct ReusePoint {
    n: usize,
    eps: f64,
    eta: u64,
    eta_prime: u64,
    analytic: Vec<(f64, f64)>,
    planned: (f64, f64),
    /// Mean number of bands the per-realization plans needed.
    planned_bands: f64,
    random: (f64, f64),
}

fn reuse_points(cfg: &ExperimentConfig, case: UeCase) -> Result<Vec<ReusePoint>> {
    let rth = cfg.rate_threshold_nats.expect("validated");
    let alpha = cfg.alpha.values()[0];
    let mode = match case {
        UeCase::General => Association::DelaunayComp,
        UeCase::Worst => Association::WorstCaseCircumcenter,
    };
    let trials = cfg.trials.unwrap_or(1000);
    let mut pts = Vec::new();
    for n in cfg.n_abs.to_vec() {
        log::info!("reuse: N={n}");
        let rc = ReuseConfig::new(rth, n, cfg.radius_m)?;
        let eps = match cfg.epsilon_override_m {
            Some(e) => e,
            None => solve_epsilon_star(&rc, case)?.value,
        };
        let eta = reuse_factor(&rc, eps)?;
        let eta_prime = mhcpp_params(&rc, eps)?.eta_prime;
        let ch = ChannelConfig::new(alpha, n, cfg.radius_m)?;
        let analytic = match case {
            UeCase::General => {
                let t = thinned_rate(&ch, eta as f64, cfg.outer_samples, cfg.seed)?;
                let m = rate_mhcpp(&ch, eta_prime, cfg.outer_samples, cfg.seed)?;
                vec![(t.value, t.error), (m.value, m.error)]
            }
            UeCase::Worst => {
                let t = rate_worst_thinned(&ch, eta as f64)?;
                vec![(t.value, t.error)]
            }
        };
        let base = SimConfig::new(ch, mode, trials, cfg.seed, Vec::new())?;
        let planned = base.clone().with_reuse(FrequencyReuse::Planned {
            rate_threshold: rth,
            case,
            restarts: cfg.restarts,
            radius_override: cfg.epsilon_override_m,
        })?;
        let random = base.with_reuse(FrequencyReuse::RandomBands { eta: eta as f64 })?;
        let runs = simulate_sir(&planned)?;
        let p = rate_from_samples(&runs.samples)?;
        let bands = runs.samples.iter().map(|s| 1.0 / s.bandwidth_fraction).sum::<f64>() / runs.samples.len() as f64;
        let r = estimate_rate(&random)?;
        pts.push(ReusePoint { n, eps, eta, eta_prime, analytic, planned: (p.value, p.error), planned_bands: bands, random: (r.value, r.error) });
    }
    Ok(pts)
}

fn reuse_chart(title: &str, pts: &[ReusePoint], analytic_labels: &[&str]) -> Chart {
    let x = |p: &ReusePoint| p.n as f64;
    let mut series: Vec<Series> = analytic_labels
        .iter()
        .enumerate()
        .map(|(k, l)| Series::new(*l, pts.iter().map(|p| (x(p), p.analytic[k].0)).collect(), true))
        .collect();
    series.push(Series::new("simulation, planned bands", pts.iter().map(|p| (x(p), p.planned.0)).collect(), false));
    series.push(Series::new("simulation, random bands", pts.iter().map(|p| (x(p), p.random.0)).collect(), false));
    Chart { title: title.into(), x_label: "number of aBSs N".into(), y_label: "rate (nats/s/Hz)".into(), series }
}

fn reuse_general(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let pts = reuse_points(cfg, UeCase::General)?;
    out.csv(
        "fig10.csv",
        &[
            "n_abs", "epsilon_star_m", "eta", "eta_prime", "thinned_rate_nats", "thinned_stderr", "mhcpp_rate_nats", "mhcpp_stderr", "sim_planned_nats",
            "sim_planned_stderr", "sim_planned_mean_bands", "sim_random_nats", "sim_random_stderr",
        ],
        pts.iter().map(|p| {
            vec![
                p.n.to_string(),
                p.eps.to_string(),
                p.eta.to_string(),
                p.eta_prime.to_string(),
                p.analytic[0].0.to_string(),
                p.analytic[0].1.to_string(),
                p.analytic[1].0.to_string(),
                p.analytic[1].1.to_string(),
                p.planned.0.to_string(),
                p.planned.1.to_string(),
                p.planned_bands.to_string(),
                p.random.0.to_string(),
                p.random.1.to_string(),
            ]
        }),
    )?;
    for p in &pts {
        println!(
            "N={:<4} eta={:<4} eta'={:<3} thinned={:.4} mhcpp={:.4} planned sim={:.4} random sim={:.4}",
            p.n, p.eta, p.eta_prime, p.analytic[0].0, p.analytic[1].0, p.planned.0, p.random.0
        );
    }
    if cfg.plot {
        out.raw("fig10.svg", reuse_chart("General-aUE rate with frequency reuse", &pts, &["thinned BPP", "hard-core model"]).render().into_bytes());
    }
    Ok(())
}

fn reuse_worst(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let pts = reuse_points(cfg, UeCase::Worst)?;
    out.csv(
        "fig15.csv",
        &[
            "n_abs", "epsilon_star_m", "eta", "analytic_rate_nats", "analytic_stderr", "sim_planned_nats", "sim_planned_stderr", "sim_planned_mean_bands",
            "sim_random_nats", "sim_random_stderr",
        ],
        pts.iter().map(|p| {
            vec![
                p.n.to_string(),
                p.eps.to_string(),
                p.eta.to_string(),
                p.analytic[0].0.to_string(),
                p.analytic[0].1.to_string(),
                p.planned.0.to_string(),
                p.planned.1.to_string(),
                p.planned_bands.to_string(),
                p.random.0.to_string(),
                p.random.1.to_string(),
            ]
        }),
    )?;
    for p in &pts {
        println!("N={:<4} eta={:<4} analytic={:.4} planned sim={:.4} random sim={:.4}", p.n, p.eta, p.analytic[0].0, p.planned.0, p.random.0);
    }
    if cfg.plot {
        out.raw("fig15.svg", reuse_chart("Worst-case rate with frequency reuse", &pts, &["analytic, thinned"]).render().into_bytes());
    }
    Ok(())
}
