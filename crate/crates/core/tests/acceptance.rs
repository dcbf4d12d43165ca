//! Acceptance criteria at desk scale (R = 3000 m). Prints one PASS/FAIL
//! line per criterion and exits non-zero if any fails.

mod common;

use aircomp::analytics::*;
use aircomp::distributions::BppParams;
use aircomp::geometry::{delaunay, empty_circumsphere_violations, mean_cell_volume, sample_bpp};
use aircomp::planner::*;
use aircomp::quadrature::{integrate, QuadConfig};
use aircomp::rng::substream;
use aircomp::sim::*;
use aircomp::stats::{chi_square_p_value, ks_critical, ks_statistic, mean_and_stderr, variance, MetricEstimate};
use common::*;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

const R: f64 = 3000.0;
const OUTER: usize = 10_000;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn channel(alpha: f64, n: usize) -> ChannelConfig {
    ChannelConfig::new(alpha, n, R).unwrap()
}

fn sim_cfg(mode: Association, alpha: f64, n: usize, trials: u64, seed: u64, grid: &[f64]) -> SimConfig {
    SimConfig::new(channel(alpha, n), mode, trials, seed, grid.to_vec()).unwrap()
}

fn joint_sigma(a: &MetricEstimate, b: &MetricEstimate) -> f64 {
    (a.error * a.error + b.error * b.error).sqrt()
}

fn gamma_approximation() -> Outcome {
    let cfg = channel(2.8, 150);
    let d = 500.0;
    let fit = cfg.interference_field().gamma_approx(d).unwrap();
    let xs = origin_interference_samples(&cfg, d, 100_000, 2024).unwrap();
    let ks = ks_statistic(&xs, |x| fit.cdf(x).unwrap()).unwrap();
    check(ks < 0.05, format!("KS {ks:.4} >= 0.05"))?;
    let (mean, se_mean) = mean_and_stderr(&xs).unwrap();
    let var = variance(&xs).unwrap();
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / xs.len() as f64;
    let se_var = ((m4 - var * var) / xs.len() as f64).sqrt();
    let (em, ev) = cfg.interference_field().moments(d).unwrap();
    let zm = (mean - em).abs() / se_mean;
    let zv = (var - ev).abs() / se_var;
    check(zm < 3.0 && zv < 3.0, format!("moment mismatch: mean z={zm:.2}, variance z={zv:.2}"))?;
    Ok(format!("KS={ks:.4}, mean z={zm:.2}, var z={zv:.2}"))
}

fn rate_vs_alpha() -> Outcome {
    let alphas = [2.0, 2.4, 2.8, 3.2];
    let mut analytic = vec![];
    let mut simulated = vec![];
    let mut worst_dev = 0.0f64;
    for n in [50, 150] {
        let mut a_row = vec![];
        let mut s_row = vec![];
        for &a in &alphas {
            let an = rate_general(&channel(a, n), OUTER, 7).unwrap();
            let mc = estimate_rate(&sim_cfg(Association::Nearest4Comp, a, n, 20_000, 11, &[0.0])).unwrap();
            let tol = (3.0 * joint_sigma(&an, &mc)).max(0.03 * mc.value);
            let dev = (an.value - mc.value).abs();
            check(dev <= tol, format!("N={n} alpha={a}: analytic {:.4} vs MC {:.4} (tol {tol:.4})", an.value, mc.value))?;
            worst_dev = worst_dev.max(dev / tol);
            a_row.push(an.value);
            s_row.push(mc.value);
        }
        for row in [&a_row, &s_row] {
            check(row.windows(2).all(|w| w[1] > w[0]), format!("N={n}: rate not increasing in alpha: {row:?}"))?;
        }
        analytic.push(a_row);
        simulated.push(s_row);
    }
    for rows in [&analytic, &simulated] {
        check(rows[0].iter().zip(&rows[1]).all(|(a, b)| a > b), format!("N=50 not above N=150: {rows:?}"))?;
    }
    Ok(format!("max deviation/tolerance {worst_dev:.2}; N=50 {:.3?}, N=150 {:.3?}", analytic[0], analytic[1]))
}

fn coverage_vs_gamma() -> Outcome {
    let grid = [-10.0, 0.0, 10.0, 20.0];
    let mut an_rows = vec![];
    let mut mc_rows = vec![];
    let mut worst = 0.0f64;
    for a in [2.0, 2.8] {
        let model = GeneralCoverageModel::draw(&channel(a, 150), OUTER, 3).unwrap();
        let mc = estimate_coverage(&sim_cfg(Association::Nearest4Comp, a, 150, 100_000, 5, &grid)).unwrap();
        let mut an_row = vec![];
        for (g, m) in grid.iter().zip(&mc) {
            let v = model.coverage(db_to_linear(*g)).unwrap().value;
            let dev = (v - m.estimate.value).abs();
            check(dev <= 0.02, format!("alpha={a} gamma={g} dB: analytic {v:.4} vs MC {:.4}", m.estimate.value))?;
            worst = worst.max(dev);
            an_row.push(v);
        }
        an_rows.push(an_row);
        mc_rows.push(mc.iter().map(|c| c.estimate.value).collect::<Vec<_>>());
    }
    // strictly increasing wherever the two curves are not both pinned at 0 or 1
    let mut saturated = vec![];
    for rows in [&an_rows, &mc_rows] {
        for (k, (hi, lo)) in rows[1].iter().zip(&rows[0]).enumerate() {
            if (*hi == 1.0 && *lo == 1.0) || (*hi == 0.0 && *lo == 0.0) {
                saturated.push(grid[k]);
                continue;
            }
            check(hi > lo, format!("coverage not increasing in alpha at {} dB: {rows:?}", grid[k]))?;
        }
    }
    let note = if saturated.is_empty() { String::new() } else { format!("; saturated at {saturated:?} dB") };
    Ok(format!("max |analytic - MC| = {worst:.4}{note}"))
}

fn rate_coverage_bridge() -> Outcome {
    let mut out = vec![];
    for a in [2.0, 3.0] {
        let cfg = channel(a, 150);
        let model = GeneralCoverageModel::draw(&cfg, OUTER, 13).unwrap();
        let bridged = rate_from_coverage(|g| Ok(model.coverage(g)?.value), QuadConfig::with_rel_tol(1e-6)).unwrap().value;
        let direct = rate_general(&cfg, OUTER, 13).unwrap().value;
        let rel = (bridged - direct).abs() / direct;
        check(rel <= 0.02, format!("alpha={a}: bridge {bridged:.4} vs direct {direct:.4}"))?;
        out.push(format!("alpha={a}: rel {rel:.1e}"));
    }
    Ok(out.join(", "))
}

fn worst_case_bound() -> Outcome {
    let mut min_gap = f64::INFINITY;
    for n in [50, 150] {
        for a in [2.0, 2.4, 2.8, 3.2] {
            let cfg = channel(a, n);
            let an = rate_worst(&cfg).unwrap().value;
            let mc = estimate_rate(&sim_cfg(Association::WorstCaseCircumcenter, a, n, 10_000, 21, &[0.0])).unwrap();
            let gap = mc.value - an;
            check(gap > 0.0, format!("N={n} alpha={a}: analytic {an:.4} not below simulated {:.4}", mc.value))?;
            min_gap = min_gap.min(gap);
        }
    }
    let grid = [-10.0, 0.0, 10.0];
    for n in [50, 150] {
        for a in [2.0, 3.0] {
            let mc = estimate_coverage(&sim_cfg(Association::WorstCaseCircumcenter, a, n, 10_000, 23, &grid)).unwrap();
            for (g, m) in grid.iter().zip(&mc) {
                let an = coverage_worst(&channel(a, n), db_to_linear(*g)).unwrap().value;
                check(an <= m.estimate.value, format!("N={n} alpha={a} gamma={g}: analytic {an:.4} above simulated {:.4}", m.estimate.value))?;
            }
        }
    }
    Ok(format!("smallest rate gap {min_gap:.4} nats/s/Hz"))
}

fn comp_gain() -> Outcome {
    let grid: Vec<f64> = (-20..=30).step_by(5).map(f64::from).collect();
    let mut saturated = vec![];
    let mut failures = vec![];
    for a in [2.0, 3.0] {
        let base = sim_cfg(Association::VoronoiNoComp, a, 150, 100_000, 31, &grid);
        let mut del = base.clone();
        del.mode = Association::DelaunayComp;
        let mut near = base.clone();
        near.mode = Association::Nearest4Comp;
        let cmp = compare_schemes(&[base, del, near]).unwrap();
        for s in 1..3 {
            for (k, g) in grid.iter().enumerate() {
                let d = cmp.diff_vs_baseline[s][k].value;
                let (c0, c1) = (cmp.coverage[0][k].value, cmp.coverage[s][k].value);
                let both_saturated = (c0 == 1.0 && c1 == 1.0) || (c0 == 0.0 && c1 == 0.0);
                let ok = if both_saturated { d >= 0.0 } else { d > 0.0 };
                if both_saturated {
                    saturated.push(format!("{}@{a}/{g}dB", cmp.schemes[s]));
                }
                if !ok {
                    failures.push(format!("{} alpha={a} gamma={g}: {c1} vs {c0}", cmp.schemes[s]));
                }
            }
        }
    }
    check(failures.is_empty(), format!("gain not positive at: {}", failures.join("; ")))?;
    Ok(if saturated.is_empty() { "gain > 0 at every threshold".into() } else { format!("gain > 0; both saturated at {}", saturated.join(" ")) })
}

fn scheme_equivalence() -> Outcome {
    let grid: Vec<f64> = (-20..=30).step_by(5).map(f64::from).collect();
    let near = estimate_coverage(&sim_cfg(Association::Nearest4Comp, 3.0, 50, 20_000, 41, &grid)).unwrap();
    let dyn4 = estimate_coverage(&sim_cfg(Association::DynamicComp(4), 3.0, 50, 20_000, 43, &grid)).unwrap();
    let mut worst = 0.0f64;
    for (a, b) in near.iter().zip(&dyn4) {
        let s = joint_sigma(&a.estimate, &b.estimate);
        let dev = (a.estimate.value - b.estimate.value).abs();
        check(dev <= 3.0 * s, format!("gamma={}: {:.4} vs {:.4}", a.gamma_db, a.estimate.value, b.estimate.value))?;
        if s > 0.0 {
            worst = worst.max(dev / s);
        }
    }
    let curves: Vec<Vec<f64>> = (1..=4)
        .map(|n| {
            estimate_coverage(&sim_cfg(Association::DynamicComp(n), 3.0, 50, 20_000, 41, &grid))
                .unwrap()
                .iter()
                .map(|c| c.estimate.value)
                .collect()
        })
        .collect();
    for w in curves.windows(2) {
        check(w[1].iter().zip(&w[0]).all(|(hi, lo)| hi >= lo), "dynamic curves not ordered in n".into())?;
    }
    Ok(format!("max deviation {worst:.2} sigma; n=1..4 ordered"))
}

fn mgf_closed_form() -> Outcome {
    let mut worst = 0.0f64;
    for alpha in [2.0, 3.0, 4.0] {
        let field = channel(alpha, 50).interference_field();
        for d in [100.0f64, 700.0, 2000.0] {
            for scale in [0.1, 1.0, 10.0] {
                let z = scale * d.powf(alpha);
                let span = R.powi(3) - d.powi(3);
                let per = integrate(|r| 3.0 * r * r / span * (-z * r.powf(-alpha)).exp(), d, R, QuadConfig::with_rel_tol(1e-13))
                    .unwrap()
                    .value;
                let closed = field.per_interferer_mgf(d, z).unwrap();
                let agg = field.mgf(d, z).unwrap();
                let agg_q = per.powf(field.interferers);
                worst = worst.max((closed - per).abs() / per).max((agg - agg_q).abs() / agg_q);
            }
        }
    }
    check(worst < 1e-7, format!("max relative error {worst:.2e}"))?;
    Ok(format!("max relative error {worst:.2e} over 27 points"))
}

fn frequency_planning() -> Outcome {
    let cfg = ReuseConfig::new(1001f64.ln(), 50, R).unwrap();
    let mut res = 0.0f64;
    for case in [UeCase::General, UeCase::Worst] {
        let e = solve_epsilon_star(&cfg, case).unwrap();
        let poly = epsilon_polynomial(&cfg, case, e.root).unwrap();
        let lead = cfg.rate_threshold.exp_m1() * e.root.powi(5);
        res = res.max(poly.abs() / lead);
    }
    check(res < 1e-6, format!("radius residual {res:.2e}"))?;
    let eta = |n: f64, s: f64| (24.0 / 35.0 * n * std::f64::consts::PI.powi(2) * s.powi(3)).ceil() as u64;
    check(reuse_factor(&cfg, R).unwrap() == 339 && eta(50.0, 1.0) == 339, "eta at eps=R".into())?;
    check(reuse_factor(&cfg, 0.3 * R).unwrap() == 10 && eta(50.0, 0.3) == 10, "eta at eps=0.3R".into())?;
    let p = mhcpp_params(&ReuseConfig::new(1001f64.ln(), 54, R).unwrap(), R / 3.0).unwrap();
    check(p.psi == 8 && p.eta_prime == 6, format!("hard-core params {p:?}"))?;
    let mut plans = 0;
    for seed in 0..10 {
        let tess = delaunay(&sample_bpp(50, R, 500 + seed).unwrap()).unwrap();
        for case in [UeCase::General, UeCase::Worst] {
            let plan = plan_frequencies(&tess, &cfg, case, None, 8, seed).unwrap();
            check(plan.is_valid(), format!("plan violations {:?}", plan.violations()))?;
            plans += 1;
        }
    }
    let eff = fcc_packing_efficiency();
    check((eff - std::f64::consts::PI / (3.0 * 2f64.sqrt())).abs() < 1e-12, format!("packing efficiency {eff}"))?;
    Ok(format!("residual {res:.1e}, eta 339/10, psi 8, eta' 6, {plans} valid plans, efficiency {eff:.4}"))
}

fn geometry() -> Outcome {
    for seed in 0..20 {
        let net = sample_bpp(50, R, 7000 + seed).unwrap();
        let tess = delaunay(&net).unwrap();
        let v = empty_circumsphere_violations(&net, &tess.tetrahedra);
        check(v.is_empty(), format!("seed {seed}: {} circumsphere violations", v.len()))?;
    }
    let n = 100;
    let vols: Vec<f64> = (0..200).map(|s| mean_cell_volume(&delaunay(&sample_bpp(n, R, 8000 + s).unwrap()).unwrap()).unwrap()).collect();
    let mean = vols.iter().sum::<f64>() / vols.len() as f64;
    let expected = 35.0 * R.powi(3) / (18.0 * std::f64::consts::PI * n as f64);
    let ratio = mean / expected;
    check((ratio - 1.0).abs() <= 0.10, format!("20 audits clean; mean cell volume ratio {ratio:.4} outside 1 +/- 0.10"))?;
    Ok(format!("20 audits clean; mean cell volume ratio {ratio:.4}"))
}

fn distribution_suite() -> Outcome {
    let p = BppParams::new(50, R).unwrap();
    let mut worst = 0.0f64;
    worst = worst.max((mass(|r| p.nearest_pdf(r).unwrap(), 0.0, R) - 1.0).abs());
    worst = worst.max((mass(|r| p.interferer_pdf_conditional(500.0, r).unwrap(), 500.0, R) - 1.0).abs());
    worst = worst.max((mass(|r| p.equidistant_pdf(4, r).unwrap(), 0.0, R) - 1.0).abs());
    worst = worst.max((mass(|r| p.fourth_nearest_pdf(r).unwrap(), 0.0, R) - 1.0).abs());
    check(worst < 1e-9, format!("1-D density mass error {worst:.1e}"))?;
    let joint = (joint_density_mass(&p) - 1.0).abs();
    check(joint < 1e-6, format!("joint density mass error {joint:.1e}"))?;

    let mut rng = substream(99, 0);
    let draws: Vec<Vec<f64>> = (0..100_000).map(|_| p.sample_ordered_nearest_with(&mut rng, 4).unwrap()).collect();
    let crit = ks_critical(1e5, 0.01);
    let mut max_ks = 0.0f64;
    let mut min_p = 1.0f64;
    for k in 1..=4 {
        let xs: Vec<f64> = draws.iter().map(|d| d[k - 1]).collect();
        let cdf = |r: f64| order_statistic_cdf(50, R, k, r);
        max_ks = max_ks.max(ks_statistic(&xs, cdf).unwrap());
        min_p = min_p.min(chi_square_p_value(chi_square_equiprobable(&xs, cdf, 50), 49).unwrap());
    }
    let xs = p.sample_interferers_with(&mut rng, 500.0, 100_000).unwrap();
    let cdf = |r: f64| (r.powi(3) - 500f64.powi(3)) / (R.powi(3) - 500f64.powi(3));
    max_ks = max_ks.max(ks_statistic(&xs, cdf).unwrap());
    min_p = min_p.min(chi_square_p_value(chi_square_equiprobable(&xs, cdf, 50), 49).unwrap());
    let net_r: Vec<f64> = (0..2000).flat_map(|s| sample_bpp(50, R, 60_000 + s).unwrap().points.into_iter().map(|q| q.norm())).collect();
    let radial = ks_statistic(&net_r, |r| (r / R).powi(3)).unwrap();
    check(max_ks < crit && radial < crit, format!("KS {max_ks:.4} / radial {radial:.4} >= {crit:.4}"))?;
    check(min_p > 0.01, format!("chi-square p {min_p:.4}"))?;
    Ok(format!("mass error {worst:.1e} (joint {joint:.1e}), max KS {max_ks:.4} < {crit:.4}, min chi-square p {min_p:.3}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1 gamma approximation of interference", gamma_approximation),
        ("2 rate vs path loss exponent", rate_vs_alpha),
        ("3 coverage vs threshold", coverage_vs_gamma),
        ("4 rate from coverage", rate_coverage_bridge),
        ("5 worst-case bound", worst_case_bound),
        ("6 CoMP gain", comp_gain),
        ("7 scheme equivalence", scheme_equivalence),
        ("8 closed-form MGF", mgf_closed_form),
        ("9 frequency planning", frequency_planning),
        ("10 geometry", geometry),
        ("11 distribution suite", distribution_suite),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
