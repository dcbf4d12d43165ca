//! Seeded self-check of the invariants the library relies on.

use crate::analytics::{ChannelConfig, InterferenceField};
use crate::error::Result;
use crate::geometry::{delaunay, empty_circumsphere_violations, sample_bpp, Tetrahedron};
use crate::planner::{fcc_packing_efficiency, plan_frequencies, solve_epsilon_star, ReuseConfig, UeCase};
use crate::quadrature::{integrate, QuadConfig};
use crate::sim::{origin_interference_samples, simulate_sir, Association, SimConfig};
use crate::special;
use crate::stats::ks_statistic;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ValidationOptions {
    pub seed: u64,
    /// Replace one vertex of a cell before the empty-circumsphere audit.
    /// Negative control: that check must then fail.
    pub corrupt_tessellation: bool,
}

/// One invariant and the statistic it was judged on.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `check,status,statistic,threshold,detail`
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["check", "status", "statistic", "threshold", "detail"])?;
        for c in &self.checks {
            out.write_record([
                c.name.to_string(),
                if c.passed { "pass" } else { "fail" }.to_string(),
                c.statistic.to_string(),
                c.threshold.to_string(),
                c.detail.clone(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn below(name: &'static str, statistic: f64, threshold: f64, detail: String) -> CheckResult {
    CheckResult { name, passed: statistic < threshold, statistic, threshold, detail }
}

fn circumsphere_audit(opts: &ValidationOptions) -> Result<CheckResult> {
    let mut violations = 0usize;
    let mut cells = 0usize;
    for k in 0..5 {
        let net = sample_bpp(50, 3000.0, opts.seed.wrapping_add(k))?;
        let tess = delaunay(&net)?;
        let mut tets = tess.tetrahedra.clone();
        if opts.corrupt_tessellation && k == 0 {
            // swap in the vertex farthest from cell 0
            let c = tess.vertices(0).iter().fold(crate::geometry::Point3::ORIGIN, |a, &p| a + p * 0.25);
            let far = (0..net.len())
                .filter(|&i| !tets[0].contains_vertex(i))
                .max_by(|&a, &b| net.points[a].distance(c).total_cmp(&net.points[b].distance(c)))
                .expect("more than four points");
            let v = tets[0].vertex_ids;
            tets[0] = Tetrahedron::new([v[0], v[1], v[2], far]);
        }
        cells += tets.len();
        violations += empty_circumsphere_violations(&net, &tets).len();
    }
    Ok(below("delaunay_empty_circumsphere", violations as f64, 0.5, format!("{violations} violations over {cells} cells, 5 instances")))
}

fn gamma_fit_ks(seed: u64) -> Result<CheckResult> {
    let cfg = ChannelConfig::new(2.8, 150, 3000.0)?;
    let d = 500.0;
    let fit = cfg.interference_field().gamma_approx(d)?;
    let xs = origin_interference_samples(&cfg, d, 20_000, seed)?;
    let ks = ks_statistic(&xs, |x| fit.cdf(x).unwrap_or(f64::NAN))?;
    Ok(below("interference_gamma_ks", ks, 0.05, format!("d=500 alpha=2.8 N=150, 20000 samples, shape {:.4}", fit.shape)))
}

fn density_mass() -> Result<CheckResult> {
    let bpp = ChannelConfig::new(2.0, 50, 3000.0)?.bpp();
    let q = QuadConfig::with_rel_tol(1e-12);
    let r = bpp.radius;
    let masses = [
        integrate(|x| bpp.nearest_pdf(x).unwrap_or(f64::NAN), 0.0, r, q)?.value,
        integrate(|x| bpp.fourth_nearest_pdf(x).unwrap_or(f64::NAN), 0.0, r, q)?.value,
        integrate(|x| bpp.equidistant_pdf(4, x).unwrap_or(f64::NAN), 0.0, r, q)?.value,
        integrate(|x| bpp.interferer_pdf_conditional(500.0, x).unwrap_or(f64::NAN), 500.0, r, q)?.value,
    ];
    let worst = masses.iter().map(|m| (m - 1.0).abs()).fold(0.0, f64::max);
    Ok(below("density_unit_mass", worst, 1e-9, format!("masses {masses:?}")))
}

fn mgf_closed_form() -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for alpha in [2.0, 3.0, 4.0] {
        let f = InterferenceField { alpha, radius: 3000.0, interferers: 1.0 };
        for d in [100.0f64, 1000.0] {
            for z in [d.powf(alpha) * 0.1, d.powf(alpha) * 5.0] {
                let closed = f.per_interferer_mgf(d, z)?;
                let span = f.radius.powi(3) - d.powi(3);
                let quad =
                    integrate(|r| 3.0 * r * r / span * (-z * r.powf(-alpha)).exp(), d, f.radius, QuadConfig::with_rel_tol(1e-12))?
                        .value;
                worst = worst.max((closed - quad).abs() / quad);
            }
        }
    }
    Ok(below("interference_mgf_closed_form", worst, 1e-7, "max relative error over 12 (alpha, d, z) points".into()))
}

fn special_values() -> Result<CheckResult> {
    let err = [
        (special::gamma(10.0 / 3.0)? - 2.7781584804376642).abs() / 2.7781584804376642,
        (special::generalized_expint(1.0, 1.0)? - 0.21938393439552029).abs() / 0.21938393439552029,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(below("special_function_values", err, 1e-13, "Gamma(10/3), E_1(1)".into()))
}

fn planner_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let cfg = ReuseConfig::new(1001f64.ln(), 50, 3000.0)?;
    let e = solve_epsilon_star(&cfg, UeCase::General)?;
    let tess = delaunay(&sample_bpp(50, 3000.0, seed)?)?;
    let plan = plan_frequencies(&tess, &cfg, UeCase::General, None, 8, seed)?;
    let v = plan.violations().len();
    let eff = (fcc_packing_efficiency() - std::f64::consts::PI / (3.0 * 2f64.sqrt())).abs();
    Ok(vec![
        below("radius_equation_residual", e.relative_residual, 1e-6, format!("eps* = {:.3} m", e.value)),
        below("plan_distinct_colors_per_sphere", v as f64, 0.5, format!("{} colors over {} spheres", plan.n_colors, plan.clusters.len())),
        below("fcc_packing_efficiency", eff, 1e-12, format!("{:.6}", fcc_packing_efficiency())),
    ])
}

fn simulation_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let cfg = SimConfig::new(ChannelConfig::new(2.8, 50, 3000.0)?, Association::DelaunayComp, 300, seed, vec![-10.0, 0.0, 10.0])?;
    let a = simulate_sir(&cfg)?;
    let b = simulate_sir(&cfg)?;
    let mismatches = a.samples.iter().zip(&b.samples).filter(|(x, y)| x != y).count() + a.samples.len().abs_diff(b.samples.len());
    let bad_sir = a.samples.iter().filter(|s| !(s.sir > 0.0 && s.sir.is_finite())).count();
    Ok(vec![
        below("simulation_reproducible", mismatches as f64, 0.5, format!("{} samples compared", a.samples.len())),
        below("sir_positive_finite", bad_sir as f64, 0.5, format!("{} samples", a.samples.len())),
    ])
}

/// Runs every check; errors inside a check become failures rather than
/// aborting the report.
pub fn run_invariant_suite(opts: &ValidationOptions) -> ValidationReport {
    let mut checks = Vec::new();
    let mut push = |name: &'static str, r: Result<Vec<CheckResult>>| match r {
        Ok(mut c) => checks.append(&mut c),
        Err(e) => checks.push(CheckResult { name, passed: false, statistic: f64::NAN, threshold: f64::NAN, detail: e.to_string() }),
    };
    push("delaunay_empty_circumsphere", circumsphere_audit(opts).map(|c| vec![c]));
    push("interference_gamma_ks", gamma_fit_ks(opts.seed).map(|c| vec![c]));
    push("density_unit_mass", density_mass().map(|c| vec![c]));
    push("interference_mgf_closed_form", mgf_closed_form().map(|c| vec![c]));
    push("special_function_values", special_values().map(|c| vec![c]));
    push("planner", planner_checks(opts.seed));
    push("simulation", simulation_checks(opts.seed));
    ValidationReport { checks }
}
