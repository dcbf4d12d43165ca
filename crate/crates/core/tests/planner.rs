use aircomp::distributions::BppParams;
use aircomp::geometry::{delaunay, point_tetrahedron_distance, sample_bpp, Point3};
use aircomp::planner::*;
use aircomp::quadrature::{integrate, QuadConfig};
use aircomp::rng::{open_unit, substream};
use aircomp::special::ln_gamma;
use proptest::prelude::*;
use std::collections::HashSet;

const R: f64 = 3000.0;

fn cfg(n: usize) -> ReuseConfig {
    ReuseConfig::new(1001f64.ln(), n, R).unwrap()
}

#[test]
fn reuse_factor_spot_values() {
    let c = cfg(50);
    // η = ⌈(4π ε³/3) / (35 R³/(18 π N))⌉ straight from the volume ratio
    let by_volume = |eps: f64| {
        let ball = 4.0 * std::f64::consts::PI * eps.powi(3) / 3.0;
        let cell = 35.0 * R.powi(3) / (18.0 * std::f64::consts::PI * 50.0);
        (ball / cell).ceil() as u64
    };
    assert_eq!(reuse_factor(&c, R).unwrap(), 339);
    assert_eq!(reuse_factor(&c, 0.3 * R).unwrap(), 10);
    assert_eq!(by_volume(R), 339);
    assert_eq!(by_volume(0.3 * R), 10);
    assert_eq!(reuse_factor(&c, 1e-6).unwrap(), 1);
}

#[test]
fn reuse_factor_monotone() {
    let mut last = 0;
    for k in 1..=100 {
        let e = reuse_factor(&cfg(50), R * k as f64 / 100.0).unwrap();
        assert!(e >= last);
        last = e;
    }
    for n in 5..200 {
        assert!(reuse_factor(&cfg(n + 1), 0.4 * R).unwrap() >= reuse_factor(&cfg(n), 0.4 * R).unwrap());
    }
}

#[test]
fn hard_core_spot_values() {
    let p = mhcpp_params(&cfg(54), R / 3.0).unwrap();
    assert_eq!(p, MhcppParams { psi: 8, eta_prime: 6 });
    let p = mhcpp_params(&cfg(54), 1e-3).unwrap();
    assert_eq!(p, MhcppParams { psi: 50, eta_prime: 1 });
    // the whole ball excluded: clamped to one interferer
    assert_eq!(mhcpp_params(&cfg(54), R).unwrap().psi, 1);
}

#[test]
fn radius_root_satisfies_equation() {
    for case in [UeCase::General, UeCase::Worst] {
        for n in [20, 50, 150] {
            let c = cfg(n);
            let e = solve_epsilon_star(&c, case).unwrap();
            let lead = c.rate_threshold.exp_m1() * e.root.powi(5);
            let res = epsilon_polynomial(&c, case, e.root).unwrap();
            assert!(res.abs() < 1e-6 * lead, "{case:?} N={n}: residual {res} vs {lead}");
            assert!(e.relative_residual < 1e-6);
            // one sign change: negative below the root, positive above
            assert!(epsilon_polynomial(&c, case, 0.5 * e.root).unwrap() < 0.0);
            assert!(epsilon_polynomial(&c, case, 2.0 * e.root).unwrap() > 0.0);
        }
    }
    let e = solve_epsilon_star(&cfg(50), UeCase::General).unwrap();
    assert!((e.value - 853.45).abs() < 0.01, "{}", e.value);
    assert!(!e.clamped);
}

#[test]
fn radius_clamped_when_threshold_tiny() {
    let c = ReuseConfig::new(0.01, 50, R).unwrap();
    let e = solve_epsilon_star(&c, UeCase::General).unwrap();
    assert!(e.clamped);
    assert_eq!(e.value, R);
    assert!(e.root > R);
    // root beyond 10R: no bracket
    let c = ReuseConfig::new(1e-4, 50, R).unwrap();
    assert!(matches!(solve_epsilon_star(&c, UeCase::General), Err(aircomp::Error::Solver(_))));
}

#[test]
fn worst_case_radius_bounds_general_radius() {
    let c = cfg(50);
    let g = solve_epsilon_star(&c, UeCase::General).unwrap().value;
    let w = solve_epsilon_star(&c, UeCase::Worst).unwrap().value;
    assert!(w >= g, "worst-case radius {w} below general radius {g}");
}

#[test]
fn signal_power_general_matches_monte_carlo() {
    let eps = 1000.0;
    let bpp = BppParams::new(50, eps).unwrap();
    let mut rng = substream(77, 0);
    let xs: Vec<f64> = (0..200_000)
        .map(|_| {
            let d = bpp.sample_four_nearest(&mut rng).unwrap();
            d.r.iter().map(|r| 1.0 / r).sum::<f64>().powi(2)
        })
        .collect();
    let (m, se) = aircomp::stats::mean_and_stderr(&xs).unwrap();
    let exact = expected_signal_power(&cfg(50), UeCase::General, eps).unwrap();
    assert!((m - exact).abs() < 3.0 * se, "{m} ± {se} vs {exact}");
    // closed form written out with log-gamma
    let n = 50.0f64;
    let direct = 65.0 / (12.0 * eps * eps) * (ln_gamma(n + 1.0).unwrap() + ln_gamma(10.0 / 3.0).unwrap() - ln_gamma(n + 1.0 / 3.0).unwrap()).exp();
    assert!((direct - exact).abs() < 1e-12 * exact);
}

#[test]
fn signal_power_worst_matches_quadrature() {
    let eps = 1000.0;
    let bpp = BppParams::new(50, eps).unwrap();
    let q = integrate(|r| 16.0 / (r * r) * bpp.equidistant_pdf(4, r).unwrap(), 0.0, eps, QuadConfig::default()).unwrap();
    let exact = expected_signal_power(&cfg(50), UeCase::Worst, eps).unwrap();
    assert!((q.value - exact).abs() < 1e-8 * exact, "{} vs {exact}", q.value);
}

#[test]
fn interference_outside_as_printed() {
    let c = cfg(50);
    let v = expected_interference_outside(&c, 1000.0).unwrap();
    let direct = 3.0 * 50.0 * 1e9 / (2.7e10 * (9e6 + 3e6 + 1e6));
    assert!((v - direct).abs() < 1e-15 * direct);
    let near_r = expected_interference_outside(&c, R * (1.0 - 1e-9)).unwrap();
    assert!((near_r - 50.0 / (R * R)).abs() < 1e-8 * near_r);
    assert!(expected_interference_outside(&c, 1e-3).unwrap() < 1e-15);
    assert!(expected_interference_outside(&c, R).is_err());
}

#[test]
fn fcc_spacing_and_neighbours() {
    let r = 1.0;
    let c = fcc_sphere_centers(6.0, r).unwrap();
    assert_eq!(c[0], Point3::ORIGIN);
    for (i, a) in c.iter().enumerate() {
        assert!(a.norm() <= 7.0 + 1e-9);
        for b in &c[i + 1..] {
            assert!(a.distance(*b) >= 2.0 * r - 1e-9);
        }
    }
    let neighbours = c.iter().filter(|p| (p.norm() - 2.0 * r).abs() < 1e-9).count();
    assert_eq!(neighbours, 12);
}

#[test]
fn fcc_closed_under_right_angle_rotations() {
    let c = fcc_sphere_centers(5.0, 0.7).unwrap();
    let key = |p: Point3| ((p.x * 1e6).round() as i64, (p.y * 1e6).round() as i64, (p.z * 1e6).round() as i64);
    let set: HashSet<_> = c.iter().map(|p| key(*p)).collect();
    for p in &c {
        for q in [Point3::new(-p.y, p.x, p.z), Point3::new(p.x, -p.z, p.y), Point3::new(p.z, p.y, -p.x), *p * -1.0] {
            assert!(set.contains(&key(q)));
        }
    }
}

#[test]
fn fcc_efficiency() {
    let e = fcc_packing_efficiency();
    assert!((e - std::f64::consts::PI / (3.0 * 2f64.sqrt())).abs() < 1e-15);
    assert!((e - 0.7405).abs() < 1e-4);
}

fn random_in_tet(rng: &mut aircomp::rng::SimRng, v: &[Point3; 4]) -> Point3 {
    let e: Vec<f64> = (0..4).map(|_| -open_unit(rng).ln()).collect();
    let s: f64 = e.iter().sum();
    v[0] * (e[0] / s) + v[1] * (e[1] / s) + v[2] * (e[2] / s) + v[3] * (e[3] / s)
}

#[test]
fn classification_matches_volume_sampling() {
    let mut checked = 0;
    let mut rng = substream(5, 0);
    for seed in 0..10 {
        let net = sample_bpp(100, R, seed).unwrap();
        let tess = delaunay(&net).unwrap();
        let radius = 400.0 + 100.0 * seed as f64;
        let centers = fcc_sphere_centers(R, radius).unwrap();
        let classes = classify_cells(&tess, &centers, radius);
        for c in classes.iter().take(100) {
            let v = tess.vertices(c.cell_id);
            let hit: Vec<usize> = (0..centers.len())
                .filter(|&s| point_tetrahedron_distance(centers[s], v) <= radius)
                .collect();
            let pts: Vec<Point3> = (0..200).map(|_| random_in_tet(&mut rng, &v)).chain(v).collect();
            for p in &pts {
                for (s, ctr) in centers.iter().enumerate() {
                    if p.distance(*ctr) < radius {
                        assert!(hit.contains(&s), "sampled point in sphere {s} but cell misses it");
                    }
                }
            }
            match c.class {
                CellClass::Standard => {
                    assert_eq!(c.sphere_ids.len(), 1);
                    let s = centers[c.sphere_ids[0]];
                    assert!(pts.iter().all(|p| p.distance(s) <= radius * (1.0 + 1e-12)));
                }
                CellClass::Residual => {
                    assert_eq!(c.sphere_ids, hit);
                    assert!(hit.iter().all(|&s| v.iter().any(|p| p.distance(centers[s]) > radius)));
                }
                CellClass::Independent => assert!(hit.is_empty()),
            }
            checked += 1;
        }
    }
    assert!(checked >= 1000);
}

#[test]
fn disjoint_spheres_reuse_palette() {
    let net = sample_bpp(60, R, 3).unwrap();
    let tess = delaunay(&net).unwrap();
    let m = 7;
    let classes: Vec<CellClassification> = (0..tess.tetrahedra.len())
        .map(|t| {
            let (class, ids) = match t {
                t if t < m => (CellClass::Standard, vec![0]),
                t if t < 2 * m => (CellClass::Standard, vec![1]),
                _ => (CellClass::Independent, vec![]),
            };
            CellClassification { cell_id: t, class, sphere_ids: ids }
        })
        .collect();
    let centers = [Point3::ORIGIN, Point3::new(1e5, 0.0, 0.0)];
    let clusters = form_clusters(&centers, 10.0, &classes);
    let plan = greedy_frequency_allocation(&tess, 10.0, clusters, classes, 4, 9).unwrap();
    assert_eq!(plan.n_colors, m as u32);
    assert_eq!(plan.k1, m);
    assert!(plan.is_valid());
    assert!((plan.bandwidth_fraction() - 1.0 / m as f64).abs() < 1e-15);
}

fn max_conflict_degree(plan: &FrequencyPlan) -> usize {
    let n = plan.colors.len();
    let mut nb: Vec<HashSet<usize>> = vec![HashSet::new(); n];
    for c in &plan.clusters {
        for &a in &c.member_cell_ids {
            for &b in &c.member_cell_ids {
                if a != b {
                    nb[a].insert(b);
                }
            }
        }
    }
    nb.iter().map(HashSet::len).max().unwrap_or(0)
}

#[test]
fn plans_valid_and_restarts_help() {
    let c = cfg(50);
    for seed in 0..20 {
        let tess = delaunay(&sample_bpp(50, R, 1000 + seed).unwrap()).unwrap();
        let one = plan_frequencies(&tess, &c, UeCase::General, None, 1, seed).unwrap();
        let eight = plan_frequencies(&tess, &c, UeCase::General, None, 8, seed).unwrap();
        assert!(one.is_valid() && eight.is_valid());
        assert!(eight.n_colors <= one.n_colors);
        assert!(eight.n_colors as usize >= eight.k1);
        assert!(eight.n_colors as usize <= max_conflict_degree(&eight) + 1);
        // standard cells sharing a color lie in different spheres
        for col in 0..eight.n_colors {
            let mut seen = HashSet::new();
            for cell in eight.cells_with_color(col) {
                let cl = &eight.classifications[cell];
                if cl.class == CellClass::Standard {
                    assert!(seen.insert(cl.sphere_ids[0]));
                }
            }
        }
    }
}

#[test]
fn plan_is_deterministic_and_exports() {
    let tess = delaunay(&sample_bpp(50, R, 4).unwrap()).unwrap();
    let a = plan_frequencies(&tess, &cfg(50), UeCase::General, Some(R / 3.0), 8, 11).unwrap();
    let b = plan_frequencies(&tess, &cfg(50), UeCase::General, Some(R / 3.0), 8, 11).unwrap();
    assert_eq!(a, b);
    let mut buf = Vec::new();
    write_plan_csv(&tess, &a, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "cell_id,v0,v1,v2,v3,class,sphere_ids,color");
    assert_eq!(lines.count(), tess.tetrahedra.len());
    let mut buf = Vec::new();
    write_spheres_csv(&a, &mut buf).unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("sphere_id,cx,cy,cz,radius,n_cells\n"));
}

#[test]
fn hard_core_rate_reduces_to_general() {
    let ch = cfg(50).channel();
    let a = rate_mhcpp(&ch, 1, 2000, 3).unwrap();
    let b = aircomp::analytics::rate_general(&ch, 2000, 3).unwrap();
    assert!((a.value - b.value).abs() < 1e-12);
    for n in [20, 100, 300] {
        let v = rate_mhcpp(&cfg(n).channel(), 4, 1000, 1).unwrap().value;
        assert!(v.is_finite() && v > 0.0);
    }
}

proptest! {
    #[test]
    fn hard_core_psi_bounded(n in 5usize..300, s in 1e-3f64..1.0) {
        let p = mhcpp_params(&cfg(n), s * R).unwrap();
        prop_assert!(p.psi >= 1 && p.psi <= (n - 4).max(1) as u64);
        prop_assert!(p.eta_prime >= 1);
    }

    #[test]
    fn signal_power_scales_inverse_square(eps in 1.0f64..3000.0, n in 5usize..300) {
        for case in [UeCase::General, UeCase::Worst] {
            let a = expected_signal_power(&cfg(n), case, eps).unwrap();
            let b = expected_signal_power(&cfg(n), case, 2.0 * eps).unwrap();
            prop_assert!((a / b - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coloring_always_valid(seed in 0u64..1000, frac in 0.15f64..0.6) {
        let tess = delaunay(&sample_bpp(30, R, seed).unwrap()).unwrap();
        let plan = plan_frequencies(&tess, &cfg(30), UeCase::General, Some(frac * R), 2, seed).unwrap();
        prop_assert!(plan.is_valid());
    }
}
