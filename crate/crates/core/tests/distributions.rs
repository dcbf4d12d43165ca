mod common;

use aircomp::distributions::BppParams;
use aircomp::geometry::{sample_bpp, Point3};
use aircomp::rng::substream;
use aircomp::stats::{chi_square_p_value, ks_critical, ks_statistic, ks_two_sample};
use common::*;
use proptest::prelude::*;

const R: f64 = 3000.0;

#[test]
fn one_dimensional_densities_normalize() {
    for n in [5, 50, 150] {
        let p = BppParams::new(n, R).unwrap();
        assert!((mass(|r| p.nearest_pdf(r).unwrap(), 0.0, R) - 1.0).abs() < 1e-9);
        for k in 1..=4 {
            assert!((mass(|r| p.order_statistic_pdf(k, r).unwrap(), 0.0, R) - 1.0).abs() < 1e-9, "k={k} N={n}");
        }
        for k in 1..n.min(8) {
            assert!((mass(|x| p.equidistant_pdf(k, x).unwrap(), 0.0, R) - 1.0).abs() < 1e-9, "equidistant k={k} N={n}");
        }
        for d in [0.0, 500.0, 2900.0] {
            assert!((mass(|r| p.interferer_pdf_conditional(d, r).unwrap(), d, R) - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn fourth_nearest_is_fourth_order_statistic() {
    let p = BppParams::new(50, R).unwrap();
    for r in [10.0, 300.0, 1000.0, 2999.0] {
        assert_eq!(p.fourth_nearest_pdf(r).unwrap(), p.order_statistic_pdf(4, r).unwrap());
    }
}

#[test]
fn distance_cdfs_match_closed_forms() {
    let p = BppParams::new(50, R).unwrap();
    for r in [1.0, 200.0, 800.0, 2500.0] {
        // single aBS: uniform in the ball
        assert!((p.nearest_cdf(r).unwrap() - (r / R).powi(3)).abs() < 1e-15);
        // k-th order statistic: integrated density equals the binomial tail
        for k in 1..=4 {
            let m = mass(|x| p.order_statistic_pdf(k, x).unwrap(), 0.0, r);
            assert!((m - order_statistic_cdf(50, R, k, r)).abs() < 1e-10, "k={k} r={r}");
        }
    }
}

#[test]
fn joint_four_nearest_density_normalizes() {
    for n in [8, 50] {
        let m = joint_density_mass(&BppParams::new(n, R).unwrap());
        assert!((m - 1.0).abs() < 1e-6, "N={n}: mass {m}");
    }
}

#[test]
fn ordered_sampler_passes_ks_and_chi_square() {
    let n = 50;
    let p = BppParams::new(n, R).unwrap();
    let mut rng = substream(2024, 0);
    let draws: Vec<Vec<f64>> = (0..100_000).map(|_| p.sample_ordered_nearest_with(&mut rng, 4).unwrap()).collect();
    let crit = ks_critical(draws.len() as f64, 0.01);
    for k in 1..=4 {
        let xs: Vec<f64> = draws.iter().map(|d| d[k - 1]).collect();
        let d = ks_statistic(&xs, |r| order_statistic_cdf(n, R, k, r)).unwrap();
        assert!(d < crit, "k={k}: KS {d} >= {crit}");
        let stat = chi_square_equiprobable(&xs, |r| order_statistic_cdf(n, R, k, r), 50);
        let pv = chi_square_p_value(stat, 49).unwrap();
        assert!(pv > 0.01, "k={k}: chi-square p = {pv}");
    }
    assert!(draws.iter().all(|d| d.windows(2).all(|w| w[0] < w[1])));
}

#[test]
fn ordered_sampler_matches_draw_and_sort() {
    let n = 50;
    let p = BppParams::new(n, R).unwrap();
    let m = 20_000;
    let brute: Vec<Vec<f64>> = (0..m as u64)
        .map(|s| {
            let net = sample_bpp(n, R, 900_000 + s).unwrap();
            let mut d: Vec<f64> = net.points.iter().map(|q| q.distance(Point3::ORIGIN)).collect();
            d.sort_by(f64::total_cmp);
            d.truncate(4);
            d
        })
        .collect();
    let mut rng = substream(31, 0);
    let fast: Vec<Vec<f64>> = (0..m).map(|_| p.sample_ordered_nearest_with(&mut rng, 4).unwrap()).collect();
    let crit = 1.628 * (2.0 / m as f64).sqrt(); // two-sample, 1% level
    for k in 0..4 {
        let a: Vec<f64> = brute.iter().map(|d| d[k]).collect();
        let b: Vec<f64> = fast.iter().map(|d| d[k]).collect();
        let d = ks_two_sample(&a, &b).unwrap();
        assert!(d < crit, "order {}: two-sample KS {d}", k + 1);
    }
}

#[test]
fn interferer_sampler_passes_ks() {
    let p = BppParams::new(150, R).unwrap();
    let d = 500.0;
    let mut rng = substream(8, 0);
    let xs = p.sample_interferers_with(&mut rng, d, 100_000).unwrap();
    assert!(xs.iter().all(|&x| x >= d && x <= R));
    let cdf = |r: f64| (r.powi(3) - d.powi(3)) / (R.powi(3) - d.powi(3));
    let ks = ks_statistic(&xs, cdf).unwrap();
    assert!(ks < ks_critical(1e5, 0.01), "{ks}");
    let pv = chi_square_p_value(chi_square_equiprobable(&xs, cdf, 50), 49).unwrap();
    assert!(pv > 0.01);
}

#[test]
fn sampler_is_deterministic() {
    let p = BppParams::new(50, R).unwrap();
    assert_eq!(p.sample_ordered_nearest(4, 5).unwrap(), p.sample_ordered_nearest(4, 5).unwrap());
    assert_ne!(p.sample_ordered_nearest(4, 5).unwrap(), p.sample_ordered_nearest(4, 6).unwrap());
}

proptest! {
    #[test]
    fn densities_nonnegative(n in 5usize..400, u in 0.0f64..1.0, k in 1usize..5) {
        let p = BppParams::new(n, R).unwrap();
        let r = u * R;
        prop_assert!(p.nearest_pdf(r).unwrap() >= 0.0);
        prop_assert!(p.order_statistic_pdf(k, r).unwrap() >= 0.0);
        prop_assert!(p.equidistant_pdf(k, r).unwrap() >= 0.0);
        let c = p.nearest_cdf(r).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
    }

    #[test]
    fn joint_density_symmetric_in_scale(s in 0.01f64..0.2) {
        // the joint density depends on r4 only through the outer mass, so
        // permuting the three inner distances' gaps leaves it unchanged
        let p = BppParams::new(50, R).unwrap();
        let a = aircomp::distributions::OrderedDistances::new([s * R, 2.0 * s * R, 3.0 * s * R, 4.0 * s * R]).unwrap();
        let lhs = p.ln_joint_pdf_4nearest(&a).unwrap();
        let rhs = (50.0f64 * 49.0 * 48.0 * 47.0).ln()
            + (1..=4).map(|i| (3.0 * (i as f64 * s * R).powi(2) / R.powi(3)).ln()).sum::<f64>()
            + 46.0 * (-(4.0 * s).powi(3)).ln_1p();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }
}
