#![allow(dead_code)]

use aircomp::distributions::BppParams;
use aircomp::quadrature::{integrate, QuadConfig};
use aircomp::special::ln_gamma;

/// `P(k-th nearest <= r)` as a binomial tail: at least `k` of `N` points
/// fall in the ball of radius `r`.
pub fn order_statistic_cdf(n: usize, radius: f64, k: usize, r: f64) -> f64 {
    let p = (r / radius).powi(3).clamp(0.0, 1.0);
    if p == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return 1.0;
    }
    let nf = n as f64;
    let mut tail = 0.0;
    for j in 0..k {
        let jf = j as f64;
        let ln = ln_gamma(nf + 1.0).unwrap() - ln_gamma(jf + 1.0).unwrap() - ln_gamma(nf - jf + 1.0).unwrap()
            + jf * p.ln()
            + (nf - jf) * (-p).ln_1p();
        tail += ln.exp();
    }
    (1.0 - tail).clamp(0.0, 1.0)
}

/// Mass of the joint four-nearest density by nested adaptive quadrature
/// over `0 < r1 < r2 < r3 < r4 < R`.
pub fn joint_density_mass(bpp: &BppParams) -> f64 {
    let cfg = QuadConfig::with_rel_tol(1e-10);
    let joint = |r: [f64; 4]| match aircomp::distributions::OrderedDistances::new(r) {
        Ok(d) => bpp.joint_pdf_4nearest(&d).unwrap(),
        Err(_) => 0.0,
    };
    integrate(
        |r4| {
            integrate(
                |r3| {
                    integrate(
                        |r2| integrate(|r1| joint([r1, r2, r3, r4]), 0.0, r2, cfg).unwrap().value,
                        0.0,
                        r3,
                        cfg,
                    )
                    .unwrap()
                    .value
                },
                0.0,
                r4,
                cfg,
            )
            .unwrap()
            .value
        },
        0.0,
        bpp.radius,
        cfg,
    )
    .unwrap()
    .value
}

/// Unit mass of a density on `[a, b]`.
pub fn mass<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    integrate(f, a, b, QuadConfig::with_rel_tol(1e-12)).unwrap().value
}

/// Pearson statistic of `samples` over `bins` equiprobable cells of `cdf`.
pub fn chi_square_equiprobable<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, bins: usize) -> f64 {
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let b = ((cdf(x) * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let e = samples.len() as f64 / bins as f64;
    counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
}
