//! Distance laws of a binomial point process in a ball.
//!
//! `N` aBSs are uniform in `b(0, R)` and the aUE sits at the origin, so a
//! single distance has CDF `(r/R)³`.

use crate::error::{domain, param, Result};
use crate::rng::{self, SimRng};
use crate::special;
use rand::Rng;

/// `N` points uniform in a ball of radius `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BppParams {
    pub n_abs: usize,
    pub radius: f64,
}

/// Distances to the four nearest aBSs, `0 < r1 < r2 < r3 < r4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderedDistances {
    pub r: [f64; 4],
}

impl OrderedDistances {
    pub fn new(r: [f64; 4]) -> Result<Self> {
        if !(r[0] > 0.0) || !r.windows(2).all(|w| w[0] < w[1]) || !r[3].is_finite() {
            return Err(domain(format!("distances must satisfy 0 < r1 < r2 < r3 < r4, got {r:?}")));
        }
        Ok(Self { r })
    }

    pub fn serving_max(&self) -> f64 {
        self.r[3]
    }
}

impl BppParams {
    /// Requires `N ≥ 5` and `R > 0`.
    pub fn new(n_abs: usize, radius: f64) -> Result<Self> {
        if n_abs < 5 {
            return Err(param(format!("need at least 5 aBSs, got {n_abs}")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(param(format!("radius must be positive and finite, got {radius}")));
        }
        Ok(Self { n_abs, radius })
    }

    fn n(&self) -> f64 {
        self.n_abs as f64
    }

    fn check_r(&self, r: f64) -> Result<()> {
        if !(0.0..=self.radius).contains(&r) {
            return Err(domain(format!("distance {r} outside [0, {}]", self.radius)));
        }
        Ok(())
    }

    /// CDF of the distance from the origin to any single aBS.
    pub fn nearest_cdf(&self, r: f64) -> Result<f64> {
        self.check_r(r)?;
        Ok((r / self.radius).powi(3))
    }

    /// Density `3 r² / R³` of a single distance.
    pub fn nearest_pdf(&self, r: f64) -> Result<f64> {
        self.check_r(r)?;
        Ok(3.0 * r * r / self.radius.powi(3))
    }

    /// Density of an interferer's distance given the serving boundary `d`:
    /// `3 r² / (R³ - d³)` on `[d, R]`.
    pub fn interferer_pdf_conditional(&self, d: f64, r: f64) -> Result<f64> {
        if !(d >= 0.0 && d < self.radius) {
            return Err(domain(format!("serving distance {d} outside [0, {})", self.radius)));
        }
        if r < d || r > self.radius {
            return Ok(0.0);
        }
        Ok(3.0 * r * r / (self.radius.powi(3) - d.powi(3)))
    }

    /// Log of the joint density of the four nearest distances.
    pub fn ln_joint_pdf_4nearest(&self, d: &OrderedDistances) -> Result<f64> {
        let r = &d.r;
        if r[3] > self.radius {
            return Err(domain(format!("r4 = {} exceeds R = {}", r[3], self.radius)));
        }
        let n = self.n();
        let r3 = self.radius.powi(3);
        let mut ln = (0..4).map(|j| (n - j as f64).ln()).sum::<f64>();
        ln += (n - 4.0) * (-(r[3] / self.radius).powi(3)).ln_1p();
        ln += r.iter().map(|&x| (3.0 * x * x / r3).ln()).sum::<f64>();
        Ok(ln)
    }

    /// Joint density of the four nearest distances.
    ///
    /// ```
    /// use aircomp::distributions::{BppParams, OrderedDistances};
    /// let p = BppParams::new(50, 3000.0).unwrap();
    /// let d = OrderedDistances::new([100.0, 200.0, 300.0, 400.0]).unwrap();
    /// assert!(p.joint_pdf_4nearest(&d).unwrap() > 0.0);
    /// ```
    pub fn joint_pdf_4nearest(&self, d: &OrderedDistances) -> Result<f64> {
        Ok(self.ln_joint_pdf_4nearest(d)?.exp())
    }

    /// Density of the `k`-th smallest of the `N` distances.
    pub fn order_statistic_pdf(&self, k: usize, r: f64) -> Result<f64> {
        if k == 0 || k > self.n_abs {
            return Err(param(format!("order {k} outside 1..={}", self.n_abs)));
        }
        self.check_r(r)?;
        if r == 0.0 || r == self.radius {
            return Ok(0.0);
        }
        let n = self.n();
        let f = (r / self.radius).powi(3);
        let ln_comb = special::ln_gamma(n + 1.0)? - special::ln_gamma(k as f64)? - special::ln_gamma(n - k as f64 + 1.0)?;
        let ln = ln_comb + (k as f64 - 1.0) * f.ln() + (n - k as f64) * (-f).ln_1p() + (3.0 * r * r / self.radius.powi(3)).ln();
        Ok(ln.exp())
    }

    /// Density of the fourth-nearest distance.
    pub fn fourth_nearest_pdf(&self, r: f64) -> Result<f64> {
        self.order_statistic_pdf(4, r)
    }

    /// Density of the common distance `x` from a cell circumcenter to its
    /// `k` vertices: `3 / (R B(ν, N-k+1)) (x/R)^(2k) (1-(x/R)³)^(N-k)` with
    /// `ν = (2k+1)/3`. For `k = 4` the normalizer is `B(3, N-3)`.
    pub fn equidistant_pdf(&self, k: usize, x: f64) -> Result<f64> {
        if k == 0 || k >= self.n_abs {
            return Err(param(format!("k = {k} must satisfy 1 <= k < N")));
        }
        self.check_r(x)?;
        if x == 0.0 || x == self.radius {
            return Ok(0.0);
        }
        let kf = k as f64;
        let u = x / self.radius;
        let ln_b = special::ln_beta((2.0 * kf + 1.0) / 3.0, self.n() - kf + 1.0)?;
        let ln = (3.0 / self.radius).ln() - ln_b + 2.0 * kf * u.ln() + (self.n() - kf) * (-u.powi(3)).ln_1p();
        Ok(ln.exp())
    }

    /// First `k` order statistics of the `N` distances, ascending.
    ///
    /// Uses the sequential representation of uniform order statistics, so
    /// the cost is `O(k)` rather than sorting `N` draws.
    pub fn sample_ordered_nearest(&self, k: usize, seed: u64) -> Result<Vec<f64>> {
        let mut rng = rng::substream(seed, 0);
        self.sample_ordered_nearest_with(&mut rng, k)
    }

    pub fn sample_ordered_nearest_with(&self, rng: &mut SimRng, k: usize) -> Result<Vec<f64>> {
        if k > self.n_abs {
            return Err(param(format!("k = {k} exceeds N = {}", self.n_abs)));
        }
        let mut out = Vec::with_capacity(k);
        let mut ln_mass = 0.0f64; // log of 1 - U_(j)
        for j in 0..k {
            let w = rng::open_unit(rng);
            ln_mass += w.ln() / (self.n_abs - j) as f64;
            let u = -ln_mass.exp_m1();
            out.push(self.radius * u.cbrt());
        }
        Ok(out)
    }

    /// Four nearest distances as a checked [`OrderedDistances`].
    pub fn sample_four_nearest(&self, rng: &mut SimRng) -> Result<OrderedDistances> {
        let s = self.sample_ordered_nearest_with(rng, 4)?;
        OrderedDistances::new([s[0], s[1], s[2], s[3]])
    }

    /// `count` independent interferer distances given the boundary `d`.
    pub fn sample_interferers_with(&self, rng: &mut SimRng, d: f64, count: usize) -> Result<Vec<f64>> {
        if !(d >= 0.0 && d < self.radius) {
            return Err(domain(format!("serving distance {d} outside [0, {})", self.radius)));
        }
        let (d3, r3) = (d.powi(3), self.radius.powi(3));
        Ok((0..count).map(|_| (d3 + rng.random::<f64>() * (r3 - d3)).cbrt()).collect())
    }
}
