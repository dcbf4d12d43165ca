use crate::error::{domain, Result};
use crate::special;

/// `interferers` i.i.d. aBSs uniform in the shell `d < r ≤ R`, each
/// contributing `r^(-α)`. The count may be fractional after thinning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceField {
    pub alpha: f64,
    pub radius: f64,
    pub interferers: f64,
}

/// Gamma law with `shape` v and `scale` θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaApprox {
    pub shape: f64,
    pub scale: f64,
}

impl GammaApprox {
    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        special::regularized_lower_gamma(self.shape, x / self.scale)
    }

    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(domain(format!("Gamma density needs x > 0, got {x}")));
        }
        let v = self.shape;
        Ok((v - 1.0) * x.ln() - x / self.scale - special::ln_gamma(v)? - v * self.scale.ln())
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.ln_pdf(x)?.exp())
    }
}

/// `∫_a^b x^(p-1) dx`, i.e. `(b^p - a^p) / p`, or `ln(b/a)` when `p = 0`,
/// evaluated without cancellation for `p` near zero.
pub fn power_integral(a: f64, b: f64, p: f64) -> f64 {
    let l = (b / a).ln();
    if p == 0.0 {
        return l;
    }
    let x = p * l;
    if x.abs() < 1e-8 {
        return a.powf(p) * l * (1.0 + 0.5 * x);
    }
    a.powf(p) * x.exp_m1() / p
}

impl InterferenceField {
    fn check_d(&self, d: f64) -> Result<()> {
        if !(d > 0.0 && d <= self.radius) {
            return Err(domain(format!("serving distance {d} outside (0, {}]", self.radius)));
        }
        Ok(())
    }

    /// `E[exp(-z r^(-α))]` for one interferer beyond `d`:
    /// `3 / (α (R³ - d³)) [R³ E_v(z R^-α) - d³ E_v(z d^-α)]`, `v = (3+α)/α`.
    pub fn per_interferer_mgf(&self, d: f64, z: f64) -> Result<f64> {
        self.check_d(d)?;
        if !(z >= 0.0) || z.is_infinite() {
            return Err(domain(format!("MGF argument must be finite and non-negative, got {z}")));
        }
        if z == 0.0 {
            return Ok(1.0);
        }
        let (r, a) = (self.radius, self.alpha);
        if r - d <= 1e-6 * r {
            // shell too thin for the closed form; midpoint rule is exact to O(width²)
            let m = 0.5 * (r + d);
            return Ok((-z * m.powf(-a)).exp());
        }
        let v = (3.0 + a) / a;
        let r3 = r.powi(3);
        let d3 = d.powi(3);
        let span = shell_volume_factor(d, r);
        let tr = r3 * special::generalized_expint(v, z * r.powf(-a))?;
        let td = d3 * special::generalized_expint(v, z * d.powf(-a))?;
        Ok((3.0 / (a * span) * (tr - td)).clamp(0.0, 1.0))
    }

    /// Laplace transform of the aggregate interference beyond `d`.
    ///
    /// ```
    /// use aircomp::analytics::InterferenceField;
    /// let f = InterferenceField { alpha: 3.0, radius: 3000.0, interferers: 46.0 };
    /// assert_eq!(f.mgf(500.0, 0.0).unwrap(), 1.0);
    /// assert!(f.mgf(500.0, 1e8).unwrap() < 1.0);
    /// ```
    pub fn mgf(&self, d: f64, z: f64) -> Result<f64> {
        let b = self.per_interferer_mgf(d, z)?;
        if self.interferers == 0.0 {
            return Ok(1.0);
        }
        if b == 0.0 {
            return Ok(0.0);
        }
        Ok((self.interferers * b.ln()).exp())
    }

    /// First and second moments of one interferer's power beyond `d`.
    fn unit_moments(&self, d: f64) -> Result<(f64, f64)> {
        self.check_d(d)?;
        let (r, a) = (self.radius, self.alpha);
        if d == r {
            let p = r.powf(-a);
            return Ok((p, p * p));
        }
        let span = shell_volume_factor(d, r);
        let m1 = 3.0 * power_integral(d, r, 3.0 - a) / span;
        let m2 = 3.0 * power_integral(d, r, 3.0 - 2.0 * a) / span;
        Ok((m1, m2))
    }

    /// Mean and variance of the aggregate interference beyond `d`.
    pub fn moments(&self, d: f64) -> Result<(f64, f64)> {
        let (m1, m2) = self.unit_moments(d)?;
        let n = self.interferers;
        Ok((n * m1, n * (m2 - m1 * m1).max(0.0)))
    }

    /// Gamma law matching the mean and variance of the interference:
    /// `θ = P₂/P₁ - 3 P₁ / (R³ - d³)` and `v = n / (P₂ (R³ - d³) / (3 P₁²) - 1)`
    /// with `P_k = ∫_d^R x^(2 - kα) dx`.
    pub fn gamma_approx(&self, d: f64) -> Result<GammaApprox> {
        self.check_d(d)?;
        if self.interferers <= 0.0 {
            return Err(domain("Gamma approximation needs at least one interferer"));
        }
        let (r, a) = (self.radius, self.alpha);
        if r - d <= 1e-9 * r {
            return Err(domain(format!("interference beyond d = {d} is deterministic")));
        }
        let span = shell_volume_factor(d, r);
        let p1 = power_integral(d, r, 3.0 - a);
        let p2 = power_integral(d, r, 3.0 - 2.0 * a);
        let ratio = p2 * span / (3.0 * p1 * p1);
        let scale = p2 / p1 - 3.0 * p1 / span;
        let shape = self.interferers / (ratio - 1.0);
        if !(shape > 0.0 && scale > 0.0) || !shape.is_finite() || !scale.is_finite() {
            return Err(domain(format!("Gamma fit failed at d = {d}: shape {shape}, scale {scale}")));
        }
        Ok(GammaApprox { shape, scale })
    }
}

/// `R³ - d³`, factored to avoid cancellation when `d` is close to `R`.
pub(crate) fn shell_volume_factor(d: f64, r: f64) -> f64 {
    (r - d) * (r * r + r * d + d * d)
}
