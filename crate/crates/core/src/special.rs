//! Gamma-family special functions.
//!
//! Everything here works in `f64`. Gamma uses a Lanczos approximation,
//! the incomplete gamma switches between its power series and a continued
//! fraction at `x = s + 1`, and the generalized exponential integral
//! switches at `x = 1.5`.

use crate::error::{domain, Result};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const ZETA3: f64 = 1.202_056_903_159_594_2;
const MAX_ITER: usize = 100_000;
const TINY: f64 = 1e-300;

/// Switch point between the series and continued-fraction forms of `E_v`.
pub const EXPINT_SWITCH: f64 = 1.5;

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (z - 1)
    let mut a = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("ln_gamma requires finite x > 0, got {x}")));
    }
    if x < 0.5 {
        // reflection keeps accuracy for tiny arguments
        let s = (PI * x).sin();
        return Ok(PI.ln() - s.ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// `Γ(x)` for any real `x` that is not a non-positive integer.
///
/// ```
/// let g = aircomp::special::gamma(5.0).unwrap();
/// assert!((g - 24.0).abs() < 1e-12);
/// ```
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("gamma requires a finite argument, got {x}")));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(domain(format!("gamma has a pole at {x}")));
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        return Ok(PI / (s * gamma(1.0 - x)?));
    }
    if x > 171.7 {
        return Err(domain(format!("gamma({x}) overflows f64")));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // split the power so t^(z+1/2) does not overflow before e^-t pulls it back
    let h = t.powf(0.5 * (z + 0.5));
    Ok((2.0 * PI).sqrt() * h * (h * (-t).exp()) * lanczos_sum(z))
}

/// `ln B(a, b)` for `a, b > 0`.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    Ok(ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?)
}

/// Euler beta function `B(a, b)` for `a, b > 0`.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    Ok(ln_beta(a, b)?.exp())
}

fn check_incomplete_args(s: f64, x: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain(format!("incomplete gamma requires s > 0, got {s}")));
    }
    if !(x >= 0.0) || x.is_nan() {
        return Err(domain(format!("incomplete gamma requires x >= 0, got {x}")));
    }
    Ok(())
}

/// Series sum `Σ x^n / (s (s+1) ... (s+n))`, so that `γ(s,x) = x^s e^-x · sum`.
fn lower_series(s: f64, x: f64) -> Result<f64> {
    let mut ap = s;
    let mut del = 1.0 / s;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-17 {
            return Ok(sum);
        }
    }
    Err(crate::Error::Numeric(format!(
        "incomplete gamma series did not converge for s={s}, x={x}"
    )))
}

/// Continued fraction `h` with `Γ(s,x) = x^s e^-x · h` (modified Lentz).
fn upper_fraction(s: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok(h);
        }
    }
    Err(crate::Error::Numeric(format!(
        "incomplete gamma continued fraction did not converge for s={s}, x={x}"
    )))
}

/// Regularized lower incomplete gamma `P(s, x) = γ(s, x) / Γ(s)`.
pub fn regularized_lower_gamma(s: f64, x: f64) -> Result<f64> {
    check_incomplete_args(s, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let log_pref = s * x.ln() - x - ln_gamma(s)?;
    if x < s + 1.0 {
        Ok((log_pref + lower_series(s, x)?.ln()).exp().min(1.0))
    } else {
        let q = (log_pref + upper_fraction(s, x)?.ln()).exp();
        Ok((1.0 - q).clamp(0.0, 1.0))
    }
}

/// Regularized upper incomplete gamma `Q(s, x) = 1 - P(s, x)`.
pub fn regularized_upper_gamma(s: f64, x: f64) -> Result<f64> {
    check_incomplete_args(s, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let log_pref = s * x.ln() - x - ln_gamma(s)?;
    if x < s + 1.0 {
        let p = (log_pref + lower_series(s, x)?.ln()).exp();
        Ok((1.0 - p).clamp(0.0, 1.0))
    } else {
        Ok((log_pref + upper_fraction(s, x)?.ln()).exp().min(1.0))
    }
}

/// Lower incomplete gamma `γ(s, x) = ∫_0^x t^(s-1) e^-t dt`.
///
/// ```
/// let v = aircomp::special::lower_incomplete_gamma(1.0, 2.0).unwrap();
/// assert!((v - (1.0 - (-2.0f64).exp())).abs() < 1e-14);
/// ```
pub fn lower_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    check_incomplete_args(s, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < s + 1.0 {
        let log_pref = s * x.ln() - x;
        Ok((log_pref + lower_series(s, x)?.ln()).exp())
    } else {
        Ok(gamma(s)? * regularized_lower_gamma(s, x)?)
    }
}

/// Generalized exponential integral `E_v(x) = ∫_1^∞ e^(-x t) t^(-v) dt`.
///
/// Defined for `v > 0` and `x > 0`, and at `x = 0` when `v > 1`.
///
/// ```
/// use aircomp::special::generalized_expint;
/// // E_v(0) = 1 / (v - 1)
/// assert!((generalized_expint(3.0, 0.0).unwrap() - 0.5).abs() < 1e-15);
/// ```
pub fn generalized_expint(v: f64, x: f64) -> Result<f64> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(domain(format!("E_v requires v > 0, got {v}")));
    }
    if !(x >= 0.0) || x.is_nan() {
        return Err(domain(format!("E_v requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        if v > 1.0 {
            return Ok(1.0 / (v - 1.0));
        }
        return Err(crate::Error::Divergent(format!(
            "E_v(0) diverges for v = {v} <= 1"
        )));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x > EXPINT_SWITCH {
        expint_fraction(v, x)
    } else {
        expint_series(v, x)
    }
}

fn expint_fraction(v: f64, x: f64) -> Result<f64> {
    let mut b = x + v;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        let an = -fi * (v - 1.0 + fi);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok(h * (-x).exp());
        }
    }
    Err(crate::Error::Numeric(format!(
        "E_v continued fraction did not converge for v={v}, x={x}"
    )))
}

/// Polygamma values `ψ^(j)(m + 1)` for `j = 0..=3` at a non-negative integer `m`.
fn polygamma_at_integer(m: usize) -> [f64; 4] {
    let (mut h1, mut h2, mut h3, mut h4) = (0.0, 0.0, 0.0, 0.0);
    for k in 1..=m {
        let k = k as f64;
        h1 += 1.0 / k;
        h2 += 1.0 / (k * k);
        h3 += 1.0 / (k * k * k);
        h4 += 1.0 / (k * k * k * k);
    }
    [
        -EULER_GAMMA + h1,
        PI * PI / 6.0 - h2,
        -2.0 * ZETA3 + 2.0 * h3,
        PI.powi(4) / 15.0 - 6.0 * h4,
    ]
}

fn expint_series(v: f64, x: f64) -> Result<f64> {
    let n = v.round();
    let eps = n - v;
    let near_integer = n >= 1.0 && eps.abs() < 1e-3;
    // index of the term whose denominator (1 - v + k) vanishes as v -> n
    let special_k = if near_integer { Some(n as usize - 1) } else { None };

    let mut sum = 0.0;
    let mut term = 1.0; // (-x)^k / k!
    let mut k = 0usize;
    loop {
        if Some(k) != special_k {
            let contrib = term / (1.0 - v + k as f64);
            sum -= contrib;
            if k > 2 && contrib.abs() < 1e-17 * sum.abs().max(1e-300) && (k as f64) > v {
                break;
            }
        }
        k += 1;
        if k > 1000 {
            return Err(crate::Error::Numeric(format!(
                "E_v series did not converge for v={v}, x={x}"
            )));
        }
        term *= -x / k as f64;
    }

    let singular = match special_k {
        None => gamma(1.0 - v)? * x.powf(v - 1.0),
        Some(m) => {
            // Γ(1-v) x^(v-1) - (-x)^m / (m! ε), combined without cancellation
            let mf = m as f64;
            let lead = (-x).powi(m as i32) / gamma(mf + 1.0)?;
            if eps == 0.0 {
                let psi = polygamma_at_integer(m)[0];
                lead * (psi - x.ln())
            } else {
                let y = PI * eps;
                let y2 = y * y;
                let ln_sinc = y2 / 6.0 + y2 * y2 / 180.0 + y2 * y2 * y2 / 2835.0;
                let p = polygamma_at_integer(m);
                let e2 = eps * eps;
                let lg_diff = eps * p[0] - e2 / 2.0 * p[1] + e2 * eps / 6.0 * p[2]
                    - e2 * e2 / 24.0 * p[3];
                let g = ln_sinc - eps * x.ln() + lg_diff;
                lead * g.exp_m1() / eps
            }
        }
    };
    Ok(singular + sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_factorials() {
        let mut f = 1.0f64;
        for n in 1..=30u32 {
            let g = gamma(n as f64).unwrap();
            assert!(((g - f) / f).abs() < 1e-13, "n={n}");
            f *= n as f64;
        }
    }

    #[test]
    fn gamma_negative_non_integer() {
        // Γ(-1/2) = -2 sqrt(pi)
        let g = gamma(-0.5).unwrap();
        assert!((g + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!(gamma(-2.0).is_err());
        assert!(gamma(0.0).is_err());
    }

    #[test]
    fn expint_integer_order_recurrence() {
        // E_{n+1}(x) = (e^-x - x E_n(x)) / n
        for &x in &[0.1, 0.7, 1.5, 1.6, 4.0] {
            for n in 1..6 {
                let lhs = generalized_expint(n as f64 + 1.0, x).unwrap();
                let rhs = ((-x).exp() - x * generalized_expint(n as f64, x).unwrap()) / n as f64;
                assert!(((lhs - rhs) / lhs).abs() < 1e-11, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn expint_continuous_across_integer_order() {
        for &x in &[0.2, 0.9, 1.4] {
            let a = generalized_expint(2.0 - 1.1e-3, x).unwrap();
            let b = generalized_expint(2.0 - 0.9e-3, x).unwrap();
            let c = generalized_expint(2.0, x).unwrap();
            let slope = (a - b) / 0.2e-3;
            let predicted = b - slope * 0.9e-3;
            assert!(((predicted - c) / c).abs() < 1e-6, "x={x}");
        }
    }
}
