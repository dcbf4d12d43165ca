use crate::error::{param, Result};
use std::f64::consts::PI;

/// Mean interference of a 3D Poisson field, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PppInterference {
    Finite(f64),
    Divergent,
}

/// `E[I] = 4πλ ∫ r^(2-α) dr` over `r_min ≤ r ≤ r_max` for a PPP of
/// intensity `lambda` in R³. `r_max` may be infinite and `r_min` zero; the
/// mean diverges at infinity for `α ≤ 3` and at the origin for `α ≥ 3`.
///
/// ```
/// use aircomp::analytics::{mean_total_interference_ppp, PppInterference};
/// assert_eq!(
///     mean_total_interference_ppp(1e-9, 3.0, 1.0, f64::INFINITY).unwrap(),
///     PppInterference::Divergent
/// );
/// ```
pub fn mean_total_interference_ppp(lambda: f64, alpha: f64, r_min: f64, r_max: f64) -> Result<PppInterference> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(param(format!("intensity must be positive, got {lambda}")));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(param(format!("path-loss exponent must be positive, got {alpha}")));
    }
    if !(r_min >= 0.0) || !(r_max > r_min) {
        return Err(param(format!("need 0 <= r_min < r_max, got [{r_min}, {r_max}]")));
    }
    if r_max.is_infinite() && alpha <= 3.0 {
        return Ok(PppInterference::Divergent);
    }
    if r_min == 0.0 && alpha >= 3.0 {
        return Ok(PppInterference::Divergent);
    }
    let k = 4.0 * PI * lambda;
    let v = if alpha == 3.0 {
        k * (r_max / r_min).ln()
    } else {
        let p = 3.0 - alpha;
        let upper = if r_max.is_infinite() { 0.0 } else { r_max.powf(p) };
        let lower = if r_min == 0.0 { 0.0 } else { r_min.powf(p) };
        k * (upper - lower) / p
    };
    Ok(PppInterference::Finite(v))
}
