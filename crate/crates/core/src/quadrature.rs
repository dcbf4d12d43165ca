//! Adaptive Gauss–Kronrod (7/15) quadrature with global interval subdivision.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-300, rel_tol: 1e-10, max_subdivisions: 2000 }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    if !resk.is_finite() {
        return Err(Error::Numeric(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (1.0f64).min((200.0 * error / resasc).powf(1.5));
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Segment { a, b, value, error })
}

/// Integrates `f` over `[a, b]`.
///
/// ```
/// use aircomp::quadrature::{integrate, QuadConfig};
/// let r = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, QuadConfig::default()).unwrap();
/// assert!((r.value - 2.0).abs() < 1e-12);
/// ```
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<QuadResult> {
    integrate_panels(f, &[a, b], cfg)
}

/// Integrates `f` over consecutive panels `points[0]..points[1]..points[n]`,
/// refining wherever the global error estimate is largest.
pub fn integrate_panels<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    cfg: QuadConfig,
) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(Error::Parameter("integration needs at least two breakpoints".into()));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::Parameter("integration limits must be finite".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let s = gk15(&mut f, w[0], w[1])?;
        evaluations += 15;
        total += s.value;
        total_err += s.error;
        heap.push(s);
    }
    let mut subdivisions = 0;
    while total_err > cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::Numeric(format!(
                "quadrature did not converge: value {total:e}, error estimate {total_err:e} after {subdivisions} subdivisions"
            )));
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // interval cannot be split further in f64
            heap.push(worst);
            return Err(Error::Numeric(format!(
                "quadrature interval underflow near {mid:e}, error estimate {total_err:e}"
            )));
        }
        let left = gk15(&mut f, worst.a, mid)?;
        let right = gk15(&mut f, mid, worst.b)?;
        evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        if subdivisions % 64 == 0 {
            // refresh the running sums to shed accumulated rounding
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult { value, error, evaluations })
}

/// Integrates `f` over `[a, ∞)` through the map `x = a + t / (1 - t)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, cfg: QuadConfig) -> Result<QuadResult> {
    integrate(
        |t| {
            let u = 1.0 - t;
            let x = a + t / u;
            let y = f(x) / (u * u);
            if y.is_nan() && t >= 1.0 { 0.0 } else { y }
        },
        0.0,
        1.0,
        cfg,
    )
}
