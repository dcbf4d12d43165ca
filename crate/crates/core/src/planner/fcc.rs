use crate::error::{param, Result};
use crate::geometry::Point3;

/// Integer lattice sites `(i, j, k)` with even `i + j + k`; scaled by
/// `√2 r` they form an FCC packing of spheres of radius `r`.
fn lattice_sites(bound: f64) -> Vec<[i64; 3]> {
    let m = bound.ceil() as i64;
    let mut out = Vec::new();
    for i in -m..=m {
        for j in -m..=m {
            for k in -m..=m {
                if (i + j + k).rem_euclid(2) == 0 && ((i * i + j * j + k * k) as f64).sqrt() <= bound {
                    out.push([i, j, k]);
                }
            }
        }
    }
    out.sort_by_key(|s| (s[0] * s[0] + s[1] * s[1] + s[2] * s[2], s[0], s[1], s[2]));
    out
}

/// Centers of an FCC packing of spheres of radius `sphere_radius`, one at
/// the origin, keeping every center within `domain_radius + sphere_radius`.
/// Ordered by distance from the origin.
///
/// ```
/// use aircomp::planner::fcc_sphere_centers;
/// let c = fcc_sphere_centers(5.0, 5.0).unwrap();
/// assert_eq!(c[0].norm(), 0.0);
/// assert_eq!(c.len(), 13); // origin and its 12 neighbours
/// ```
pub fn fcc_sphere_centers(domain_radius: f64, sphere_radius: f64) -> Result<Vec<Point3>> {
    if !(sphere_radius > 0.0) || !sphere_radius.is_finite() {
        return Err(param(format!("sphere radius must be positive, got {sphere_radius}")));
    }
    if !(domain_radius >= 0.0) || !domain_radius.is_finite() {
        return Err(param(format!("domain radius must be non-negative, got {domain_radius}")));
    }
    let unit = std::f64::consts::SQRT_2 * sphere_radius;
    let limit = domain_radius + sphere_radius;
    let sites = lattice_sites(limit / unit + 1e-12);
    Ok(sites
        .into_iter()
        .map(|s| Point3::new(s[0] as f64 * unit, s[1] as f64 * unit, s[2] as f64 * unit))
        .filter(|p| p.norm() <= limit * (1.0 + 1e-12))
        .collect())
}

/// Fraction of space filled by the packing, counted in one conventional
/// cubic cell of edge `2√2 r`.
pub fn fcc_packing_efficiency() -> f64 {
    // conventional cell [0, 2)³ in lattice units; sphere radius 1/√2 units
    let sites = (0..2i64)
        .flat_map(|i| (0..2i64).flat_map(move |j| (0..2i64).map(move |k| [i, j, k])))
        .filter(|s| (s[0] + s[1] + s[2]) % 2 == 0)
        .count() as f64;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    sites * 4.0 / 3.0 * std::f64::consts::PI * r.powi(3) / 8.0
}
