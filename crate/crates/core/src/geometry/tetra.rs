use super::Point3;
use crate::error::{Error, Result};

/// Four aBS indices, stored in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tetrahedron {
    pub vertex_ids: [usize; 4],
}

impl Tetrahedron {
    /// Builds a tetrahedron from distinct indices, sorting them.
    pub fn new(mut ids: [usize; 4]) -> Self {
        ids.sort_unstable();
        Self { vertex_ids: ids }
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertex_ids.contains(&v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Point3,
    pub radius: f64,
}

/// Signed volume of `(a, b, c, d)`; positive when `d` lies on the side of
/// `abc` that makes the frame right-handed.
pub fn signed_volume(a: Point3, b: Point3, c: Point3, d: Point3) -> f64 {
    (b - a).dot((c - a).cross(d - a)) / 6.0
}

/// Circumscribed sphere of a tetrahedron.
///
/// Fails when `|volume| < tol_volume`.
///
/// ```
/// use aircomp::geometry::{circumsphere, Point3};
/// let s = circumsphere(
///     [Point3::new(1.0, 1.0, 1.0), Point3::new(1.0, -1.0, -1.0),
///      Point3::new(-1.0, 1.0, -1.0), Point3::new(-1.0, -1.0, 1.0)],
///     1e-12,
/// ).unwrap();
/// assert!(s.center.norm() < 1e-12);
/// assert!((s.radius - 3f64.sqrt()).abs() < 1e-12);
/// ```
pub fn circumsphere(v: [Point3; 4], tol_volume: f64) -> Result<Sphere> {
    let vol = signed_volume(v[0], v[1], v[2], v[3]);
    if !(vol.abs() >= tol_volume) || vol == 0.0 {
        return Err(Error::Degenerate(format!("tetrahedron volume {vol:e} below tolerance {tol_volume:e}")));
    }
    let b = v[1] - v[0];
    let c = v[2] - v[0];
    let d = v[3] - v[0];
    let num = c.cross(d) * b.norm_sq() + d.cross(b) * c.norm_sq() + b.cross(c) * d.norm_sq();
    let denom = 2.0 * b.dot(c.cross(d));
    let offset = num * (1.0 / denom);
    Ok(Sphere { center: v[0] + offset, radius: offset.norm() })
}

fn closest_on_triangle(p: Point3, a: Point3, b: Point3, c: Point3) -> Point3 {
    // region tests on the triangle's Voronoi regions
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

/// Euclidean distance from `p` to the solid tetrahedron `v`; zero inside.
pub fn point_tetrahedron_distance(p: Point3, v: [Point3; 4]) -> f64 {
    let vol = signed_volume(v[0], v[1], v[2], v[3]);
    let faces = [[1, 2, 3, 0], [0, 3, 2, 1], [0, 1, 3, 2], [0, 2, 1, 3]];
    let mut inside = true;
    for f in &faces {
        let s = signed_volume(v[f[0]], v[f[1]], v[f[2]], p);
        let opp = signed_volume(v[f[0]], v[f[1]], v[f[2]], v[f[3]]);
        if s * opp < 0.0 {
            inside = false;
            break;
        }
    }
    if inside && vol != 0.0 {
        return 0.0;
    }
    faces
        .iter()
        .map(|f| p.distance(closest_on_triangle(p, v[f[0]], v[f[1]], v[f[2]])))
        .fold(f64::INFINITY, f64::min)
}
