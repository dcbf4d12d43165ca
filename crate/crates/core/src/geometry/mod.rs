//! Points, network realizations and the Delaunay tetrahedralization.

mod delaunay;
mod tetra;

pub use delaunay::{delaunay, empty_circumsphere_violations, Tetrahedralization};
pub use tetra::{circumsphere, point_tetrahedron_distance, signed_volume, Sphere, Tetrahedron};

use crate::error::{param, Error, Result};
use crate::rng::{self, SimRng};
use rand::Rng;
use std::io::{Read, Write};
use std::ops::{Add, Mul, Neg, Sub};

/// A point in R³, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(self, o: Self) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub(crate) fn coord(self) -> robust::Coord3D<f64> {
        robust::Coord3D { x: self.x, y: self.y, z: self.z }
    }
}

impl Add for Point3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Point3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// aBS positions inside the ball of radius `radius_m` around the origin,
/// where the aUE sits.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub radius_m: f64,
    pub points: Vec<Point3>,
    pub seed: u64,
}

impl NetworkRealization {
    /// Wraps explicit positions after checking they lie in the ball.
    pub fn new(radius_m: f64, points: Vec<Point3>, seed: u64) -> Result<Self> {
        if !(radius_m > 0.0) || !radius_m.is_finite() {
            return Err(param(format!("radius must be positive and finite, got {radius_m}")));
        }
        for (i, p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(param(format!("point {i} is not finite")));
            }
            if p.norm() > radius_m {
                return Err(param(format!(
                    "point {i} lies outside the ball: |p| = {} > {radius_m}",
                    p.norm()
                )));
            }
        }
        Ok(Self { radius_m, points, seed })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Writes `id,x,y,z` rows with a header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["id", "x", "y", "z"])?;
        for (i, p) in self.points.iter().enumerate() {
            out.write_record([i.to_string(), p.x.to_string(), p.y.to_string(), p.z.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads `id,x,y,z` rows. Ids must run `0..n` in order; `#` lines are skipped.
    pub fn read_csv<R: Read>(r: R, radius_m: f64, seed: u64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["id", "x", "y", "z"] {
            return Err(param(format!("expected header id,x,y,z, got {}", headers.iter().collect::<Vec<_>>().join(","))));
        }
        let mut points = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| param(format!("row {row}: missing column {k}")))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| param(format!("row {row}: {e}")))
            };
            let id: usize = rec
                .get(0)
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|e| param(format!("row {row}: bad id: {e}")))?;
            if id != row {
                return Err(param(format!("row {row}: expected id {row}, got {id}")));
            }
            points.push(Point3::new(field(1)?, field(2)?, field(3)?));
        }
        Self::new(radius_m, points, seed)
    }
}

/// Draws `n` points uniformly in the ball of radius `radius` (a binomial
/// point process).
///
/// ```
/// let net = aircomp::geometry::sample_bpp(50, 3000.0, 7).unwrap();
/// assert_eq!(net.points.len(), 50);
/// assert!(net.points.iter().all(|p| p.norm() <= 3000.0));
/// ```
pub fn sample_bpp(n: usize, radius: f64, seed: u64) -> Result<NetworkRealization> {
    let mut rng = rng::substream(seed, 0);
    let mut net = sample_bpp_with(&mut rng, n, radius)?;
    net.seed = seed;
    Ok(net)
}

/// As [`sample_bpp`], drawing from a caller-owned generator.
pub fn sample_bpp_with(rng: &mut SimRng, n: usize, radius: f64) -> Result<NetworkRealization> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(param(format!("radius must be positive and finite, got {radius}")));
    }
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        points.push(uniform_in_ball(rng, radius));
    }
    Ok(NetworkRealization { radius_m: radius, points, seed: 0 })
}

pub(crate) fn uniform_in_ball<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Point3 {
    let r = radius * rng.random::<f64>().cbrt();
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi = rng.random::<f64>() * std::f64::consts::TAU;
    let s = (1.0 - z * z).max(0.0).sqrt();
    let mut p = Point3::new(r * s * phi.cos(), r * s * phi.sin(), r * z);
    while p.norm() > radius {
        p = p * (1.0 - f64::EPSILON);
    }
    p
}

/// Indices of the `k` points nearest to `p`, by ascending distance (ties by index).
pub fn k_nearest(net: &NetworkRealization, p: Point3, k: usize) -> Result<Vec<usize>> {
    if k > net.points.len() {
        return Err(param(format!("k = {k} exceeds the {} available points", net.points.len())));
    }
    let mut idx: Vec<(f64, usize)> = net.points.iter().enumerate().map(|(i, q)| (q.distance(p), i)).collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < idx.len() && k > 0 {
        idx.select_nth_unstable_by(k - 1, cmp);
        idx.truncate(k);
    } else {
        idx.truncate(k);
    }
    idx.sort_by(cmp);
    Ok(idx.into_iter().map(|(_, i)| i).collect())
}

/// Mean absolute volume of a set of tetrahedra.
pub fn mean_cell_volume(tess: &Tetrahedralization) -> Result<f64> {
    if tess.tetrahedra.is_empty() {
        return Err(Error::Parameter("tessellation has no cells".into()));
    }
    let vols: Vec<f64> = (0..tess.tetrahedra.len()).map(|i| tess.volume(i)).collect();
    Ok(crate::stats::pairwise_sum(&vols) / vols.len() as f64)
}
