//! Incremental (Bowyer–Watson) 3D Delaunay tetrahedralization.
//!
//! Cells outside the convex hull are represented as "infinite" cells that
//! share a vertex at infinity, so the finite cells always tile the hull
//! exactly. Orientation and in-sphere tests are exact; cospherical ties are
//! broken by a symbolic perturbation of the lifted coordinate that favours
//! lower point indices, which makes the output unique for any input in
//! which not all points are coplanar.

use super::{NetworkRealization, Point3, Sphere, Tetrahedron};
use crate::error::{Error, Result};
use robust::{insphere, orient2d, orient3d, Coord, Coord3D};
use std::collections::HashMap;

const INF: usize = usize::MAX;

#[derive(Debug, Clone, Copy)]
struct Cell {
    v: [usize; 4],
    /// `n[i]` is the cell across the face opposite `v[i]`.
    n: [usize; 4],
    alive: bool,
}

impl Cell {
    fn inf_slot(&self) -> Option<usize> {
        self.v.iter().position(|&x| x == INF)
    }
}

struct Builder<'a> {
    pts: Vec<Coord3D<f64>>,
    _src: &'a [Point3],
    cells: Vec<Cell>,
    free: Vec<usize>,
    mark: Vec<u64>,
    stamp: u64,
    last: usize,
}

/// Delaunay tetrahedralization of a network realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Tetrahedralization {
    pub network: NetworkRealization,
    /// Cells in canonical order (sorted vertex ids, then lexicographic).
    pub tetrahedra: Vec<Tetrahedron>,
    /// `adjacency[t][j]` is the cell sharing the face opposite
    /// `tetrahedra[t].vertex_ids[j]`, or `None` on the hull.
    pub adjacency: Vec<[Option<usize>; 4]>,
}

/// Computes the Delaunay tetrahedralization of `net`.
///
/// Fails on fewer than four points, duplicate points, or when all points
/// are coplanar.
///
/// ```
/// use aircomp::geometry::{delaunay, sample_bpp};
/// let net = sample_bpp(40, 1000.0, 11).unwrap();
/// let tess = delaunay(&net).unwrap();
/// assert!(tess.tetrahedra.len() >= 40);
/// ```
pub fn delaunay(net: &NetworkRealization) -> Result<Tetrahedralization> {
    let pts = &net.points;
    if pts.len() < 4 {
        return Err(Error::Degenerate(format!(
            "need at least 4 points for a tetrahedralization, got {}",
            pts.len()
        )));
    }
    check_duplicates(pts)?;
    let mut b = Builder {
        pts: pts.iter().map(|p| p.coord()).collect(),
        _src: pts,
        cells: Vec::with_capacity(pts.len() * 8),
        free: Vec::new(),
        mark: Vec::new(),
        stamp: 0,
        last: 0,
    };
    let init = b.initial_simplex()?;
    b.build_initial(init);
    for p in 0..pts.len() {
        if init.contains(&p) {
            continue;
        }
        b.insert(p)?;
    }
    Ok(b.finish(net.clone()))
}

fn check_duplicates(pts: &[Point3]) -> Result<()> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| {
        let (p, q) = (pts[a], pts[b]);
        p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)).then(p.z.total_cmp(&q.z))
    });
    for w in order.windows(2) {
        if pts[w[0]] == pts[w[1]] {
            return Err(Error::Degenerate(format!("points {} and {} coincide", w[0].min(w[1]), w[0].max(w[1]))));
        }
    }
    Ok(())
}

fn collinear(a: Coord3D<f64>, b: Coord3D<f64>, c: Coord3D<f64>) -> bool {
    let proj = |p: Coord3D<f64>, i: usize| match i {
        0 => Coord { x: p.x, y: p.y },
        1 => Coord { x: p.y, y: p.z },
        _ => Coord { x: p.x, y: p.z },
    };
    (0..3).all(|i| orient2d(proj(a, i), proj(b, i), proj(c, i)) == 0.0)
}

fn face_key(v: &[usize; 4], skip: usize) -> [usize; 3] {
    let mut k = [0usize; 3];
    let mut j = 0;
    for (i, &x) in v.iter().enumerate() {
        if i != skip {
            k[j] = x;
            j += 1;
        }
    }
    k.sort_unstable();
    k
}

impl Builder<'_> {
    fn orient(&self, v: [usize; 4]) -> f64 {
        orient3d(self.pts[v[0]], self.pts[v[1]], self.pts[v[2]], self.pts[v[3]])
    }

    fn initial_simplex(&self) -> Result<[usize; 4]> {
        let n = self.pts.len();
        let a = 0;
        let b = 1; // duplicates are already excluded
        let c = (2..n)
            .find(|&k| !collinear(self.pts[a], self.pts[b], self.pts[k]))
            .ok_or_else(|| Error::Degenerate("all points are collinear".into()))?;
        let d = (2..n)
            .find(|&k| k != c && self.orient([a, b, c, k]) != 0.0)
            .ok_or_else(|| Error::Degenerate("all points are coplanar".into()))?;
        if self.orient([a, b, c, d]) > 0.0 {
            Ok([a, b, c, d])
        } else {
            Ok([a, b, d, c])
        }
    }

    fn alloc(&mut self, cell: Cell) -> usize {
        if let Some(id) = self.free.pop() {
            self.cells[id] = cell;
            id
        } else {
            self.cells.push(cell);
            self.mark.push(0);
            self.cells.len() - 1
        }
    }

    fn build_initial(&mut self, f: [usize; 4]) {
        let mut ids = vec![self.alloc(Cell { v: f, n: [INF; 4], alive: true })];
        for i in 0..4 {
            let mut w = f;
            w[i] = INF;
            let others: Vec<usize> = (0..4).filter(|&j| j != i).collect();
            w.swap(others[0], others[1]);
            ids.push(self.alloc(Cell { v: w, n: [INF; 4], alive: true }));
        }
        let mut faces: HashMap<[usize; 3], (usize, usize)> = HashMap::new();
        for &c in &ids {
            for j in 0..4 {
                self.link_face(&mut faces, c, j);
            }
        }
        self.last = ids[0];
    }

    fn link_face(&mut self, faces: &mut HashMap<[usize; 3], (usize, usize)>, c: usize, j: usize) {
        let key = face_key(&self.cells[c].v, j);
        if let Some((oc, oj)) = faces.remove(&key) {
            self.cells[c].n[j] = oc;
            self.cells[oc].n[oj] = c;
        } else {
            faces.insert(key, (c, j));
        }
    }

    /// Sign of the perturbed in-sphere determinant for a finite, positively
    /// oriented cell `v` and query point `p`.
    fn perturbed_insphere(&self, v: [usize; 4], p: usize) -> f64 {
        let pt = |i: usize| self.pts[i];
        let det = insphere(pt(v[0]), pt(v[1]), pt(v[2]), pt(v[3]), pt(p));
        if det != 0.0 {
            return det;
        }
        let ids = [v[0], v[1], v[2], v[3], p];
        let mut order = [0usize, 1, 2, 3, 4];
        order.sort_by_key(|&k| ids[k]);
        for &pos in &order {
            let mut rest = [0usize; 4];
            let mut j = 0;
            for (k, &id) in ids.iter().enumerate() {
                if k != pos {
                    rest[j] = id;
                    j += 1;
                }
            }
            let minor = self.orient(rest);
            if minor != 0.0 {
                // cofactor of the lifted column at row `pos`
                return if (pos + 3) % 2 == 0 { minor } else { -minor };
            }
        }
        unreachable!("a non-degenerate cell always yields a non-zero cofactor")
    }

    fn in_conflict(&self, c: usize, p: usize) -> bool {
        let cell = &self.cells[c];
        match cell.inf_slot() {
            None => self.perturbed_insphere(cell.v, p) > 0.0,
            Some(k) => {
                let mut w = cell.v;
                w[k] = p;
                let o = self.orient(w);
                if o > 0.0 {
                    true
                } else if o < 0.0 {
                    false
                } else {
                    let nb = cell.n[k];
                    self.perturbed_insphere(self.cells[nb].v, p) > 0.0
                }
            }
        }
    }

    fn locate(&self, p: usize) -> usize {
        let mut c = self.last;
        if !self.cells[c].alive {
            c = self.cells.iter().position(|x| x.alive).expect("triangulation has live cells");
        }
        if let Some(k) = self.cells[c].inf_slot() {
            c = self.cells[c].n[k];
        }
        let limit = 4 * self.cells.len() + 64;
        for step in 0..limit {
            let cell = self.cells[c];
            if cell.inf_slot().is_some() {
                return c;
            }
            let mut moved = false;
            for j in 0..4 {
                let i = (j + step) % 4;
                let mut w = cell.v;
                w[i] = p;
                if self.orient(w) < 0.0 {
                    c = cell.n[i];
                    moved = true;
                    break;
                }
            }
            if !moved {
                return c;
            }
        }
        log::debug!("point location walk exceeded {limit} steps, scanning");
        (0..self.cells.len())
            .find(|&i| self.cells[i].alive && self.in_conflict(i, p))
            .expect("some cell conflicts with a new point")
    }

    fn insert(&mut self, p: usize) -> Result<()> {
        let mut seed = self.locate(p);
        if !self.in_conflict(seed, p) {
            seed = (0..self.cells.len())
                .find(|&i| self.cells[i].alive && self.in_conflict(i, p))
                .ok_or_else(|| Error::Degenerate(format!("no cell conflicts with point {p}")))?;
        }
        self.stamp += 2;
        let inside = self.stamp;
        let outside = self.stamp + 1;
        self.mark[seed] = inside;
        let mut stack = vec![seed];
        let mut cavity = vec![seed];
        let mut boundary: Vec<([usize; 4], usize, usize)> = Vec::new();
        while let Some(c) = stack.pop() {
            for i in 0..4 {
                let nb = self.cells[c].n[i];
                if self.mark[nb] == inside {
                    continue;
                }
                if self.mark[nb] != outside && self.in_conflict(nb, p) {
                    self.mark[nb] = inside;
                    stack.push(nb);
                    cavity.push(nb);
                } else {
                    self.mark[nb] = outside;
                    let mut v = self.cells[c].v;
                    v[i] = p;
                    boundary.push((v, i, nb));
                }
            }
        }
        for &c in &cavity {
            self.cells[c].alive = false;
            self.free.push(c);
        }
        let mut faces: HashMap<[usize; 3], (usize, usize)> = HashMap::with_capacity(boundary.len() * 3);
        let mut last_finite = None;
        for (v, i, nb) in boundary {
            if !v.contains(&INF) {
                if self.orient(v) <= 0.0 {
                    return Err(Error::Degenerate(format!("inserting point {p} produced a flat cell")));
                }
            }
            let mut n = [INF; 4];
            n[i] = nb;
            let nc = self.alloc(Cell { v, n, alive: true });
            if !v.contains(&INF) {
                last_finite = Some(nc);
            }
            // the outside cell's slot is the vertex it does not share with the face
            let key = face_key(&v, i);
            let ncell = &mut self.cells[nb];
            let slot = (0..4).find(|&s| !key.contains(&ncell.v[s])).expect("neighbour shares the face");
            ncell.n[slot] = nc;
            for j in 0..4 {
                if j != i {
                    self.link_face(&mut faces, nc, j);
                }
            }
        }
        debug_assert!(faces.is_empty(), "cavity boundary is not a closed surface");
        self.last = last_finite.unwrap_or_else(|| self.cells.iter().position(|c| c.alive && c.inf_slot().is_none()).unwrap_or(0));
        Ok(())
    }

    fn finish(self, network: NetworkRealization) -> Tetrahedralization {
        let finite: Vec<usize> =
            (0..self.cells.len()).filter(|&c| self.cells[c].alive && self.cells[c].inf_slot().is_none()).collect();
        let mut keyed: Vec<(Tetrahedron, usize)> =
            finite.iter().map(|&c| (Tetrahedron::new(self.cells[c].v), c)).collect();
        keyed.sort();
        let mut out_index = vec![usize::MAX; self.cells.len()];
        for (k, &(_, c)) in keyed.iter().enumerate() {
            out_index[c] = k;
        }
        let mut adjacency = Vec::with_capacity(keyed.len());
        for (t, c) in &keyed {
            let cell = &self.cells[*c];
            let mut adj = [None; 4];
            for (j, vid) in t.vertex_ids.iter().enumerate() {
                let slot = cell.v.iter().position(|x| x == vid).expect("vertex in cell");
                let nb = cell.n[slot];
                if self.cells[nb].inf_slot().is_none() {
                    adj[j] = Some(out_index[nb]);
                }
            }
            adjacency.push(adj);
        }
        Tetrahedralization { network, tetrahedra: keyed.into_iter().map(|(t, _)| t).collect(), adjacency }
    }
}

impl Tetrahedralization {
    /// Volumes below `1e-12 · R³` are treated as degenerate.
    pub fn degeneracy_tolerance(&self) -> f64 {
        1e-12 * self.network.radius_m.powi(3)
    }

    pub fn vertices(&self, t: usize) -> [Point3; 4] {
        self.tetrahedra[t].vertex_ids.map(|i| self.network.points[i])
    }

    pub fn volume(&self, t: usize) -> f64 {
        let v = self.vertices(t);
        super::signed_volume(v[0], v[1], v[2], v[3]).abs()
    }

    pub fn circumsphere(&self, t: usize) -> Result<Sphere> {
        super::circumsphere(self.vertices(t), self.degeneracy_tolerance())
    }

    /// Cell containing `p` (closed), or `None` outside the convex hull.
    /// Points on shared faces resolve to the first cell the walk reaches.
    pub fn locate_tetrahedron(&self, p: Point3) -> Option<usize> {
        if self.tetrahedra.is_empty() {
            return None;
        }
        let q = p.coord();
        let mut t = 0usize;
        let limit = 4 * self.tetrahedra.len() + 64;
        for step in 0..limit {
            let ids = self.tetrahedra[t].vertex_ids;
            let c = ids.map(|i| self.network.points[i].coord());
            let base = orient3d(c[0], c[1], c[2], c[3]);
            let mut next = None;
            for j in 0..4 {
                let i = (j + step) % 4;
                let mut w = c;
                w[i] = q;
                let s = orient3d(w[0], w[1], w[2], w[3]);
                if s * base < 0.0 {
                    next = Some(i);
                    break;
                }
            }
            match next {
                None => return Some(t),
                Some(i) => match self.adjacency[t][i] {
                    Some(nb) => t = nb,
                    None => return None,
                },
            }
        }
        (0..self.tetrahedra.len()).find(|&t| {
            let c = self.tetrahedra[t].vertex_ids.map(|i| self.network.points[i].coord());
            let base = orient3d(c[0], c[1], c[2], c[3]);
            (0..4).all(|i| {
                let mut w = c;
                w[i] = q;
                orient3d(w[0], w[1], w[2], w[3]) * base >= 0.0
            })
        })
    }
}

/// Pairs `(cell, point)` where `point` lies strictly inside the circumsphere
/// of `cell`, by exact predicate.
pub fn empty_circumsphere_violations(net: &NetworkRealization, tets: &[Tetrahedron]) -> Vec<(usize, usize)> {
    let pts: Vec<Coord3D<f64>> = net.points.iter().map(|p| p.coord()).collect();
    let mut out = Vec::new();
    for (t, tet) in tets.iter().enumerate() {
        let mut v = tet.vertex_ids;
        if orient3d(pts[v[0]], pts[v[1]], pts[v[2]], pts[v[3]]) < 0.0 {
            v.swap(2, 3);
        }
        for (p, &q) in pts.iter().enumerate() {
            if tet.contains_vertex(p) {
                continue;
            }
            if insphere(pts[v[0]], pts[v[1]], pts[v[2]], pts[v[3]], q) > 0.0 {
                out.push((t, p));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64, z: f64) -> Coord3D<f64> {
        Coord3D { x, y, z }
    }

    #[test]
    fn predicate_sign_conventions() {
        let (a, b, cc, d) = (c(0.0, 0.0, 0.0), c(1.0, 0.0, 0.0), c(0.0, 1.0, 0.0), c(0.0, 0.0, 1.0));
        let (pa, pb, pc, pd) = if orient3d(a, b, cc, d) > 0.0 { (a, b, cc, d) } else { (a, b, d, cc) };
        assert!(orient3d(pa, pb, pc, pd) > 0.0);
        assert!(insphere(pa, pb, pc, pd, c(0.2, 0.2, 0.2)) > 0.0);
        assert!(insphere(pa, pb, pc, pd, c(5.0, 5.0, 5.0)) < 0.0);
    }

    #[test]
    fn cospherical_cube_is_triangulated() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(Point3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64));
        }
        let net = NetworkRealization::new(2.0, pts, 0).unwrap();
        let t = delaunay(&net).unwrap();
        let vol: f64 = (0..t.tetrahedra.len()).map(|i| t.volume(i)).sum();
        assert!((vol - 1.0).abs() < 1e-12);
        assert!((0..t.tetrahedra.len()).all(|i| t.volume(i) > 0.0));
        assert!(empty_circumsphere_violations(&net, &t.tetrahedra).is_empty());
    }

    #[test]
    fn coplanar_input_is_rejected() {
        let pts = (0..6).map(|i| Point3::new(i as f64, (i * i) as f64 * 0.1, 0.0)).collect();
        let net = NetworkRealization::new(100.0, pts, 0).unwrap();
        assert!(matches!(delaunay(&net), Err(Error::Degenerate(_))));
    }

    #[test]
    fn duplicate_points_are_rejected() {
        let mut pts: Vec<Point3> = (0..5).map(|i| Point3::new(i as f64, (i * i) as f64, (i * i * i) as f64 * 0.01)).collect();
        pts.push(pts[2]);
        let net = NetworkRealization::new(100.0, pts, 0).unwrap();
        assert!(matches!(delaunay(&net), Err(Error::Degenerate(_))));
    }
}
