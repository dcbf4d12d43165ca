use crate::geometry::{point_tetrahedron_distance, Point3, Tetrahedralization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellClass {
    /// Entirely inside one sphere.
    Standard,
    /// Meets at least one sphere without lying inside any.
    Residual,
    /// Meets no sphere.
    Independent,
}

impl CellClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Standard => "standard",
            Self::Residual => "residual",
            Self::Independent => "independent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellClassification {
    pub cell_id: usize,
    pub class: CellClass,
    /// Spheres the cell belongs to, ascending.
    pub sphere_ids: Vec<usize>,
}

/// A sphere of the packing and the cells assigned to it.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereCluster {
    /// Index into the list of sphere centers.
    pub sphere_id: usize,
    pub center: Point3,
    pub radius: f64,
    pub member_cell_ids: Vec<usize>,
    /// 1-based rank by member count (largest first).
    pub ordinal: usize,
}

/// Classifies every cell against spheres of radius `radius` at `centers`.
pub fn classify_cells(tess: &Tetrahedralization, centers: &[Point3], radius: f64) -> Vec<CellClassification> {
    (0..tess.tetrahedra.len())
        .map(|t| {
            let v = tess.vertices(t);
            let centroid = (v[0] + v[1] + v[2] + v[3]) * 0.25;
            let reach = v.iter().map(|p| p.distance(centroid)).fold(0.0, f64::max);
            let mut inside_of = None;
            let mut touching = Vec::new();
            for (s, &c) in centers.iter().enumerate() {
                if c.distance(centroid) > radius + reach {
                    continue;
                }
                if v.iter().all(|p| p.distance(c) <= radius) {
                    inside_of = Some(s);
                    touching.push(s);
                } else if point_tetrahedron_distance(c, v) <= radius {
                    touching.push(s);
                }
            }
            match inside_of {
                Some(s) => CellClassification { cell_id: t, class: CellClass::Standard, sphere_ids: vec![s] },
                None if touching.is_empty() => {
                    CellClassification { cell_id: t, class: CellClass::Independent, sphere_ids: Vec::new() }
                }
                None => CellClassification { cell_id: t, class: CellClass::Residual, sphere_ids: touching },
            }
        })
        .collect()
}

/// Groups cells by sphere, dropping empty spheres, largest first
/// (ties by sphere index).
pub fn form_clusters(centers: &[Point3], radius: f64, classes: &[CellClassification]) -> Vec<SphereCluster> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); centers.len()];
    for c in classes {
        for &s in &c.sphere_ids {
            members[s].push(c.cell_id);
        }
    }
    let mut clusters: Vec<SphereCluster> = members
        .into_iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(s, m)| SphereCluster { sphere_id: s, center: centers[s], radius, member_cell_ids: m, ordinal: 0 })
        .collect();
    clusters.sort_by(|a, b| b.member_cell_ids.len().cmp(&a.member_cell_ids.len()).then(a.sphere_id.cmp(&b.sphere_id)));
    for (i, c) in clusters.iter_mut().enumerate() {
        c.ordinal = i + 1;
    }
    clusters
}
