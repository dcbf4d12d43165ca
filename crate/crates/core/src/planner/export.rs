use super::coloring::FrequencyPlan;
use crate::error::Result;
use crate::geometry::Tetrahedralization;
use std::io::Write;

/// Writes `cell_id,v0,v1,v2,v3,class,sphere_ids,color`; sphere ids are
/// joined with `;`.
pub fn write_plan_csv<W: Write>(tess: &Tetrahedralization, plan: &FrequencyPlan, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["cell_id", "v0", "v1", "v2", "v3", "class", "sphere_ids", "color"])?;
    for (t, tet) in tess.tetrahedra.iter().enumerate() {
        let c = &plan.classifications[t];
        let spheres = c.sphere_ids.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";");
        let v = tet.vertex_ids;
        out.write_record([
            t.to_string(),
            v[0].to_string(),
            v[1].to_string(),
            v[2].to_string(),
            v[3].to_string(),
            c.class.as_str().to_string(),
            spheres,
            plan.colors[t].to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `sphere_id,cx,cy,cz,radius,n_cells` for every non-empty sphere,
/// largest first.
pub fn write_spheres_csv<W: Write>(plan: &FrequencyPlan, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["sphere_id", "cx", "cy", "cz", "radius", "n_cells"])?;
    for c in &plan.clusters {
        out.write_record([
            c.sphere_id.to_string(),
            c.center.x.to_string(),
            c.center.y.to_string(),
            c.center.z.to_string(),
            c.radius.to_string(),
            c.member_cell_ids.len().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
