use std::collections::HashMap;

use super::{BoundaryTag, Dimension, Mesh, MeshDescription, MeshError};
use crate::geom;

/// Uniform refinement: intervals are bisected, triangles split into four
/// congruent children through their edge midpoints. Boundary tags are
/// carried over to the child entities.
pub(super) fn refine(mesh: &Mesh, levels: usize) -> Result<Mesh, MeshError> {
    if levels == 0 {
        return Err(MeshError::UnsupportedRefinement("levels must be at least 1".into()));
    }
    let mut desc = mesh.description().clone();
    for _ in 0..levels {
        desc = match desc.dimension {
            Dimension::One => refine_1d(&desc),
            Dimension::Two => refine_2d(&desc)?,
        };
    }
    Mesh::build(desc)
}

fn refine_1d(d: &MeshDescription) -> MeshDescription {
    let mut vertices = d.vertices.clone();
    let mut cells = Vec::with_capacity(2 * d.cells.len());
    for c in &d.cells {
        let m = vertices.len();
        vertices.push(geom::scale(geom::add(d.vertices[c[0]], d.vertices[c[1]]), 0.5));
        cells.push(vec![c[0], m]);
        cells.push(vec![m, c[1]]);
    }
    MeshDescription { dimension: Dimension::One, vertices, cells, tags: d.tags.clone() }
}

fn refine_2d(d: &MeshDescription) -> Result<MeshDescription, MeshError> {
    let mut vertices = d.vertices.clone();
    let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
    let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<geom::Vec2>| -> usize {
        *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
            vertices.push(geom::scale(geom::add(vertices[a], vertices[b]), 0.5));
            vertices.len() - 1
        })
    };
    let mut cells = Vec::with_capacity(4 * d.cells.len());
    for (k, c) in d.cells.iter().enumerate() {
        if c.len() != 3 {
            return Err(MeshError::UnsupportedRefinement(format!("cell {k} has {} vertices; only triangles refine", c.len())));
        }
        let (a, b, cc) = (c[0], c[1], c[2]);
        let ab = midpoint(a, b, &mut vertices);
        let bc = midpoint(b, cc, &mut vertices);
        let ca = midpoint(cc, a, &mut vertices);
        cells.push(vec![a, ab, ca]);
        cells.push(vec![ab, b, bc]);
        cells.push(vec![ca, bc, cc]);
        cells.push(vec![ab, bc, ca]);
    }
    let mut tags = Vec::with_capacity(2 * d.tags.len());
    for t in &d.tags {
        match t {
            BoundaryTag::Outflow(e) => {
                let m = midpoint(e[0], e[1], &mut vertices);
                tags.push(BoundaryTag::Outflow(vec![e[0], m]));
                tags.push(BoundaryTag::Outflow(vec![m, e[1]]));
            }
            BoundaryTag::Periodic(e, f) => {
                // match each end of `e` with its translate in `f`
                let t = geom::sub(vertices[f[0]], vertices[e[0]]);
                let (f0, f1) = if geom::dist(geom::add(vertices[e[1]], t), vertices[f[1]])
                    <= geom::dist(geom::add(vertices[e[1]], geom::sub(vertices[f[1]], vertices[e[0]])), vertices[f[0]])
                {
                    (f[0], f[1])
                } else {
                    (f[1], f[0])
                };
                let me = midpoint(e[0], e[1], &mut vertices);
                let mf = midpoint(f0, f1, &mut vertices);
                tags.push(BoundaryTag::Periodic(vec![e[0], me], vec![f0, mf]));
                tags.push(BoundaryTag::Periodic(vec![me, e[1]], vec![mf, f1]));
            }
        }
    }
    Ok(MeshDescription { dimension: Dimension::Two, vertices, cells, tags })
}
