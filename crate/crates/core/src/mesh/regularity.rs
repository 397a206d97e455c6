use super::{Dimension, Mesh, MeshError};
use crate::geom::{self, Vec2};

/// Shape-regularity of a mesh: per-cell ratio of the outer diameter to the
/// inner diameter (twice the inradius).
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// Ten equal-width bins over `[min ratio, max ratio]`: `(lower, upper, count)`.
    pub histogram: Vec<(f64, f64, usize)>,
}

pub fn regularity(mesh: &Mesh) -> Result<RegularityReport, MeshError> {
    let mut ratios = Vec::with_capacity(mesh.num_cells());
    for (k, cell) in mesh.cells().iter().enumerate() {
        if cell.area <= 0.0 {
            return Err(MeshError::Geometry(format!("cell {k} has zero area")));
        }
        let inner = match mesh.dimension() {
            Dimension::One => cell.diameter,
            Dimension::Two => 2.0 * inradius(&mesh.cell_points(k), cell.area, cell.perimeter),
        };
        if !(inner > 0.0) {
            return Err(MeshError::Geometry(format!("cell {k} has no inscribed circle")));
        }
        ratios.push(cell.diameter / inner);
    }
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    const BINS: usize = 10;
    let width = (max_ratio - min_ratio) / BINS as f64;
    let mut histogram: Vec<(f64, f64, usize)> =
        (0..BINS).map(|i| (min_ratio + width * i as f64, min_ratio + width * (i + 1) as f64, 0)).collect();
    for &r in &ratios {
        let i = if width > 0.0 { (((r - min_ratio) / width) as usize).min(BINS - 1) } else { 0 };
        histogram[i].2 += 1;
    }
    Ok(RegularityReport { ratios, max_ratio, histogram })
}

/// Radius of the largest circle inside a convex polygon.
///
/// Triangles use area / semiperimeter. Other polygons solve the
/// three-variable linear program `max r` subject to `dist(c, edge_i) ≥ r` by
/// enumerating the vertices of its feasible set.
pub(crate) fn inradius(pts: &[Vec2], area: f64, perimeter: f64) -> f64 {
    if pts.len() == 3 {
        return area / (0.5 * perimeter);
    }
    let n = pts.len();
    // inward unit normal and offset per edge: dist_i(c) = n_i·c - o_i
    let lines: Vec<(Vec2, f64)> = (0..n)
        .map(|i| {
            let d = geom::sub(pts[(i + 1) % n], pts[i]);
            let len = geom::norm(d);
            let nrm = [-d[1] / len, d[0] / len];
            (nrm, geom::dot(nrm, pts[i]))
        })
        .collect();
    let scale = perimeter;
    let mut best: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                // [n_x n_y -1] [c_x c_y r]^T = o
                let rows = [lines[i], lines[j], lines[k]];
                let m = rows.map(|(nr, _)| [nr[0], nr[1], -1.0]);
                let rhs = rows.map(|(_, o)| o);
                let Some(sol) = solve3(m, rhs) else { continue };
                let (c, r) = ([sol[0], sol[1]], sol[2]);
                if r <= best {
                    continue;
                }
                if lines.iter().all(|(nr, o)| geom::dot(*nr, c) - o >= r - 1e-12 * scale) {
                    best = r;
                }
            }
        }
    }
    best
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-14 {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut a = m;
        for row in 0..3 {
            a[row][col] = b[row];
        }
        *slot = det(a) / d;
    }
    Some(out)
}
