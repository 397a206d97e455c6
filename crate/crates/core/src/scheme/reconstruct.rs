use std::sync::Arc;

use rayon::prelude::*;

use crate::geom::{self, Vec2};
use crate::mesh::{CellFace, Dimension, Mesh};

use super::{CellField, ReconstructionMode, SchemeConfig};

/// Per-cell affine functions `u_K + ∇u_K·(x - x_K)` with the gradient already
/// limited, plus the local bounds every trace is kept inside.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    mesh: Arc<Mesh>,
    means: Vec<f64>,
    gradients: Vec<Vec2>,
    limiters: Vec<f64>,
    bounds: Vec<(f64, f64)>,
}

impl Reconstruction {
    pub fn mean(&self, cell: usize) -> f64 {
        self.means[cell]
    }

    /// Limited gradient.
    pub fn gradient(&self, cell: usize) -> Vec2 {
        self.gradients[cell]
    }

    /// Barth–Jespersen factor θ ∈ [0, 1] applied to the least-squares gradient.
    pub fn limiter(&self, cell: usize) -> f64 {
        self.limiters[cell]
    }

    /// `[min, max]` of the cell mean and its face-neighbor means.
    pub fn bounds(&self, cell: usize) -> (f64, f64) {
        self.bounds[cell]
    }

    /// Value of the affine function at `x` (in the cell's frame), clamped to
    /// the local bounds.
    pub fn eval(&self, cell: usize, x: Vec2) -> f64 {
        let c = self.mesh.cells()[cell].centroid;
        let (lo, hi) = self.bounds[cell];
        (self.means[cell] + geom::dot(self.gradients[cell], geom::sub(x, c))).clamp(lo, hi)
    }

    /// Trace at the midpoint of a face of `cell`.
    pub fn face_trace(&self, cell: usize, cf: CellFace) -> f64 {
        if self.gradients[cell] == [0.0, 0.0] {
            return self.means[cell];
        }
        self.eval(cell, self.mesh.face_midpoint_for(cf))
    }
}

pub fn reconstruct(field: &CellField, config: &SchemeConfig) -> Reconstruction {
    let mesh = field.mesh().clone();
    let u = field.values();
    let n = mesh.num_cells();
    let bounds: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            mesh.cells()[k].faces.iter().filter_map(|&cf| mesh.neighbor(k, cf)).fold((u[k], u[k]), |(lo, hi), (j, _)| {
                (lo.min(u[j]), hi.max(u[j]))
            })
        })
        .collect();
    let (gradients, limiters) = match config.reconstruction {
        ReconstructionMode::Constant => (vec![[0.0, 0.0]; n], vec![0.0; n]),
        ReconstructionMode::LimitedLinear => {
            let pairs: Vec<(Vec2, f64)> = (0..n).into_par_iter().map(|k| limited_gradient(&mesh, u, k, bounds[k])).collect();
            pairs.into_iter().unzip()
        }
    };
    Reconstruction { mesh, means: u.to_vec(), gradients, limiters, bounds }
}

/// Least-squares gradient over face neighbors (outflow faces skipped), scaled
/// so that every face-midpoint trace stays inside `[lo, hi]`.
fn limited_gradient(mesh: &Mesh, u: &[f64], k: usize, (lo, hi): (f64, f64)) -> (Vec2, f64) {
    let cell = &mesh.cells()[k];
    let xk = cell.centroid;
    let mut a = [[0.0; 2]; 2];
    let mut r = [0.0; 2];
    for &cf in &cell.faces {
        let Some((j, shift)) = mesh.neighbor(k, cf) else { continue };
        let d = geom::sub(geom::add(mesh.cells()[j].centroid, shift), xk);
        let du = u[j] - u[k];
        for p in 0..2 {
            r[p] += d[p] * du;
            for q in 0..2 {
                a[p][q] += d[p] * d[q];
            }
        }
    }
    let grad = match mesh.dimension() {
        Dimension::One => {
            if a[0][0] > 0.0 {
                [r[0] / a[0][0], 0.0]
            } else {
                [0.0, 0.0]
            }
        }
        Dimension::Two => {
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            let tr = a[0][0] + a[1][1];
            if det > 1e-12 * tr * tr {
                [(a[1][1] * r[0] - a[0][1] * r[1]) / det, (a[0][0] * r[1] - a[1][0] * r[0]) / det]
            } else {
                [0.0, 0.0]
            }
        }
    };
    if grad == [0.0, 0.0] {
        // a zero least-squares gradient at a local extremum counts as clipped
        let extremum = lo < hi && (u[k] == lo || u[k] == hi);
        return (grad, if extremum { 0.0 } else { 1.0 });
    }
    let mut theta: f64 = 1.0;
    for &cf in &cell.faces {
        let delta = geom::dot(grad, geom::sub(mesh.face_midpoint_for(cf), xk));
        let t = if delta > 0.0 {
            (hi - u[k]) / delta
        } else if delta < 0.0 {
            (lo - u[k]) / delta
        } else {
            1.0
        };
        theta = theta.min(t.max(0.0));
    }
    (geom::scale(grad, theta), theta)
}
