use super::{BoundaryTag, Dimension, Mesh, MeshDescription};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Outflow,
}

/// Uniform partition of `[x0, x1]` into `n` intervals.
pub fn uniform_interval(x0: f64, x1: f64, n: usize, boundary: Boundary) -> Mesh {
    assert!(n >= 1 && x1 > x0);
    let h = (x1 - x0) / n as f64;
    let vertices = (0..=n).map(|i| [if i == n { x1 } else { x0 + h * i as f64 }, 0.0]).collect();
    let cells = (0..n).map(|i| vec![i, i + 1]).collect();
    let tags = match boundary {
        Boundary::Periodic => vec![BoundaryTag::Periodic(vec![n], vec![0])],
        Boundary::Outflow => vec![],
    };
    Mesh::build(MeshDescription { dimension: Dimension::One, vertices, cells, tags }).expect("valid interval mesh")
}

/// Structured `nx × ny` grid of rectangles on `[x0,x1]×[y0,y1]`, each split
/// into two triangles along its lower-left to upper-right diagonal.
pub fn rectangle_triangles(x: [f64; 2], y: [f64; 2], nx: usize, ny: usize, boundary: Boundary) -> Mesh {
    assert!(nx >= 1 && ny >= 1 && x[1] > x[0] && y[1] > y[0]);
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let px = if i == nx { x[1] } else { x[0] + (x[1] - x[0]) * i as f64 / nx as f64 };
            let py = if j == ny { y[1] } else { y[0] + (y[1] - y[0]) * j as f64 / ny as f64 };
            vertices.push([px, py]);
        }
    }
    let mut cells = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            cells.push(vec![a, b, c]);
            cells.push(vec![a, c, d]);
        }
    }
    let mut tags = Vec::new();
    if boundary == Boundary::Periodic {
        for i in 0..nx {
            tags.push(BoundaryTag::Periodic(vec![id(i, 0), id(i + 1, 0)], vec![id(i, ny), id(i + 1, ny)]));
        }
        for j in 0..ny {
            tags.push(BoundaryTag::Periodic(vec![id(0, j), id(0, j + 1)], vec![id(nx, j), id(nx, j + 1)]));
        }
    }
    Mesh::build(MeshDescription { dimension: Dimension::Two, vertices, cells, tags }).expect("valid triangulated rectangle")
}

/// Unit square split into two triangles by a diagonal.
pub fn unit_square_two_triangles() -> Mesh {
    rectangle_triangles([0.0, 1.0], [0.0, 1.0], 1, 1, Boundary::Outflow)
}

/// Single isosceles triangle with base 1 and height `eps`; the shape-regularity
/// ratio degenerates as `eps → 0`.
pub fn sliver_triangle(eps: f64) -> Mesh {
    assert!(eps > 0.0);
    Mesh::build(MeshDescription {
        dimension: Dimension::Two,
        vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.5, eps]],
        cells: vec![vec![0, 1, 2]],
        tags: vec![],
    })
    .expect("valid sliver")
}
