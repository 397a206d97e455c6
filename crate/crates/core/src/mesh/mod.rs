//! Interval and unstructured polygonal meshes.
//!
//! A [`Mesh`] is built from a [`MeshDescription`] (vertices, polygon cells
//! and boundary tags) and carries everything the finite volume update needs:
//! cell areas and centroids, face lengths, unit normals oriented outward from
//! the face's left cell, and the left/right adjacency including periodic
//! partners. 1-D meshes are first-class: their cells are intervals and their
//! faces are points with unit "length" and normal `(±1, 0)`.
//!
//! Meshes are immutable once built. Periodic boundaries are merged into
//! ordinary two-sided faces carrying a translation (`shift`) that maps the
//! right cell's coordinates next to the left cell.

mod generators;
mod parse;
mod refine;
mod regularity;

use std::collections::HashMap;

use thiserror::Error;

use crate::geom::{self, Vec2};

pub use generators::{rectangle_triangles, sliver_triangle, uniform_interval, unit_square_two_triangles, Boundary};
pub use regularity::{regularity, RegularityReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("topology error: {0}")]
    Topology(String),
    #[error("unsupported refinement: {0}")]
    UnsupportedRefinement(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    One,
    Two,
}

impl Dimension {
    pub fn as_usize(self) -> usize {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
        }
    }
}

/// A boundary tag line: a boundary entity (vertex in 1-D, edge in 2-D) that is
/// either outflow or identified with a partner entity by a translation.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryTag {
    Outflow(Vec<usize>),
    Periodic(Vec<usize>, Vec<usize>),
}

/// Plain description of a mesh before geometry is derived.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshDescription {
    pub dimension: Dimension,
    pub vertices: Vec<Vec2>,
    pub cells: Vec<Vec<usize>>,
    pub tags: Vec<BoundaryTag>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceNeighbor {
    Interior(usize),
    /// Right cell reached through a periodic identification; its coordinates
    /// plus `shift` lie adjacent to the left cell.
    Periodic { cell: usize, shift: Vec2 },
    Outflow,
}

impl FaceNeighbor {
    pub fn cell(&self) -> Option<usize> {
        match *self {
            FaceNeighbor::Interior(c) => Some(c),
            FaceNeighbor::Periodic { cell, .. } => Some(cell),
            FaceNeighbor::Outflow => None,
        }
    }

    pub fn shift(&self) -> Vec2 {
        match *self {
            FaceNeighbor::Periodic { shift, .. } => shift,
            _ => [0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// End vertices; both entries coincide in 1-D.
    pub vertices: [usize; 2],
    pub left: usize,
    pub right: FaceNeighbor,
    pub length: f64,
    /// Unit normal, outward from `left`.
    pub normal: Vec2,
    /// Face midpoint in the left cell's frame.
    pub midpoint: Vec2,
}

/// A face as seen from one of its cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellFace {
    pub face: usize,
    /// `+1.0` if the cell is the face's left cell, `-1.0` otherwise.
    pub sign: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub vertices: Vec<usize>,
    pub faces: Vec<CellFace>,
    pub area: f64,
    pub centroid: Vec2,
    pub perimeter: f64,
    pub diameter: f64,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    dimension: Dimension,
    vertices: Vec<Vec2>,
    cells: Vec<Cell>,
    faces: Vec<Face>,
    h: f64,
    description: MeshDescription,
}

impl Mesh {
    /// Parse the plain-text mesh format and build the mesh.
    pub fn parse(source: &str) -> Result<Mesh, MeshError> {
        Mesh::build(parse::parse_description(source)?)
    }

    pub fn build(description: MeshDescription) -> Result<Mesh, MeshError> {
        let mesh = match description.dimension {
            Dimension::One => build_1d(description)?,
            Dimension::Two => build_2d(description)?,
        };
        mesh.check_invariants()?;
        Ok(mesh)
    }

    pub fn refine(&self, levels: usize) -> Result<Mesh, MeshError> {
        refine::refine(self, levels)
    }

    pub fn to_text(&self) -> String {
        parse::write_description(&self.description)
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// Maximal cell diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn description(&self) -> &MeshDescription {
        &self.description
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area).sum()
    }

    pub fn is_periodic(&self) -> bool {
        self.faces.iter().all(|f| f.right.cell().is_some())
    }

    pub fn cell_points(&self, cell: usize) -> Vec<Vec2> {
        self.cells[cell].vertices.iter().map(|&v| self.vertices[v]).collect()
    }

    /// Quadrature rule `(weight, point)` for a cell; weights sum to one.
    pub fn cell_quadrature(&self, cell: usize) -> Vec<(f64, Vec2)> {
        geom::cell_quadrature(&self.cell_points(cell), self.dimension == Dimension::One)
    }

    /// Outward unit normal of a cell face.
    pub fn outward_normal(&self, cf: CellFace) -> Vec2 {
        geom::scale(self.faces[cf.face].normal, cf.sign)
    }

    /// Face-neighbor of `cell` across `cf` and the translation that brings the
    /// neighbor's coordinates next to `cell`, or `None` at an outflow face.
    pub fn neighbor(&self, cell: usize, cf: CellFace) -> Option<(usize, Vec2)> {
        let face = &self.faces[cf.face];
        let right = face.right.cell()?;
        if cf.sign > 0.0 {
            Some((right, face.right.shift()))
        } else {
            debug_assert_eq!(right, cell);
            Some((face.left, geom::neg(face.right.shift())))
        }
    }

    /// Midpoint of a cell face in the given cell's frame.
    pub fn face_midpoint_for(&self, cf: CellFace) -> Vec2 {
        let face = &self.faces[cf.face];
        if cf.sign > 0.0 {
            face.midpoint
        } else {
            geom::sub(face.midpoint, face.right.shift())
        }
    }

    /// Domain measure from the boundary only (divergence theorem applied to
    /// the position vector), independent of the per-cell areas.
    pub fn boundary_domain_measure(&self) -> f64 {
        let d = self.dimension.as_usize() as f64;
        let mut s = 0.0;
        for f in &self.faces {
            match f.right {
                FaceNeighbor::Outflow => s += f.length * geom::dot(f.midpoint, f.normal),
                FaceNeighbor::Periodic { shift, .. } => s += f.length * geom::dot(shift, f.normal),
                FaceNeighbor::Interior(_) => {}
            }
        }
        s / d
    }

    /// Check the geometric and topological invariants of a built mesh.
    pub fn check_invariants(&self) -> Result<(), MeshError> {
        for (i, f) in self.faces.iter().enumerate() {
            if (geom::norm(f.normal) - 1.0).abs() > 1e-12 {
                return Err(MeshError::Invariant(format!("face {i} normal is not unit")));
            }
        }
        let mut seen = vec![(0usize, 0usize); self.faces.len()];
        for (k, c) in self.cells.iter().enumerate() {
            let mut closure = [0.0, 0.0];
            for cf in &c.faces {
                let n = self.outward_normal(*cf);
                closure = geom::add(closure, geom::scale(n, self.faces[cf.face].length));
                if cf.sign > 0.0 {
                    if self.faces[cf.face].left != k {
                        return Err(MeshError::Invariant(format!("cell {k} is not the left cell of face {}", cf.face)));
                    }
                    seen[cf.face].0 += 1;
                } else {
                    if self.faces[cf.face].right.cell() != Some(k) {
                        return Err(MeshError::Invariant(format!("cell {k} is not the right cell of face {}", cf.face)));
                    }
                    seen[cf.face].1 += 1;
                }
            }
            if geom::norm(closure) > 1e-12 * c.perimeter {
                return Err(MeshError::Invariant(format!("cell {k} boundary does not close: {closure:?}")));
            }
        }
        for (i, f) in self.faces.iter().enumerate() {
            let expected = if f.right.cell().is_some() { (1, 1) } else { (1, 0) };
            if seen[i] != expected {
                return Err(MeshError::Invariant(format!("face {i} referenced {:?} times", seen[i])));
            }
        }
        let area = self.total_area();
        let domain = self.boundary_domain_measure();
        if (area - domain).abs() > 1e-10 * domain.abs().max(f64::MIN_POSITIVE) {
            return Err(MeshError::Invariant(format!("cell areas sum to {area}, domain measure is {domain}")));
        }
        let hmax = self.cells.iter().map(|c| c.diameter).fold(0.0, f64::max);
        if hmax != self.h {
            return Err(MeshError::Invariant("h is not the maximal cell diameter".into()));
        }
        Ok(())
    }
}

fn geometry<T>(msg: impl Into<String>) -> Result<T, MeshError> {
    Err(MeshError::Geometry(msg.into()))
}

fn topology<T>(msg: impl Into<String>) -> Result<T, MeshError> {
    Err(MeshError::Topology(msg.into()))
}

fn scale_of(vertices: &[Vec2]) -> f64 {
    vertices.iter().map(|p| p[0].abs().max(p[1].abs())).fold(1.0, f64::max)
}

fn build_1d(description: MeshDescription) -> Result<Mesh, MeshError> {
    let vertices = description.vertices.clone();
    let nv = vertices.len();
    // per vertex: (cell ending here, cell starting here)
    let mut ends: Vec<(Option<usize>, Option<usize>)> = vec![(None, None); nv];
    for (k, cell) in description.cells.iter().enumerate() {
        if cell.len() != 2 {
            return geometry(format!("1-D cell {k} must have exactly two vertices"));
        }
        let (a, b) = (cell[0], cell[1]);
        if a >= nv || b >= nv {
            return topology(format!("cell {k} references a missing vertex"));
        }
        if a == b || vertices[a][0] == vertices[b][0] {
            return geometry(format!("cell {k} has zero length"));
        }
        if vertices[a][0] > vertices[b][0] {
            return geometry(format!("cell {k} is not positively oriented"));
        }
        if ends[a].1.replace(k).is_some() || ends[b].0.replace(k).is_some() {
            return topology(format!("cell {k} overlaps another cell at a vertex"));
        }
    }

    // periodic identifications, keyed by the vertex where a cell ends
    let mut partner: HashMap<usize, usize> = HashMap::new();
    let mut tagged: HashMap<usize, bool> = HashMap::new();
    for tag in &description.tags {
        match tag {
            BoundaryTag::Outflow(v) => {
                let v = single(v)?;
                if tagged.insert(v, false) == Some(true) {
                    return topology(format!("vertex {v} tagged both periodic and outflow"));
                }
            }
            BoundaryTag::Periodic(a, b) => {
                let (a, b) = (single(a)?, single(b)?);
                for v in [a, b] {
                    if v >= nv {
                        return topology(format!("periodic tag references missing vertex {v}"));
                    }
                    if tagged.insert(v, true) == Some(false) {
                        return topology(format!("vertex {v} tagged both periodic and outflow"));
                    }
                }
                let (end, start) = match (ends[a], ends[b]) {
                    ((Some(_), None), (None, Some(_))) => (a, b),
                    ((None, Some(_)), (Some(_), None)) => (b, a),
                    _ => return topology(format!("periodic vertices {a} and {b} are not opposite boundary ends")),
                };
                if let Some(prev) = partner.insert(end, start) {
                    if prev != start {
                        return topology(format!("vertex {end} has two periodic partners"));
                    }
                }
            }
        }
    }
    let starts_paired: Vec<usize> = partner.values().copied().collect();
    if starts_paired.len() != starts_paired.iter().collect::<std::collections::HashSet<_>>().len() {
        return topology("a boundary vertex has two periodic partners");
    }

    let mut faces = Vec::new();
    let mut cell_faces: Vec<Vec<CellFace>> = vec![Vec::new(); description.cells.len()];
    for v in 0..nv {
        let x = vertices[v][0];
        match ends[v] {
            (Some(a), Some(b)) => {
                faces.push(Face {
                    vertices: [v, v],
                    left: a,
                    right: FaceNeighbor::Interior(b),
                    length: 1.0,
                    normal: [1.0, 0.0],
                    midpoint: [x, 0.0],
                });
                cell_faces[a].push(CellFace { face: faces.len() - 1, sign: 1.0 });
                cell_faces[b].push(CellFace { face: faces.len() - 1, sign: -1.0 });
            }
            (Some(a), None) => {
                let right = match partner.get(&v) {
                    Some(&w) => {
                        let b = ends[w].1.expect("checked start vertex");
                        cell_faces[b].push(CellFace { face: faces.len(), sign: -1.0 });
                        FaceNeighbor::Periodic { cell: b, shift: [x - vertices[w][0], 0.0] }
                    }
                    None => FaceNeighbor::Outflow,
                };
                faces.push(Face { vertices: [v, v], left: a, right, length: 1.0, normal: [1.0, 0.0], midpoint: [x, 0.0] });
                cell_faces[a].push(CellFace { face: faces.len() - 1, sign: 1.0 });
            }
            (None, Some(b)) => {
                if starts_paired.contains(&v) {
                    continue;
                }
                faces.push(Face {
                    vertices: [v, v],
                    left: b,
                    right: FaceNeighbor::Outflow,
                    length: 1.0,
                    normal: [-1.0, 0.0],
                    midpoint: [x, 0.0],
                });
                cell_faces[b].push(CellFace { face: faces.len() - 1, sign: 1.0 });
            }
            (None, None) => {}
        }
    }

    let mut cells = Vec::with_capacity(description.cells.len());
    for (k, cv) in description.cells.iter().enumerate() {
        let (xa, xb) = (vertices[cv[0]][0], vertices[cv[1]][0]);
        let len = xb - xa;
        let cf = std::mem::take(&mut cell_faces[k]);
        cells.push(Cell {
            vertices: cv.clone(),
            faces: cf,
            area: len,
            centroid: [0.5 * (xa + xb), 0.0],
            perimeter: 2.0,
            diameter: len,
        });
    }
    let h = cells.iter().map(|c| c.diameter).fold(0.0, f64::max);
    Ok(Mesh { dimension: Dimension::One, vertices, cells, faces, h, description })
}

fn single(v: &[usize]) -> Result<usize, MeshError> {
    match v {
        [x] => Ok(*x),
        _ => topology("1-D boundary tags name exactly one vertex"),
    }
}

struct EdgeUse {
    cell: usize,
    from: usize,
    to: usize,
}

fn build_2d(description: MeshDescription) -> Result<Mesh, MeshError> {
    let vertices = description.vertices.clone();
    let nv = vertices.len();
    let tol = 1e-12 * scale_of(&vertices);

    let mut cells = Vec::with_capacity(description.cells.len());
    let mut edges: HashMap<(usize, usize), Vec<EdgeUse>> = HashMap::new();
    for (k, cv) in description.cells.iter().enumerate() {
        if cv.len() < 3 {
            return geometry(format!("cell {k} has fewer than three vertices"));
        }
        if cv.iter().any(|&v| v >= nv) {
            return topology(format!("cell {k} references a missing vertex"));
        }
        let pts: Vec<Vec2> = cv.iter().map(|&v| vertices[v]).collect();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if cv[i] == cv[j] || geom::dist(pts[i], pts[j]) <= tol {
                    return geometry(format!("cell {k} has a repeated vertex"));
                }
            }
        }
        let area = geom::signed_area(&pts);
        if area.abs() <= tol * tol {
            return geometry(format!("cell {k} has zero area"));
        }
        if area < 0.0 {
            return geometry(format!("cell {k} is not positively oriented"));
        }
        let n = pts.len();
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if !adjacent && geom::segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
                    return geometry(format!("cell {k} is not a simple polygon"));
                }
            }
        }
        for i in 0..n {
            let (a, b) = (cv[i], cv[(i + 1) % n]);
            edges.entry((a.min(b), a.max(b))).or_default().push(EdgeUse { cell: k, from: a, to: b });
        }
        let mut diameter: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                diameter = diameter.max(geom::dist(pts[i], pts[j]));
            }
        }
        let perimeter = (0..n).map(|i| geom::dist(pts[i], pts[(i + 1) % n])).sum();
        cells.push(Cell {
            vertices: cv.clone(),
            faces: Vec::with_capacity(n),
            area,
            centroid: geom::polygon_centroid(&pts),
            perimeter,
            diameter,
        });
    }
    for (key, uses) in &edges {
        match uses.len() {
            1 => {}
            2 => {
                if uses[0].from == uses[1].from {
                    return topology(format!("edge {key:?} has inconsistent orientation in cells {} and {}", uses[0].cell, uses[1].cell));
                }
            }
            _ => return topology(format!("edge {key:?} is shared by more than two cells")),
        }
    }

    // periodic identifications between boundary edges
    let mut periodic: HashMap<(usize, usize), ((usize, usize), Vec2)> = HashMap::new();
    let mut outflow_tagged = std::collections::HashSet::new();
    for tag in &description.tags {
        match tag {
            BoundaryTag::Outflow(e) => {
                let key = edge_key(e)?;
                if edges.get(&key).map(|u| u.len()) != Some(1) {
                    return topology(format!("outflow tag {e:?} is not a boundary edge"));
                }
                outflow_tagged.insert(key);
            }
            BoundaryTag::Periodic(a, b) => {
                let (ka, kb) = (edge_key(a)?, edge_key(b)?);
                for k in [ka, kb] {
                    if edges.get(&k).map(|u| u.len()) != Some(1) {
                        return topology(format!("periodic tag edge {k:?} is not a boundary edge"));
                    }
                }
                if ka == kb {
                    return topology(format!("edge {ka:?} is paired with itself"));
                }
                let (pa, pb) = ((vertices[a[0]], vertices[a[1]]), (vertices[b[0]], vertices[b[1]]));
                let close = 1e-9 * scale_of(&vertices);
                let t0 = geom::sub(pb.0, pa.0);
                let t1 = geom::sub(pb.1, pa.0);
                let t = if geom::dist(geom::add(pa.1, t0), pb.1) <= close {
                    t0
                } else if geom::dist(geom::add(pa.1, t1), pb.0) <= close {
                    t1
                } else {
                    return topology(format!("periodic edges {a:?} and {b:?} are not translates"));
                };
                let dir = |k: (usize, usize)| {
                    let u = &edges[&k][0];
                    geom::sub(vertices[u.to], vertices[u.from])
                };
                if geom::dot(dir(ka), dir(kb)) >= 0.0 {
                    return topology(format!("periodic edges {a:?} and {b:?} do not face each other"));
                }
                for (k, other, shift) in [(ka, kb, geom::neg(t)), (kb, ka, t)] {
                    if let Some((prev, _)) = periodic.insert(k, (other, shift)) {
                        if prev != other {
                            return topology(format!("edge {k:?} has two periodic partners"));
                        }
                    }
                }
            }
        }
    }
    if outflow_tagged.iter().any(|k| periodic.contains_key(k)) {
        return topology("an edge is tagged both periodic and outflow");
    }

    let mut faces: Vec<Face> = Vec::new();
    let mut face_of: HashMap<(usize, usize), usize> = HashMap::new();
    for k in 0..cells.len() {
        let cv = cells[k].vertices.clone();
        let n = cv.len();
        for i in 0..n {
            let (a, b) = (cv[i], cv[(i + 1) % n]);
            let key = (a.min(b), a.max(b));
            if let Some(&f) = face_of.get(&key) {
                cells[k].faces.push(CellFace { face: f, sign: -1.0 });
                continue;
            }
            let uses = &edges[&key];
            let (pa, pb) = (vertices[a], vertices[b]);
            let d = geom::sub(pb, pa);
            let length = geom::norm(d);
            let normal = [d[1] / length, -d[0] / length];
            let midpoint = geom::scale(geom::add(pa, pb), 0.5);
            let right = if uses.len() == 2 {
                let other = if uses[0].cell == k && uses[0].from == a { &uses[1] } else { &uses[0] };
                FaceNeighbor::Interior(other.cell)
            } else if let Some(&(partner, shift)) = periodic.get(&key) {
                let other = edges[&partner][0].cell;
                // the partner edge's right-side view refers to this same face
                face_of.insert(partner, faces.len());
                FaceNeighbor::Periodic { cell: other, shift }
            } else {
                FaceNeighbor::Outflow
            };
            face_of.insert(key, faces.len());
            faces.push(Face { vertices: [a, b], left: k, right, length, normal, midpoint });
            cells[k].faces.push(CellFace { face: faces.len() - 1, sign: 1.0 });
        }
    }
    let h = cells.iter().map(|c| c.diameter).fold(0.0, f64::max);
    Ok(Mesh { dimension: Dimension::Two, vertices, cells, faces, h, description })
}

fn edge_key(e: &[usize]) -> Result<(usize, usize), MeshError> {
    match e {
        [a, b] => Ok(((*a).min(*b), (*a).max(*b))),
        _ => topology("2-D boundary tags name exactly two vertices"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_interval_geometry() {
        let m = uniform_interval(0.0, 1.0, 4, Boundary::Outflow);
        assert_eq!(m.num_cells(), 4);
        assert_eq!(m.num_faces(), 5);
        for c in m.cells() {
            assert!((c.area - 0.25).abs() < 1e-15);
        }
        assert!((m.h() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn periodic_interval_wraps() {
        let m = uniform_interval(0.0, 1.0, 4, Boundary::Periodic);
        assert_eq!(m.num_faces(), 4);
        assert!(m.is_periodic());
        let wrap = m.faces().iter().find(|f| matches!(f.right, FaceNeighbor::Periodic { .. })).unwrap();
        assert_eq!(wrap.left, 3);
        assert_eq!(wrap.right.cell(), Some(0));
        assert!((wrap.right.shift()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_triangle_square() {
        let m = unit_square_two_triangles();
        for c in m.cells() {
            assert!((c.area - 0.5).abs() < 1e-15);
        }
        assert!((m.h() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.num_faces(), 5);
    }

    #[test]
    fn repeated_vertex_is_geometry_error() {
        let d = MeshDescription {
            dimension: Dimension::Two,
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            cells: vec![vec![0, 1, 1]],
            tags: vec![],
        };
        assert!(matches!(Mesh::build(d), Err(MeshError::Geometry(_))));
        let d = MeshDescription {
            dimension: Dimension::Two,
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.0]],
            cells: vec![vec![0, 1, 2]],
            tags: vec![],
        };
        assert!(matches!(Mesh::build(d), Err(MeshError::Geometry(_))));
    }

    #[test]
    fn bow_tie_is_not_simple() {
        let d = MeshDescription {
            dimension: Dimension::Two,
            vertices: vec![[0.0, 0.0], [3.0, 0.0], [0.0, 1.0], [1.0, 2.0]],
            cells: vec![vec![0, 1, 2, 3]],
            tags: vec![],
        };
        assert!(matches!(Mesh::build(d), Err(MeshError::Geometry(_))));
    }

    #[test]
    fn clockwise_cell_rejected() {
        let d = MeshDescription {
            dimension: Dimension::Two,
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            cells: vec![vec![0, 2, 1]],
            tags: vec![],
        };
        assert!(matches!(Mesh::build(d), Err(MeshError::Geometry(_))));
    }

    #[test]
    fn bad_periodic_pairing_is_topology_error() {
        // bottom edge paired with the diagonal-free left edge of a different length
        let d = MeshDescription {
            dimension: Dimension::Two,
            vertices: vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]],
            cells: vec![vec![0, 1, 2], vec![0, 2, 3]],
            tags: vec![BoundaryTag::Periodic(vec![0, 1], vec![3, 0])],
        };
        assert!(matches!(Mesh::build(d), Err(MeshError::Topology(_))));
        let d = MeshDescription {
            dimension: Dimension::One,
            vertices: vec![[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]],
            cells: vec![vec![0, 1], vec![1, 2]],
            tags: vec![BoundaryTag::Periodic(vec![0], vec![1])],
        };
        assert!(matches!(Mesh::build(d), Err(MeshError::Topology(_))));
    }

    #[test]
    fn periodic_square_faces_pair_up() {
        let m = rectangle_triangles([0.0, 1.0], [0.0, 1.0], 3, 3, Boundary::Periodic);
        assert!(m.is_periodic());
        assert_eq!(m.num_faces(), 3 * 18 / 2);
        m.check_invariants().unwrap();
        assert!((m.boundary_domain_measure() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interior_normals_are_antisymmetric() {
        let m = rectangle_triangles([0.0, 2.0], [0.0, 1.0], 4, 3, Boundary::Outflow);
        for (k, c) in m.cells().iter().enumerate() {
            for cf in &c.faces {
                if let Some((nb, _)) = m.neighbor(k, *cf) {
                    let back = m.cells()[nb].faces.iter().find(|g| g.face == cf.face).unwrap();
                    let a = m.outward_normal(*cf);
                    let b = m.outward_normal(*back);
                    assert_eq!(a, geom::neg(b));
                }
            }
        }
    }
}
