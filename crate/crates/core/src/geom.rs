//! Small planar vector helpers and the cell quadrature rules shared by
//! initialization, error measurement and the audits.

pub type Vec2 = [f64; 2];

#[inline]
pub fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn scale(a: Vec2, s: f64) -> Vec2 {
    [a[0] * s, a[1] * s]
}

#[inline]
pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn dist(a: Vec2, b: Vec2) -> f64 {
    norm(sub(a, b))
}

#[inline]
pub fn neg(a: Vec2) -> Vec2 {
    [-a[0], -a[1]]
}

/// Signed area of a polygon (positive for counter-clockwise order).
pub fn signed_area(pts: &[Vec2]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        s += cross(pts[i], pts[(i + 1) % n]);
    }
    0.5 * s
}

/// Area centroid of a simple polygon with nonzero area.
pub fn polygon_centroid(pts: &[Vec2]) -> Vec2 {
    let n = pts.len();
    let a = signed_area(pts);
    let mut c = [0.0, 0.0];
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let w = cross(p, q);
        c[0] += (p[0] + q[0]) * w;
        c[1] += (p[1] + q[1]) * w;
    }
    scale(c, 1.0 / (6.0 * a))
}

/// Proper intersection test for two closed segments.
pub fn segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
        cross(sub(b, a), sub(c, a))
    }
    fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
        p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
    }
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Weighted quadrature points `(weight, point)` for a cell, weights summing to one.
///
/// Intervals use two-point Gauss. Polygons are fanned from the centroid into
/// triangles, each integrated with the edge-midpoint rule (exact for quadratics).
pub fn cell_quadrature(pts: &[Vec2], one_d: bool) -> Vec<(f64, Vec2)> {
    if one_d {
        let (a, b) = (pts[0][0], pts[1][0]);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let g = 1.0 / 3f64.sqrt();
        return vec![(0.5, [mid - half * g, 0.0]), (0.5, [mid + half * g, 0.0])];
    }
    if pts.len() == 3 {
        let m = |i: usize, j: usize| scale(add(pts[i], pts[j]), 0.5);
        let w = 1.0 / 3.0;
        return vec![(w, m(0, 1)), (w, m(1, 2)), (w, m(2, 0))];
    }
    let c = polygon_centroid(pts);
    let total = signed_area(pts);
    let n = pts.len();
    let mut out = Vec::with_capacity(3 * n);
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let w = signed_area(&[c, p, q]) / total / 3.0;
        out.push((w, scale(add(c, p), 0.5)));
        out.push((w, scale(add(p, q), 0.5)));
        out.push((w, scale(add(q, c), 0.5)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_integrates_quadratics() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let q = cell_quadrature(&sq, false);
        let s: f64 = q.iter().map(|(w, p)| w * p[0] * p[0]).sum();
        assert!((s - 1.0 / 3.0).abs() < 1e-14);
        let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let q = cell_quadrature(&tri, false);
        // mean of x*y over the unit right triangle is (1/24)/(1/2)
        let s: f64 = q.iter().map(|(w, p)| w * p[0] * p[1]).sum();
        assert!((s - 1.0 / 12.0).abs() < 1e-14);
        let q = cell_quadrature(&[[0.0, 0.0], [2.0, 0.0]], true);
        let s: f64 = q.iter().map(|(w, p)| w * p[0].powi(3)).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn crossing_segments() {
        assert!(segments_intersect([0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]));
        assert!(!segments_intersect([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]));
    }
}
