//! Property definitions shared by the property suites and the acceptance run.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use conlaw_core::entropy_audit::numerical_entropy_flux;
use conlaw_core::geom::{self, Vec2};
use conlaw_core::kinetic::{chi, lift, VGrid};
use conlaw_core::mesh::{rectangle_triangles, uniform_interval, Boundary, Dimension, FaceNeighbor, Mesh};
use conlaw_core::physics::{FluxKind, FluxModel};
use conlaw_core::scheme::{numerical_flux, reconstruct, CellField, FluxRule, SchemeConfig};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const FLUX_TOL: f64 = 1e-12;
pub const BOUND_TOL: f64 = 1e-12;
pub const CLOSURE_TOL: f64 = 1e-12;

/// Flux models with the state range each is exercised on.
pub fn flux_models() -> Vec<(FluxModel, (f64, f64))> {
    vec![
        (FluxModel::burgers(), (-2.0, 2.0)),
        (FluxModel::linear_advection([0.7, -0.4]), (-2.0, 2.0)),
        (FluxModel::new(FluxKind::RotatedBurgers { angle: 0.6 }).unwrap(), (-2.0, 2.0)),
        (FluxModel::new(FluxKind::BuckleyLeverett).unwrap(), (0.0, 1.0)),
        (FluxModel::new(FluxKind::LinearQuadratic).unwrap(), (-2.0, 2.0)),
    ]
}

#[derive(Debug, Clone)]
pub struct FluxCase {
    pub rule: FluxRule,
    pub flux: FluxModel,
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub n: Vec2,
}

pub fn flux_case() -> impl Strategy<Value = FluxCase> {
    let models = flux_models();
    (0..FluxRule::ALL.len(), 0..models.len(), 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..2.0 * PI).prop_map(move |(r, m, sa, sb, sk, angle)| {
        let (flux, (lo, hi)) = models[m];
        let at = |s: f64| lo + s * (hi - lo);
        FluxCase { rule: FluxRule::ALL[r], flux, a: at(sa), b: at(sb), k: at(sk), n: [angle.cos(), angle.sin()] }
    })
}

/// `g(a, b, n) = -g(b, a, -n)`, the same for the entropy flux, and
/// `g(a, a, n) = f(a)·n`.
pub fn check_flux_conservativity(c: &FluxCase) -> Result<(), TestCaseError> {
    let FluxCase { rule, flux, a, b, k, n } = c.clone();
    let m = geom::neg(n);
    let lambda = flux.max_normal_speed(a, b, n);
    let g = numerical_flux(rule, &flux, a, b, n, lambda).unwrap();
    let g_rev = numerical_flux(rule, &flux, b, a, m, lambda).unwrap();
    prop_assert!((g + g_rev).abs() <= FLUX_TOL * (1.0 + g.abs()), "{rule} g = {g}, reversed {g_rev}");
    let ga = numerical_flux(rule, &flux, a, a, n, 0.0).unwrap();
    prop_assert!((ga - flux.normal_flux(a, n)).abs() <= FLUX_TOL * (1.0 + ga.abs()), "{rule} inconsistent at {a}");

    let lam_k = flux.max_normal_speed(a.min(b).min(k), a.max(b).max(k), n);
    let big_g = numerical_entropy_flux(rule, &flux, k, a, b, n, lam_k).unwrap();
    let big_g_rev = numerical_entropy_flux(rule, &flux, k, b, a, m, lam_k).unwrap();
    prop_assert!((big_g + big_g_rev).abs() <= FLUX_TOL * (1.0 + big_g.abs()), "{rule} G = {big_g}, reversed {big_g_rev}");
    Ok(())
}

pub fn sample_meshes() -> Vec<Arc<Mesh>> {
    vec![
        Arc::new(uniform_interval(0.0, 1.0, 12, Boundary::Periodic)),
        Arc::new(uniform_interval(-1.0, 2.0, 9, Boundary::Outflow)),
        Arc::new(rectangle_triangles([0.0, 1.0], [0.0, 1.0], 4, 3, Boundary::Periodic)),
        Arc::new(rectangle_triangles([-1.0, 1.0], [0.0, 0.5], 3, 3, Boundary::Outflow)),
    ]
}

/// Random cell values on one of [`sample_meshes`]; `(mesh index, values)`.
pub fn limiter_case() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (0..4usize, prop::collection::vec(-1.0..1.0f64, 24)).prop_map(|(m, mut v)| {
        // plateaus exercise the zero-gradient paths
        for i in (0..v.len()).step_by(5) {
            v[i] = v[(i + 1) % v.len()];
        }
        (m, v)
    })
}

/// Limited traces stay inside the local bounds and the reconstruction keeps
/// the cell mean at the centroid.
pub fn check_limiter(meshes: &[Arc<Mesh>], case: &(usize, Vec<f64>)) -> Result<(), TestCaseError> {
    let mesh = meshes[case.0].clone();
    let values = case.1[..mesh.num_cells()].to_vec();
    let field = CellField::new(mesh.clone(), values.clone(), 0.0).unwrap();
    let rec = reconstruct(&field, &SchemeConfig::second_order(FluxRule::Godunov));
    for (k, cell) in mesh.cells().iter().enumerate() {
        let (lo, hi) = rec.bounds(k);
        prop_assert!(lo <= values[k] && values[k] <= hi);
        let theta = rec.limiter(k);
        prop_assert!((0.0..=1.0).contains(&theta), "theta = {theta}");
        prop_assert!((rec.eval(k, cell.centroid) - values[k]).abs() <= BOUND_TOL);
        prop_assert_eq!(rec.mean(k), values[k]);
        for &cf in &cell.faces {
            let t = rec.face_trace(k, cf);
            prop_assert!(t >= lo - BOUND_TOL && t <= hi + BOUND_TOL, "cell {k}: trace {t} outside [{lo}, {hi}]");
        }
    }
    Ok(())
}

pub fn chi_case() -> impl Strategy<Value = (f64, usize, Vec<f64>)> {
    (-1.0..1.0f64, 8..512usize, prop::collection::vec(-1.0..1.0f64, 12))
}

/// `χ(v|α) ∈ {-1, 0, 1}` with the sign of α, Riemann sums of `χ(·|α)`
/// within `Δv` of α, and `|Δv Σ_j ρ(K, j) - u_K| ≤ Δv` for a lifted field.
pub fn check_chi(case: &(f64, usize, Vec<f64>)) -> Result<(), TestCaseError> {
    let (alpha, n, ref values) = *case;
    let grid = VGrid::covering(-1.0, 1.0, n).unwrap();
    let mut sum = 0.0;
    for v in grid.centers() {
        let c = chi(v, alpha);
        prop_assert!(c == 0.0 || c == alpha.signum(), "χ({v}|{alpha}) = {c}");
        sum += c;
    }
    prop_assert!((grid.dv() * sum - alpha).abs() <= grid.dv(), "Riemann sum {} for α = {alpha}", grid.dv() * sum);
    let mesh = Arc::new(uniform_interval(0.0, 1.0, values.len(), Boundary::Periodic));
    let field = CellField::new(mesh, values.clone(), 0.0).unwrap();
    let rho = lift(&field, &grid).unwrap();
    for (k, u) in values.iter().enumerate() {
        prop_assert!((rho.velocity_average(k) - u).abs() <= grid.dv());
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct MeshCase {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    pub periodic: bool,
    pub one_d: bool,
    pub refine: usize,
}

pub fn mesh_case() -> impl Strategy<Value = MeshCase> {
    (-2.0..2.0f64, 0.1..3.0f64, -2.0..2.0f64, 0.1..3.0f64, 2..9usize, 2..9usize, any::<bool>(), any::<bool>(), 0..2usize).prop_map(
        |(x0, lx, y0, ly, nx, ny, periodic, one_d, refine)| MeshCase { x: [x0, x0 + lx], y: [y0, y0 + ly], nx, ny, periodic, one_d, refine },
    )
}

/// Every cell's scaled normals sum to zero, normals have unit length, each
/// interior face is shared by two distinct cells, and cell areas sum to the
/// domain measure.
pub fn check_mesh_closure(c: &MeshCase) -> Result<(), TestCaseError> {
    let bc = if c.periodic { Boundary::Periodic } else { Boundary::Outflow };
    let base = if c.one_d { uniform_interval(c.x[0], c.x[1], c.nx, bc) } else { rectangle_triangles(c.x, c.y, c.nx, c.ny, bc) };
    let mesh = if c.refine > 0 { base.refine(c.refine).unwrap() } else { base };
    let measure = if c.one_d { c.x[1] - c.x[0] } else { (c.x[1] - c.x[0]) * (c.y[1] - c.y[0]) };
    prop_assert!(mesh.check_invariants().is_ok());
    for f in mesh.faces() {
        prop_assert!((geom::norm(f.normal) - 1.0).abs() <= CLOSURE_TOL);
        if let Some(r) = f.right.cell() {
            let periodic = matches!(f.right, FaceNeighbor::Periodic { .. });
            prop_assert!(r != f.left || periodic, "face joins cell {} to itself", r);
        }
    }
    for cell in mesh.cells() {
        let mut s = [0.0, 0.0];
        for &cf in &cell.faces {
            let f = &mesh.faces()[cf.face];
            s = geom::add(s, geom::scale(f.normal, cf.sign * f.length));
        }
        prop_assert!(geom::norm(s) <= CLOSURE_TOL * cell.perimeter.max(1.0), "closure defect {s:?}");
    }
    let area: f64 = mesh.cells().iter().map(|c| c.area).sum();
    prop_assert!((area - measure).abs() <= CLOSURE_TOL * measure.max(1.0), "area {area} vs {measure}");
    prop_assert_eq!(mesh.dimension() == Dimension::One, c.one_d);
    Ok(())
}
