//! Kinetic formulation diagnostics.
//!
//! A state `u` is lifted to the kinetic density `ρ(v) = χ(v|u)` on a uniform
//! velocity grid. For a sequence of cell fields the kinetic transport residual
//!
//! ```text
//! R(n,K,j) = (ρ^{n+1} - ρ^n)_K / Δt + 1/|K| Σ_e |e| a_e(v_j) ρ_upwind,   a_e = f'(v_j)·n_{K,e}
//! ```
//!
//! approximates `∂_t ρ + f'(v)·∇ρ`, which for an entropy solution equals
//! `∂_v m` with a nonnegative measure `m`. Its antiderivative in `v`,
//! `M(n,K,j) = Δv Σ_{j'≤j} R(n,K,j')`, approximates `m` plus the numerical
//! remainder.
//!
//! Pointwise values of `M` are dominated by the `O(Δv/Δt)` quantization of
//! `χ` and by the cell-scale delta that a captured shock carries, so they do
//! not shrink under refinement. The negativity score therefore tests `M`
//! weakly: it integrates `M` in time and against a fixed family of periodic
//! hat functions `ψ_p` in space and reports
//! `max(0, -min_{p,j} Σ_n Δt Σ_K |K| ψ_p(x_K) M(n,K,j))`. The raw pointwise
//! minimum is reported alongside.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::geom;
use crate::mesh::Mesh;
use crate::physics::FluxModel;
use crate::scheme::CellField;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KineticError {
    #[error("kinetic residuals need a periodic mesh")]
    NotPeriodic,
    #[error("velocity grid [{v_min}, {v_max}] does not cover the data range [{lo}, {hi}]")]
    DoesNotCover { lo: f64, hi: f64, v_min: f64, v_max: f64 },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("fields must be on one mesh with increasing times")]
    BadSequence,
}

/// `χ(v|α)`: `+1` on `0 < v < α`, `-1` on `α < v < 0`, `0` otherwise.
pub fn chi(v: f64, alpha: f64) -> f64 {
    if 0.0 < v && v < alpha {
        1.0
    } else if alpha < v && v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Uniform bins on `[v_min, v_max]`, sampled at bin centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VGrid {
    v_min: f64,
    v_max: f64,
    n: usize,
}

pub const DEFAULT_BINS: usize = 256;

impl VGrid {
    pub fn new(v_min: f64, v_max: f64, n: usize) -> Result<VGrid, KineticError> {
        if !(v_min < v_max) || !v_min.is_finite() || !v_max.is_finite() {
            return Err(KineticError::BadParameter(format!("empty velocity interval [{v_min}, {v_max}]")));
        }
        if n < 8 {
            return Err(KineticError::BadParameter(format!("need at least 8 velocity bins, got {n}")));
        }
        Ok(VGrid { v_min, v_max, n })
    }

    /// Grid over the hull of `[lo, hi]` and `0`, padded by 5% on both sides.
    pub fn covering(lo: f64, hi: f64, n: usize) -> Result<VGrid, KineticError> {
        let (lo, hi) = (lo.min(0.0), hi.max(0.0));
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
        VGrid::new(lo - pad, hi + pad, n)
    }

    pub fn v_min(&self) -> f64 {
        self.v_min
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dv(&self) -> f64 {
        (self.v_max - self.v_min) / self.n as f64
    }

    pub fn center(&self, j: usize) -> f64 {
        self.v_min + self.dv() * (j as f64 + 0.5)
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.center(j)).collect()
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.v_min <= lo && hi <= self.v_max
    }

    fn check_covers(&self, lo: f64, hi: f64) -> Result<(), KineticError> {
        if self.covers(lo, hi) {
            Ok(())
        } else {
            Err(KineticError::DoesNotCover { lo, hi, v_min: self.v_min, v_max: self.v_max })
        }
    }

    fn lift_row(&self, u: f64, row: &mut [f64]) {
        for (j, r) in row.iter_mut().enumerate() {
            *r = chi(self.center(j), u);
        }
    }
}

/// `ρ(K, j) = χ(v_j | u_K)` for one cell field.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticDensity {
    grid: VGrid,
    cells: usize,
    values: Vec<i8>,
}

impl KineticDensity {
    pub fn grid(&self) -> &VGrid {
        &self.grid
    }

    pub fn get(&self, cell: usize, j: usize) -> f64 {
        self.values[cell * self.grid.len() + j] as f64
    }

    /// `Δv Σ_j ρ(K, j)`, within `Δv` of `u_K`.
    pub fn velocity_average(&self, cell: usize) -> f64 {
        let row = &self.values[cell * self.grid.len()..(cell + 1) * self.grid.len()];
        self.grid.dv() * row.iter().map(|&r| r as f64).sum::<f64>()
    }

    pub fn num_cells(&self) -> usize {
        self.cells
    }
}

pub fn lift(field: &CellField, grid: &VGrid) -> Result<KineticDensity, KineticError> {
    grid.check_covers(field.min(), field.max())?;
    let mut values = Vec::with_capacity(field.values().len() * grid.len());
    for &u in field.values() {
        values.extend((0..grid.len()).map(|j| chi(grid.center(j), u) as i8));
    }
    Ok(KineticDensity { grid: *grid, cells: field.values().len(), values })
}

/// Kinetic residual `R(K, j)` of one step, row-major by cell.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticResidual {
    pub grid: VGrid,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl KineticResidual {
    pub fn row(&self, cell: usize) -> &[f64] {
        &self.values[cell * self.grid.len()..(cell + 1) * self.grid.len()]
    }

    /// `Δv Σ_j R(K, j)` per cell.
    pub fn velocity_integral(&self) -> Vec<f64> {
        let dv = self.grid.dv();
        self.values.chunks(self.grid.len()).map(|r| dv * r.iter().sum::<f64>()).collect()
    }
}

fn check_step(before: &CellField, after: &CellField, grid: &VGrid) -> Result<f64, KineticError> {
    if !before.mesh().is_periodic() {
        return Err(KineticError::NotPeriodic);
    }
    if !before.same_mesh(after) || !(after.time() > before.time()) {
        return Err(KineticError::BadSequence);
    }
    grid.check_covers(before.min().min(after.min()), before.max().max(after.max()))?;
    Ok(after.time() - before.time())
}

fn residual_row(mesh: &Mesh, grid: &VGrid, speeds: &[[f64; 2]], u0: &[f64], u1: &[f64], dt: f64, k: usize, out: &mut [f64]) {
    let cell = &mesh.cells()[k];
    let nv = grid.len();
    let mut rho_k = vec![0.0; nv];
    let mut rho_n = vec![0.0; nv];
    grid.lift_row(u0[k], &mut rho_k);
    grid.lift_row(u1[k], out);
    for j in 0..nv {
        out[j] = (out[j] - rho_k[j]) / dt;
    }
    for &cf in &cell.faces {
        let (nb, _) = mesh.neighbor(k, cf).expect("periodic mesh");
        grid.lift_row(u0[nb], &mut rho_n);
        let n = mesh.outward_normal(cf);
        let w = mesh.faces()[cf.face].length / cell.area;
        for j in 0..nv {
            let a = geom::dot(speeds[j], n);
            out[j] += w * a * if a >= 0.0 { rho_k[j] } else { rho_n[j] };
        }
    }
}

/// Upwind kinetic residual of the step `before → after` (periodic meshes).
pub fn kinetic_residual(before: &CellField, after: &CellField, flux: &FluxModel, grid: &VGrid) -> Result<KineticResidual, KineticError> {
    let dt = check_step(before, after, grid)?;
    let mesh = before.mesh();
    let speeds: Vec<[f64; 2]> = grid.centers().into_iter().map(|v| flux.deriv(v)).collect();
    let nv = grid.len();
    let mut values = vec![0.0; mesh.num_cells() * nv];
    values
        .par_chunks_mut(nv)
        .enumerate()
        .for_each(|(k, row)| residual_row(mesh, grid, &speeds, before.values(), after.values(), dt, k, row));
    Ok(KineticResidual { grid: *grid, dt, values })
}

/// `M(K, j) = Δv Σ_{j'≤j} R(K, j')`, row-major by cell.
pub fn defect_antiderivative(residual: &KineticResidual) -> Vec<f64> {
    let dv = residual.grid.dv();
    let mut out = residual.values.clone();
    for row in out.chunks_mut(residual.grid.len()) {
        let mut acc = 0.0;
        for m in row.iter_mut() {
            acc += dv * *m;
            *m = acc;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectMeasure {
    /// `max(0, -min_{p,j} Σ_n Δt Σ_K |K| ψ_p(x_K) M(n,K,j))`.
    pub negativity_score: f64,
    /// `min_{n,K,j} M(n,K,j)`.
    pub pointwise_min: f64,
    /// `Σ_n Δt Σ_K |K| Δv Σ_j M(n,K,j)`.
    pub total_mass: f64,
    /// Largest `|M(n,K,v_max)|`; small for conservative data.
    pub endpoint_max: f64,
    pub steps: usize,
}

/// Periodic hat test functions, `patches` per axis over the mesh's bounding
/// box; they form a partition of unity.
#[derive(Debug, Clone)]
struct Hats {
    /// Per cell: `(test function, |K| ψ_p(x_K))`.
    weights: Vec<Vec<(usize, f64)>>,
    count: usize,
}

impl Hats {
    fn new(mesh: &Mesh, patches: usize) -> Hats {
        let dims = mesh.dimension().as_usize();
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in mesh.vertices() {
            for d in 0..2 {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        let axis = |x: f64, d: usize| -> Vec<(usize, f64)> {
            let len = hi[d] - lo[d];
            let w = len / patches as f64;
            (0..patches)
                .filter_map(|i| {
                    let c = lo[d] + w * i as f64;
                    let r = (x - c).rem_euclid(len);
                    let dist = r.min(len - r);
                    let psi = 1.0 - dist / w;
                    (psi > 0.0).then_some((i, psi))
                })
                .collect()
        };
        let weights = mesh
            .cells()
            .iter()
            .map(|c| {
                let xs = axis(c.centroid[0], 0);
                if dims == 1 {
                    xs.into_iter().map(|(i, p)| (i, c.area * p)).collect()
                } else {
                    let ys = axis(c.centroid[1], 1);
                    xs.iter().flat_map(|&(i, px)| ys.iter().map(move |&(l, py)| (i * patches + l, c.area * px * py))).collect()
                }
            })
            .collect();
        Hats { weights, count: patches.pow(dims as u32) }
    }
}

/// Streaming accumulation of the defect measure over consecutive steps, so
/// that no `(n, K, j)` array is stored.
#[derive(Debug, Clone)]
pub struct DefectAccumulator {
    grid: VGrid,
    flux: FluxModel,
    hats: Hats,
    tested: Vec<f64>,
    pointwise_min: f64,
    total_mass: f64,
    endpoint_max: f64,
    steps: usize,
}

pub const DEFAULT_TEST_PATCHES: usize = 8;

impl DefectAccumulator {
    pub fn new(mesh: &Mesh, flux: FluxModel, grid: VGrid, patches: usize) -> Result<DefectAccumulator, KineticError> {
        if !mesh.is_periodic() {
            return Err(KineticError::NotPeriodic);
        }
        if patches < 2 {
            return Err(KineticError::BadParameter(format!("need at least 2 test functions per axis, got {patches}")));
        }
        let hats = Hats::new(mesh, patches);
        let tested = vec![0.0; hats.count * grid.len()];
        Ok(DefectAccumulator { grid, flux, hats, tested, pointwise_min: 0.0, total_mass: 0.0, endpoint_max: 0.0, steps: 0 })
    }

    pub fn add_step(&mut self, before: &CellField, after: &CellField) -> Result<(), KineticError> {
        let residual = kinetic_residual(before, after, &self.flux, &self.grid)?;
        let m = defect_antiderivative(&residual);
        let nv = self.grid.len();
        let dt = residual.dt;
        let dv = self.grid.dv();
        for (k, row) in m.chunks(nv).enumerate() {
            let area = before.mesh().cells()[k].area;
            for &(p, w) in &self.hats.weights[k] {
                let acc = &mut self.tested[p * nv..(p + 1) * nv];
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += dt * w * v;
                }
            }
            self.pointwise_min = row.iter().copied().fold(self.pointwise_min, f64::min);
            self.total_mass += dt * area * dv * row.iter().sum::<f64>();
            self.endpoint_max = self.endpoint_max.max(row[nv - 1].abs());
        }
        self.steps += 1;
        Ok(())
    }

    pub fn finish(&self) -> DefectMeasure {
        let min = self.tested.iter().copied().fold(0.0, f64::min);
        DefectMeasure {
            negativity_score: (-min).max(0.0),
            pointwise_min: self.pointwise_min,
            total_mass: self.total_mass,
            endpoint_max: self.endpoint_max,
            steps: self.steps,
        }
    }
}

/// Defect measure of a sequence of fields on one periodic mesh.
pub fn defect_measure(fields: &[CellField], flux: &FluxModel, grid: &VGrid, patches: usize) -> Result<DefectMeasure, KineticError> {
    if fields.len() < 2 {
        return Err(KineticError::BadParameter("need at least two time levels".into()));
    }
    let mut acc = DefectAccumulator::new(fields[0].mesh(), *flux, *grid, patches)?;
    for pair in fields.windows(2) {
        acc.add_step(&pair[0], &pair[1])?;
    }
    Ok(acc.finish())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NondegeneracyReport {
    /// `sup` over sampled directions of `|{v ∈ Λ : |τ + f'(v)·ξ| ≤ tol}| / |Λ|`.
    pub measure: f64,
    /// Direction `(τ, ξ_1[, ξ_2])` attaining the supremum.
    pub direction: Vec<f64>,
    pub directions: usize,
}

/// Estimate how degenerate the characteristic speeds are on `Λ = [lo, hi]`.
///
/// Directions are `directions` uniform samples of the unit sphere in
/// `R^{1+d}` plus, for 64 velocities `v_i` spread over `Λ`, the directions
/// `(-f'(v_i)·ξ, ξ)` that annihilate the speed at `v_i`. The measure is
/// estimated on 20001 equispaced velocities.
pub fn nondegeneracy(flux: &FluxModel, lambda: (f64, f64), directions: usize, tol: f64, seed: u64) -> Result<NondegeneracyReport, KineticError> {
    let (lo, hi) = lambda;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(KineticError::BadParameter(format!("state interval [{lo}, {hi}] must be bounded and nonempty")));
    }
    if directions < 100 {
        return Err(KineticError::BadParameter(format!("need at least 100 directions, got {directions}")));
    }
    if !(tol > 0.0) {
        return Err(KineticError::BadParameter(format!("tolerance must be positive, got {tol}")));
    }
    const SAMPLES: usize = 20_001;
    const CANDIDATES: usize = 64;
    let d = flux.dimension();
    let speeds: Vec<[f64; 2]> = (0..SAMPLES).map(|i| flux.deriv(lo + (hi - lo) * i as f64 / (SAMPLES - 1) as f64)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(directions + CANDIDATES);
    let normal = |rng: &mut ChaCha8Rng| -> f64 {
        // Box–Muller
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let unit = |mut x: Vec<f64>| {
        let n = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        x.iter_mut().for_each(|c| *c /= n);
        x
    };
    for _ in 0..directions {
        dirs.push(unit((0..=d).map(|_| normal(&mut rng)).collect()));
    }
    for i in 0..CANDIDATES {
        let v = lo + (hi - lo) * (i as f64 + 0.5) / CANDIDATES as f64;
        let xi: Vec<f64> = if d == 1 {
            vec![1.0]
        } else {
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            vec![t.cos(), t.sin()]
        };
        let s = flux.deriv(v);
        let tau = -(0..d).map(|c| s[c] * xi[c]).sum::<f64>();
        dirs.push(unit(std::iter::once(tau).chain(xi).collect()));
    }
    let measures: Vec<f64> = dirs
        .par_iter()
        .map(|dir| {
            let hits = speeds
                .iter()
                .filter(|s| (dir[0] + (0..d).map(|c| s[c] * dir[1 + c]).sum::<f64>()).abs() <= tol)
                .count();
            hits as f64 / SAMPLES as f64
        })
        .collect();
    let (best, measure) = measures.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, m)| if m > b.1 { (i, m) } else { b });
    Ok(NondegeneracyReport { measure, direction: dirs[best].clone(), directions: dirs.len() })
}
