//! Empirical Young measures of cell fields.
//!
//! The domain's bounding box is cut into macro patches; in each patch the
//! area-weighted distribution of cell values is binned over the global data
//! range. Every nonempty bin becomes an atom placed at the area-weighted mean
//! of the values that fell into it, so `⟨ν, id⟩` reproduces the patch mean
//! exactly and all atoms lie inside the data range.

use rayon::prelude::*;
use thiserror::Error;

use crate::geom;
use crate::mesh::{Dimension, Mesh};
use crate::physics::FluxModel;
use crate::scheme::CellField;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum YoungError {
    #[error("patch {patch} holds {cells} cells; at least 4 are required")]
    PatchTooFine { patch: usize, cells: usize },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("refinement levels do not describe the same problem: {0}")]
    Mismatch(String),
    #[error("no records at or before t = {0}")]
    NoEarlyRecords(f64),
}

pub const DEFAULT_BINS: usize = 64;
pub const DEFAULT_PATCHES: usize = 8;
pub const MIN_CELLS_PER_PATCH: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct PatchMeasure {
    /// `(value, probability)` per nonempty bin, in bin order.
    pub atoms: Vec<(f64, f64)>,
    /// Probability per bin (zero for empty bins).
    pub weights: Vec<f64>,
    pub area: f64,
    pub cells: usize,
}

impl PatchMeasure {
    /// `⟨ν, g⟩`.
    pub fn pairing(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(v, w)| w * g(v)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.pairing(|v| v)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.pairing(|v| (v - m) * (v - m))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalYoungMeasure {
    pub patches_per_axis: usize,
    pub bins: usize,
    /// Global `[min, max]` of the field; bins split it evenly.
    pub range: (f64, f64),
    pub patches: Vec<PatchMeasure>,
    pub time: f64,
    pub h: f64,
}

impl EmpiricalYoungMeasure {
    pub fn bin_width(&self) -> f64 {
        (self.range.1 - self.range.0) / self.bins as f64
    }

    pub fn max_variance(&self) -> f64 {
        self.patches.iter().map(PatchMeasure::variance).fold(0.0, f64::max)
    }
}

/// Patch index of every cell for `patches` patches per axis over the mesh's
/// bounding box.
fn patch_of_cells(mesh: &Mesh, patches: usize) -> Vec<usize> {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for v in mesh.vertices() {
        for d in 0..2 {
            lo[d] = lo[d].min(v[d]);
            hi[d] = hi[d].max(v[d]);
        }
    }
    let index = |x: f64, d: usize| (((x - lo[d]) / (hi[d] - lo[d]) * patches as f64) as usize).min(patches - 1);
    mesh.cells()
        .iter()
        .map(|c| match mesh.dimension() {
            Dimension::One => index(c.centroid[0], 0),
            Dimension::Two => index(c.centroid[0], 0) * patches + index(c.centroid[1], 1),
        })
        .collect()
}

pub fn build_young(field: &CellField, patches: usize, bins: usize) -> Result<EmpiricalYoungMeasure, YoungError> {
    if patches == 0 || bins == 0 {
        return Err(YoungError::BadParameter(format!("patches ({patches}) and bins ({bins}) must be positive")));
    }
    let mesh = field.mesh();
    let u = field.values();
    let count = patches.pow(mesh.dimension().as_usize() as u32);
    let owner = patch_of_cells(mesh, patches);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (k, &p) in owner.iter().enumerate() {
        members[p].push(k);
    }
    if let Some((patch, m)) = members.iter().enumerate().find(|(_, m)| m.len() < MIN_CELLS_PER_PATCH) {
        return Err(YoungError::PatchTooFine { patch, cells: m.len() });
    }
    let (lo, hi) = (field.min(), field.max());
    let bin = |v: f64| if hi > lo { (((v - lo) / (hi - lo) * bins as f64) as usize).min(bins - 1) } else { 0 };
    let patches_out = members
        .par_iter()
        .map(|cells| {
            let mut mass = vec![0.0; bins];
            let mut moment = vec![0.0; bins];
            let mut area = 0.0;
            for &k in cells {
                let a = mesh.cells()[k].area;
                let b = bin(u[k]);
                mass[b] += a;
                moment[b] += a * u[k];
                area += a;
            }
            let atoms = (0..bins)
                .filter(|&b| mass[b] > 0.0)
                .map(|b| ((moment[b] / mass[b]).clamp(lo, hi), mass[b] / area))
                .collect();
            PatchMeasure { atoms, weights: mass.iter().map(|m| m / area).collect(), area, cells: cells.len() }
        })
        .collect();
    Ok(EmpiricalYoungMeasure { patches_per_axis: patches, bins, range: (lo, hi), patches: patches_out, time: field.time(), h: mesh.h() })
}

/// Per patch `|⟨ν, f⟩ - f(⟨ν, id⟩)|` (Euclidean norm for vector fluxes).
pub fn nonlinearity_gap(ym: &EmpiricalYoungMeasure, flux: &FluxModel) -> Vec<f64> {
    ym.patches
        .iter()
        .map(|p| {
            let paired = [p.pairing(|v| flux.eval(v)[0]), p.pairing(|v| flux.eval(v)[1])];
            geom::norm(geom::sub(paired, flux.eval(p.mean())))
        })
        .collect()
}

pub fn max_nonlinearity_gap(ym: &EmpiricalYoungMeasure, flux: &FluxModel) -> f64 {
    nonlinearity_gap(ym, flux).into_iter().fold(0.0, f64::max)
}

/// Patches per axis that give each patch about `cells_per_axis` cells along
/// each axis of a quasi-uniform mesh.
pub fn patches_for(mesh: &Mesh, cells_per_axis: usize) -> usize {
    let per_axis = match mesh.dimension() {
        Dimension::One => mesh.num_cells() as f64,
        // triangles pair up into quadrilaterals
        Dimension::Two => (mesh.num_cells() as f64 / 2.0).sqrt(),
    };
    ((per_axis / cells_per_axis as f64).floor() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendLevel {
    pub h: f64,
    pub patches: usize,
    pub max_variance: f64,
}

/// Maximum patch variance per refinement level. `patches(level_field)` picks
/// the patch count for each level.
pub fn dirac_trend(levels: &[CellField], patches: impl Fn(&CellField) -> usize, bins: usize) -> Result<Vec<TrendLevel>, YoungError> {
    if levels.len() < 3 {
        return Err(YoungError::BadParameter(format!("need at least 3 refinement levels, got {}", levels.len())));
    }
    let t0 = levels[0].time();
    let dim = levels[0].mesh().dimension();
    for (i, l) in levels.iter().enumerate() {
        if (l.time() - t0).abs() > 1e-12 * t0.abs().max(1.0) {
            return Err(YoungError::Mismatch(format!("level {i} is at t = {}, level 0 at t = {t0}", l.time())));
        }
        if l.mesh().dimension() != dim {
            return Err(YoungError::Mismatch(format!("level {i} has a different dimension")));
        }
    }
    levels
        .iter()
        .map(|l| {
            let p = patches(l);
            let ym = build_young(l, p, bins)?;
            Ok(TrendLevel { h: l.mesh().h(), patches: p, max_variance: ym.max_variance() })
        })
        .collect()
}

/// `Σ_K ∫_K |u_K - u0(x)| dx` by the mesh quadrature.
pub fn initial_distance(field: &CellField, u0: &dyn Fn([f64; 2]) -> f64) -> f64 {
    let mesh = field.mesh();
    (0..mesh.num_cells())
        .map(|k| {
            let uk = field.values()[k];
            mesh.cells()[k].area * mesh.cell_quadrature(k).into_iter().map(|(w, x)| w * (uk - u0(x)).abs()).sum::<f64>()
        })
        .sum()
}

/// Time average of [`initial_distance`] over the records with `t ≤ t_max`
/// (trapezoid rule, divided by the covered time span); with a single record
/// its distance is returned.
pub fn initial_consistency(records: &[CellField], u0: &dyn Fn([f64; 2]) -> f64, t_max: f64) -> Result<f64, YoungError> {
    let mut early: Vec<&CellField> = records.iter().filter(|r| r.time() <= t_max).collect();
    early.sort_by(|a, b| a.time().total_cmp(&b.time()));
    let Some(first) = early.first() else {
        return Err(YoungError::NoEarlyRecords(t_max));
    };
    let d: Vec<f64> = early.iter().map(|r| initial_distance(r, u0)).collect();
    let span = early.last().unwrap().time() - first.time();
    if early.len() == 1 || span <= 0.0 {
        return Ok(d[0]);
    }
    let integral: f64 = early.windows(2).zip(d.windows(2)).map(|(r, e)| 0.5 * (e[0] + e[1]) * (r[1].time() - r[0].time())).sum();
    Ok(integral / span)
}
