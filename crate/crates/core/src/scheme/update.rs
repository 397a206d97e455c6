use rayon::prelude::*;

use crate::mesh::CellFace;
use crate::physics::FluxModel;

use super::{numerical_flux, reconstruct, CellField, FluxRule, LfDissipation, ReconstructionMode, SchemeConfig, SchemeError, TimeIntegrator};

/// Traces on both sides of a face and the Lax-Friedrichs speed bound used
/// there (zero for the other rules).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceState {
    /// Trace on the left cell's side.
    pub a: f64,
    /// Trace on the right side; equals `a` at outflow faces.
    pub b: f64,
    pub lambda: f64,
}

/// Field-wide wave-speed bound over `[min u, max u]`.
fn global_lambda(field: &CellField, flux: &FluxModel) -> f64 {
    flux.max_speed(field.min(), field.max())
}

pub fn face_states(field: &CellField, flux: &FluxModel, config: &SchemeConfig) -> Vec<FaceState> {
    let mesh = field.mesh();
    let u = field.values();
    let rec = match config.reconstruction {
        ReconstructionMode::Constant => None,
        ReconstructionMode::LimitedLinear => Some(reconstruct(field, config)),
    };
    let lambda_global = match (config.flux_rule, config.lf_dissipation) {
        (FluxRule::LaxFriedrichs, LfDissipation::Global) => Some(global_lambda(field, flux)),
        _ => None,
    };
    mesh.faces()
        .par_iter()
        .enumerate()
        .map(|(i, face)| {
            let (a, b) = match &rec {
                None => (u[face.left], face.right.cell().map_or(u[face.left], |r| u[r])),
                Some(rec) => {
                    let a = rec.face_trace(face.left, CellFace { face: i, sign: 1.0 });
                    let b = face.right.cell().map_or(a, |r| rec.face_trace(r, CellFace { face: i, sign: -1.0 }));
                    (a, b)
                }
            };
            let lambda = match (config.flux_rule, lambda_global) {
                (FluxRule::LaxFriedrichs, Some(l)) => l,
                (FluxRule::LaxFriedrichs, None) => flux.max_normal_speed(a, b, face.normal),
                _ => 0.0,
            };
            FaceState { a, b, lambda }
        })
        .collect()
}

/// `L(u)_K = -1/|K| Σ |e| g_{K,e}`.
fn operator(field: &CellField, flux: &FluxModel, config: &SchemeConfig) -> Result<Vec<f64>, SchemeError> {
    let mesh = field.mesh();
    let states = face_states(field, flux, config);
    let g: Vec<f64> = mesh
        .faces()
        .par_iter()
        .zip(states.par_iter())
        .map(|(face, s)| numerical_flux(config.flux_rule, flux, s.a, s.b, face.normal, s.lambda))
        .collect::<Result<_, _>>()?;
    Ok(mesh
        .cells()
        .par_iter()
        .map(|cell| {
            let mut acc = 0.0;
            for cf in &cell.faces {
                acc += cf.sign * mesh.faces()[cf.face].length * g[cf.face];
            }
            -acc / cell.area
        })
        .collect())
}

/// Largest time step allowed by the CFL condition
/// `Δt = cfl · min_K |K| / (perimeter(K) s_K)`, where `s_K` bounds `|f'·n|`
/// over the faces of `K` and the hull of `u_K` and its face-neighbor means.
pub fn max_stable_dt(field: &CellField, flux: &FluxModel, config: &SchemeConfig) -> f64 {
    let mesh = field.mesh();
    let u = field.values();
    let lambda_global = match (config.flux_rule, config.lf_dissipation) {
        (FluxRule::LaxFriedrichs, LfDissipation::Global) => global_lambda(field, flux),
        _ => 0.0,
    };
    let ratio = (0..mesh.num_cells())
        .into_par_iter()
        .map(|k| {
            let cell = &mesh.cells()[k];
            let (lo, hi) =
                cell.faces.iter().filter_map(|&cf| mesh.neighbor(k, cf)).fold((u[k], u[k]), |(lo, hi), (j, _)| (lo.min(u[j]), hi.max(u[j])));
            let s = cell
                .faces
                .iter()
                .map(|&cf| flux.max_normal_speed(lo, hi, mesh.outward_normal(cf)))
                .fold(lambda_global, f64::max)
                .max(1e-14);
            cell.area / (cell.perimeter * s)
        })
        .reduce(|| f64::INFINITY, f64::min);
    config.cfl * ratio
}

fn axpy(u: &[f64], dt: f64, l: &[f64]) -> Vec<f64> {
    u.iter().zip(l).map(|(u, l)| u + dt * l).collect()
}

fn advance(field: &CellField, flux: &FluxModel, config: &SchemeConfig, dt: f64, time: f64) -> Result<CellField, SchemeError> {
    let u = field.values();
    let values = match config.time_integrator {
        TimeIntegrator::Euler => axpy(u, dt, &operator(field, flux, config)?),
        TimeIntegrator::SspRk2 => {
            let u1 = field.with_values(axpy(u, dt, &operator(field, flux, config)?), time)?;
            let u2 = axpy(u1.values(), dt, &operator(&u1, flux, config)?);
            u.iter().zip(&u2).map(|(a, b)| 0.5 * (a + b)).collect()
        }
    };
    field.with_values(values, time)
}

/// One explicit step; refuses `dt` above [`max_stable_dt`].
pub fn step(field: &CellField, flux: &FluxModel, config: &SchemeConfig, dt: f64) -> Result<CellField, SchemeError> {
    config.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SchemeError::Config(format!("time step must be positive, got {dt}")));
    }
    let max_dt = max_stable_dt(field, flux, config);
    if dt > max_dt * (1.0 + 1e-12) {
        return Err(SchemeError::Stability { dt, max_dt });
    }
    advance(field, flux, config, dt, field.time() + dt)
}

/// A completed step as seen by a [`run_with`] observer.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo<'a> {
    pub index: usize,
    pub dt: f64,
    pub before: &'a CellField,
    pub after: &'a CellField,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Initial field, fields at the requested output times, final field.
    pub records: Vec<CellField>,
    pub steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &CellField {
        self.records.last().expect("trajectory holds the initial field")
    }
}

pub fn run(initial: &CellField, flux: &FluxModel, config: &SchemeConfig, t_final: f64, output_times: &[f64]) -> Result<Trajectory, SchemeError> {
    run_with(initial, flux, config, t_final, output_times, |_| Ok(()))
}

/// Step from `initial.time()` to `t_final` with CFL-limited steps, landing
/// exactly on every output time, and call `observer` after each step.
pub fn run_with(
    initial: &CellField,
    flux: &FluxModel,
    config: &SchemeConfig,
    t_final: f64,
    output_times: &[f64],
    mut observer: impl FnMut(StepInfo<'_>) -> Result<(), SchemeError>,
) -> Result<Trajectory, SchemeError> {
    config.validate()?;
    let t0 = initial.time();
    if !(t_final >= t0) || !t_final.is_finite() {
        return Err(SchemeError::Config(format!("final time {t_final} precedes the initial time {t0}")));
    }
    let mut stops: Vec<f64> = output_times.iter().copied().filter(|&t| t > t0 && t < t_final).collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    stops.push(t_final);

    let mut records = vec![initial.clone()];
    let mut current = initial.clone();
    let mut steps = 0;
    for &stop in &stops {
        if stop <= t0 {
            break;
        }
        while current.time() < stop {
            let max_dt = max_stable_dt(&current, flux, config);
            let remaining = stop - current.time();
            // clip the last step, and absorb a remainder too small to resolve
            let (dt, time) = if max_dt >= remaining * (1.0 - 1e-12) { (remaining, stop) } else { (max_dt, current.time() + max_dt) };
            let next = advance(&current, flux, config, dt, time)?;
            observer(StepInfo { index: steps, dt, before: &current, after: &next })?;
            steps += 1;
            current = next;
        }
        records.push(current.clone());
    }
    Ok(Trajectory { records, steps })
}
