//! Convergence studies: error measurement against reference solutions, rate
//! fitting, per-level audits and all file output.

mod config;
mod io;
mod study;

use std::path::PathBuf;

use thiserror::Error;

use crate::kinetic::KineticError;
use crate::mesh::MeshError;
use crate::physics::{PhysicsError, ReferenceSolution};
use crate::scheme::{CellField, SchemeError};
use crate::young::YoungError;

pub use config::{parse_key_values, AuditToggles, MeshSpec, StudyConfig};
pub use io::{read_field_dump, write_field_dump, write_vtk, REPORT_COLUMNS};
pub use study::{run_study, ConvergenceReport, LevelReport};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Kinetic(#[from] KineticError),
    #[error(transparent)]
    Young(#[from] YoungError),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> HarnessError {
        HarnessError::Io { path: path.into(), source }
    }
}

/// `Σ_K |K| |u_K - avg_K u(t, ·)|`, with reference averages from the same
/// quadrature used for initialization.
pub fn l1_error(field: &CellField, reference: &ReferenceSolution, t: f64) -> Result<f64, HarnessError> {
    let exact = reference.project(field.mesh(), t)?;
    Ok(field.mesh().cells().iter().zip(field.values().iter().zip(&exact)).map(|(c, (u, e))| c.area * (u - e).abs()).sum())
}

/// Least-squares slope of `log(error)` against `log(h)`.
pub fn fit_rate(pairs: &[(f64, f64)]) -> Result<f64, HarnessError> {
    if pairs.len() < 2 {
        return Err(HarnessError::Config(format!("rate fitting needs at least 2 levels, got {}", pairs.len())));
    }
    if let Some(&(h, e)) = pairs.iter().find(|(h, e)| !(*h > 0.0 && *e > 0.0)) {
        return Err(HarnessError::Config(format!("rate fitting needs positive h and error, got h = {h}, error = {e}")));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 {
        return Err(HarnessError::Config("rate fitting needs distinct mesh sizes".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::mesh::{uniform_interval, Boundary};
    use crate::physics::FluxModel;

    #[test]
    fn exact_rates() {
        assert!((fit_rate(&[(0.1, 0.1), (0.05, 0.05)]).unwrap() - 1.0).abs() < 1e-12);
        assert!((fit_rate(&[(0.1, 0.1), (0.05, 0.1 / 2f64.sqrt())]).unwrap() - 0.5).abs() < 1e-12);
        assert!(fit_rate(&[(0.1, 0.1)]).is_err());
        assert!(fit_rate(&[(0.1, 0.0), (0.05, 0.1)]).is_err());
        assert!(fit_rate(&[(0.1, 0.2), (0.1, 0.1)]).is_err());
    }

    #[test]
    fn l1_error_of_projection_and_shift() {
        let b = FluxModel::burgers();
        let r = ReferenceSolution::new("riemann_shock", &b).unwrap();
        let mesh = Arc::new(uniform_interval(0.0, 1.0, 40, Boundary::Outflow));
        let f = CellField::from_reference(mesh, &r, 0.3).unwrap();
        assert!(l1_error(&f, &r, 0.3).unwrap() < 1e-14);
        let shifted = f.with_values(f.values().iter().map(|u| u + 0.1).collect(), 0.3).unwrap();
        assert!((l1_error(&shifted, &r, 0.3).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn l1_error_rejects_invalid_time() {
        let b = FluxModel::burgers();
        let r = ReferenceSolution::new("smooth_sine_preshock", &b).unwrap();
        let f = CellField::constant(Arc::new(uniform_interval(0.0, 1.0, 8, Boundary::Periodic)), 0.0);
        assert!(matches!(l1_error(&f, &r, 1.0), Err(HarnessError::Physics(PhysicsError::InvalidTime { .. }))));
    }
}
