//! The finite volume solver: numerical fluxes, limited reconstruction, CFL
//! time-step control and the explicit cell-average update
//!
//! ```text
//! u_K^{n+1} = u_K^n - Δt/|K| Σ_{e⊂∂K} |e| g_{K,e}^n
//! ```
//!
//! Face fluxes are evaluated in parallel, each face once, and accumulated per
//! cell in a fixed face order, so results do not depend on the thread count.

mod audit;
mod numflux;
mod reconstruct;
mod update;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::mesh::{Dimension, Mesh};
use crate::physics::{PhysicsError, ReferenceSolution};

pub use audit::{l1_contraction, ContractionReport, Monitor, MonitorReport};
pub use numflux::numerical_flux;
pub use reconstruct::{reconstruct, Reconstruction};
pub use update::{face_states, max_stable_dt, run, run_with, step, FaceState, StepInfo, Trajectory};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("Lax-Friedrichs speed bound {lambda} is below the local wave speed {required}")]
    LambdaTooSmall { lambda: f64, required: f64 },
    #[error("time step {dt} exceeds the stable bound {max_dt}")]
    Stability { dt: f64, max_dt: f64 },
    #[error("fields live on different meshes")]
    MeshMismatch,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
}

macro_rules! named_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = SchemeError;

            fn from_str(s: &str) -> Result<$name, SchemeError> {
                match s.trim() {
                    $($text => Ok($name::$variant),)+
                    other => Err(SchemeError::Config(format!("unknown {} '{}'", stringify!($name), other))),
                }
            }
        }
    };
}

named_enum!(
    /// Two-point numerical flux. `Central` is the undissipated average, kept
    /// as a known non-E-flux for the audits.
    FluxRule {
        LaxFriedrichs => "lax_friedrichs",
        EngquistOsher => "engquist_osher",
        Godunov => "godunov",
        Central => "central",
    }
);

named_enum!(ReconstructionMode {
    Constant => "constant",
    LimitedLinear => "limited_linear",
});

named_enum!(TimeIntegrator {
    Euler => "euler",
    SspRk2 => "ssp_rk2",
});

named_enum!(
    /// Lax-Friedrichs speed bound: per face over the hull of the two traces,
    /// or one bound over the whole field.
    LfDissipation {
        Local => "local",
        Global => "global",
    }
);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub flux_rule: FluxRule,
    pub reconstruction: ReconstructionMode,
    pub time_integrator: TimeIntegrator,
    pub cfl: f64,
    pub lf_dissipation: LfDissipation,
}

impl Default for SchemeConfig {
    fn default() -> SchemeConfig {
        SchemeConfig {
            flux_rule: FluxRule::Godunov,
            reconstruction: ReconstructionMode::Constant,
            time_integrator: TimeIntegrator::Euler,
            cfl: 0.45,
            lf_dissipation: LfDissipation::Local,
        }
    }
}

impl SchemeConfig {
    /// First-order scheme with the given flux rule.
    pub fn first_order(flux_rule: FluxRule) -> SchemeConfig {
        SchemeConfig { flux_rule, ..SchemeConfig::default() }
    }

    /// Limited linear reconstruction with SSP-RK2.
    pub fn second_order(flux_rule: FluxRule) -> SchemeConfig {
        SchemeConfig {
            flux_rule,
            reconstruction: ReconstructionMode::LimitedLinear,
            time_integrator: TimeIntegrator::SspRk2,
            ..SchemeConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), SchemeError> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(SchemeError::Config(format!("cfl must lie in (0,1), got {}", self.cfl)));
        }
        Ok(())
    }

    /// True for the unusual pairings (linear reconstruction with Euler, or
    /// constant reconstruction with SSP-RK2); reports flag these.
    pub fn is_mixed_order(&self) -> bool {
        matches!(
            (self.reconstruction, self.time_integrator),
            (ReconstructionMode::LimitedLinear, TimeIntegrator::Euler) | (ReconstructionMode::Constant, TimeIntegrator::SspRk2)
        )
    }

    /// First-order with an E-flux: the setting of the maximum principle,
    /// TVD, L1-contraction and cell entropy inequality guarantees.
    pub fn is_monotone(&self) -> bool {
        self.reconstruction == ReconstructionMode::Constant
            && self.time_integrator == TimeIntegrator::Euler
            && self.flux_rule != FluxRule::Central
    }
}

impl fmt::Display for SchemeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}/cfl={}/lf={}",
            self.flux_rule, self.reconstruction, self.time_integrator, self.cfl, self.lf_dissipation
        )
    }
}

/// Cell averages of the conserved scalar at one time level.
#[derive(Debug, Clone)]
pub struct CellField {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
    time: f64,
}

impl CellField {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>, time: f64) -> Result<CellField, SchemeError> {
        if values.len() != mesh.num_cells() {
            return Err(SchemeError::InvalidField(format!("{} values for {} cells", values.len(), mesh.num_cells())));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(SchemeError::InvalidField(format!("non-finite value in cell {k}")));
        }
        if !time.is_finite() {
            return Err(SchemeError::InvalidField(format!("non-finite time {time}")));
        }
        Ok(CellField { mesh, values, time })
    }

    pub fn constant(mesh: Arc<Mesh>, c: f64) -> CellField {
        let n = mesh.num_cells();
        CellField::new(mesh, vec![c; n], 0.0).expect("finite constant")
    }

    /// Cell averages of `u0` by the mesh quadrature.
    pub fn from_fn(mesh: Arc<Mesh>, u0: impl Fn([f64; 2]) -> f64) -> Result<CellField, SchemeError> {
        let values = (0..mesh.num_cells())
            .map(|k| mesh.cell_quadrature(k).into_iter().map(|(w, p)| w * u0(p)).sum())
            .collect();
        CellField::new(mesh, values, 0.0)
    }

    /// Projection of a reference solution at time `t`.
    pub fn from_reference(mesh: Arc<Mesh>, reference: &ReferenceSolution, t: f64) -> Result<CellField, SchemeError> {
        let values = reference.project(&mesh, t)?;
        CellField::new(mesh, values, t)
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_values(&self, values: Vec<f64>, time: f64) -> Result<CellField, SchemeError> {
        CellField::new(self.mesh.clone(), values, time)
    }

    pub fn same_mesh(&self, other: &CellField) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh)
    }

    /// `Σ |K| u_K`.
    pub fn mass(&self) -> f64 {
        self.mesh.cells().iter().zip(&self.values).map(|(c, u)| c.area * u).sum()
    }

    /// `Σ |K| |u_K|`.
    pub fn l1_norm(&self) -> f64 {
        self.mesh.cells().iter().zip(&self.values).map(|(c, u)| c.area * u.abs()).sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Σ |K| |u_K - v_K|`.
    pub fn l1_distance(&self, other: &CellField) -> Result<f64, SchemeError> {
        if !self.same_mesh(other) && self.values.len() != other.values.len() {
            return Err(SchemeError::MeshMismatch);
        }
        Ok(self.mesh.cells().iter().zip(self.values.iter().zip(&other.values)).map(|(c, (u, v))| c.area * (u - v).abs()).sum())
    }

    /// `Σ_e |e| |u_R - u_L|` over two-sided faces; the usual total variation
    /// in 1-D.
    pub fn total_variation(&self) -> f64 {
        self.mesh
            .faces()
            .iter()
            .filter_map(|f| f.right.cell().map(|r| f.length * (self.values[r] - self.values[f.left]).abs()))
            .sum()
    }

    pub fn is_one_dimensional(&self) -> bool {
        self.mesh.dimension() == Dimension::One
    }
}
