//! Flux models, entropy pairs and closed-form reference solutions.

mod entropy;
mod flux;
mod reference;

use thiserror::Error;

pub use entropy::{kruzkov_pair, sgn, square_pair, EntropyKind, EntropyPair};
pub use flux::{ConvexityClass, Extremum, FluxKind, FluxModel};
pub use reference::{Profile, ReferenceSolution, Regularity};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhysicsError {
    #[error("unknown flux '{0}'")]
    UnknownFlux(String),
    #[error("unknown reference solution '{0}'")]
    UnknownReference(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("reference '{reference}' is not defined for flux {flux}")]
    IncompatibleReference { reference: String, flux: String },
    #[error("reference solution is not valid at t = {t} (valid before {valid_until})")]
    InvalidTime { t: f64, valid_until: f64 },
}

/// Split `name(a,b,...)` into the name and its numeric arguments.
pub(crate) fn split_call(s: &str) -> Result<(String, Vec<f64>), PhysicsError> {
    let s = s.trim();
    let Some(open) = s.find('(') else {
        return Ok((s.to_string(), Vec::new()));
    };
    if !s.ends_with(')') {
        return Err(PhysicsError::BadParameter(format!("unbalanced parentheses in '{s}'")));
    }
    let args = s[open + 1..s.len() - 1]
        .split(',')
        .map(|a| a.trim().parse::<f64>().map_err(|_| PhysicsError::BadParameter(format!("invalid number '{a}' in '{s}'"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((s[..open].trim().to_string(), args))
}
