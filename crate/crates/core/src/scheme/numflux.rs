use crate::geom::Vec2;
use crate::physics::{sgn, Extremum, FluxModel};

use super::{FluxRule, SchemeError};

/// Two-point flux `g(a, b, n)` approximating `f·n` across a face with unit
/// normal `n` pointing from the `a` side to the `b` side.
///
/// `lambda` is only read by Lax-Friedrichs and must bound `|f'(w)·n|` on the
/// hull of `a` and `b`.
pub fn numerical_flux(rule: FluxRule, flux: &FluxModel, a: f64, b: f64, n: Vec2, lambda: f64) -> Result<f64, SchemeError> {
    Ok(match rule {
        FluxRule::LaxFriedrichs => {
            // coincident states carry no dissipation, whatever λ is
            let required = flux.max_normal_speed(a, b, n);
            if a != b && !(lambda >= required * (1.0 - 1e-12)) {
                return Err(SchemeError::LambdaTooSmall { lambda, required });
            }
            0.5 * (flux.normal_flux(a, n) + flux.normal_flux(b, n)) - 0.5 * lambda * (b - a)
        }
        FluxRule::EngquistOsher => {
            0.5 * (flux.normal_flux(a, n) + flux.normal_flux(b, n)) - 0.5 * sgn(b - a) * flux.total_variation(a, b, n)
        }
        FluxRule::Godunov => {
            if a <= b {
                flux.interval_extremum(a, b, n, Extremum::Min)
            } else {
                flux.interval_extremum(a, b, n, Extremum::Max)
            }
        }
        FluxRule::Central => 0.5 * (flux.normal_flux(a, n) + flux.normal_flux(b, n)),
    })
}
