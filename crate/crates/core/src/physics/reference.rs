use std::f64::consts::PI;

use crate::geom::{self, Vec2};
use crate::mesh::Mesh;

use super::{FluxKind, FluxModel, PhysicsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    Smooth,
    Shock,
    Rarefaction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `left` for `x < x0`, `right` otherwise.
    Step { x0: f64, left: f64, right: f64 },
    /// `sin(2π x)`.
    Sine,
}

impl Profile {
    pub fn eval(&self, x: Vec2) -> f64 {
        match *self {
            Profile::Step { x0, left, right } => if x[0] < x0 { left } else { right },
            Profile::Sine => (2.0 * PI * x[0]).sin(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    /// Burgers-type Riemann problem along the flux direction `d`.
    Riemann { left: f64, right: f64, x0: f64, d: Vec2 },
    /// Burgers-type, `u0(ξ) = sin(2π ξ)` along `d`, before gradient blowup.
    SmoothSine { d: Vec2 },
    /// `u0(x - a t)`.
    Advected { a: Vec2, profile: Profile },
}

/// Closed-form solution used as a convergence oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSolution {
    name: &'static str,
    kind: Kind,
    regularity: Regularity,
    valid_until: f64,
}

fn burgers_direction(flux: &FluxModel) -> Option<Vec2> {
    match flux.kind() {
        FluxKind::Burgers => Some([1.0, 0.0]),
        FluxKind::RotatedBurgers { angle } => Some([angle.cos(), angle.sin()]),
        _ => None,
    }
}

impl ReferenceSolution {
    /// `riemann_shock` (1 → 0), `riemann_rarefaction` (-1 → 1),
    /// `smooth_sine_preshock`, `advected_profile` (unit step at 0) and
    /// `advected_sine`.
    pub fn new(name: &str, flux: &FluxModel) -> Result<ReferenceSolution, PhysicsError> {
        let incompatible = || PhysicsError::IncompatibleReference { reference: name.to_string(), flux: flux.to_string() };
        match name {
            "riemann_shock" | "riemann_rarefaction" => {
                let d = burgers_direction(flux).ok_or_else(incompatible)?;
                let (left, right) = if name == "riemann_shock" { (1.0, 0.0) } else { (-1.0, 1.0) };
                Ok(ReferenceSolution::riemann(left, right, 0.0, d))
            }
            "smooth_sine_preshock" => {
                let d = burgers_direction(flux).ok_or_else(incompatible)?;
                Ok(ReferenceSolution {
                    name: "smooth_sine_preshock",
                    kind: Kind::SmoothSine { d },
                    regularity: Regularity::Smooth,
                    valid_until: 1.0 / (2.0 * PI),
                })
            }
            "advected_profile" | "advected_sine" => {
                let FluxKind::LinearAdvection(a) = flux.kind() else { return Err(incompatible()) };
                let (profile, regularity, name) = if name == "advected_sine" {
                    (Profile::Sine, Regularity::Smooth, "advected_sine")
                } else {
                    (Profile::Step { x0: 0.0, left: 1.0, right: 0.0 }, Regularity::Shock, "advected_profile")
                };
                Ok(ReferenceSolution { name, kind: Kind::Advected { a, profile }, regularity, valid_until: f64::INFINITY })
            }
            _ => Err(PhysicsError::UnknownReference(name.to_string())),
        }
    }

    fn riemann(left: f64, right: f64, x0: f64, d: Vec2) -> ReferenceSolution {
        let regularity = if left > right { Regularity::Shock } else { Regularity::Rarefaction };
        let name = if left > right { "riemann_shock" } else { "riemann_rarefaction" };
        ReferenceSolution { name, kind: Kind::Riemann { left, right, x0, d }, regularity, valid_until: f64::INFINITY }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    /// Solutions are valid on `[0, valid_until)`.
    pub fn valid_until(&self) -> f64 {
        self.valid_until
    }

    /// Left and right states of a Riemann problem.
    pub fn riemann_states(&self) -> Option<(f64, f64)> {
        match self.kind {
            Kind::Riemann { left, right, .. } => Some((left, right)),
            _ => None,
        }
    }

    pub fn check_time(&self, t: f64) -> Result<(), PhysicsError> {
        if t >= 0.0 && t < self.valid_until {
            Ok(())
        } else {
            Err(PhysicsError::InvalidTime { t, valid_until: self.valid_until })
        }
    }

    pub fn initial(&self, x: Vec2) -> f64 {
        self.evaluate_unchecked(0.0, x)
    }

    pub fn evaluate(&self, t: f64, x: Vec2) -> Result<f64, PhysicsError> {
        self.check_time(t)?;
        Ok(self.evaluate_unchecked(t, x))
    }

    fn evaluate_unchecked(&self, t: f64, x: Vec2) -> f64 {
        match self.kind {
            Kind::Riemann { left, right, x0, d } => {
                let xi = geom::dot(x, d) - x0;
                if left > right {
                    let s = 0.5 * (left + right);
                    if xi < s * t { left } else { right }
                } else if xi <= left * t {
                    left
                } else if xi >= right * t {
                    right
                } else {
                    xi / t
                }
            }
            Kind::SmoothSine { d } => {
                let xi = geom::dot(x, d);
                burgers_characteristic(xi, t, |s| (2.0 * PI * s).sin(), |s| 2.0 * PI * (2.0 * PI * s).cos())
            }
            Kind::Advected { a, profile } => profile.eval(geom::sub(x, geom::scale(a, t))),
        }
    }

    /// Cell average at time `t` with the mesh's cell quadrature.
    pub fn cell_average(&self, mesh: &Mesh, cell: usize, t: f64) -> f64 {
        mesh.cell_quadrature(cell).into_iter().map(|(w, p)| w * self.evaluate_unchecked(t, p)).sum()
    }

    /// Cell averages over the whole mesh.
    pub fn project(&self, mesh: &Mesh, t: f64) -> Result<Vec<f64>, PhysicsError> {
        self.check_time(t)?;
        Ok((0..mesh.num_cells()).map(|k| self.cell_average(mesh, k, t)).collect())
    }
}

/// Solve `u = u0(ξ - u t)` for smooth data before characteristics cross,
/// with Newton steps safeguarded by bisection on `[-1, 1]`.
fn burgers_characteristic(xi: f64, t: f64, u0: impl Fn(f64) -> f64, du0: impl Fn(f64) -> f64) -> f64 {
    if t == 0.0 {
        return u0(xi);
    }
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut u = u0(xi);
    for _ in 0..200 {
        let g = u - u0(xi - u * t);
        if g > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let dg = 1.0 + du0(xi - u * t) * t;
        let mut next = u - g / dg;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - u).abs() <= 1e-16 {
            return next;
        }
        u = next;
    }
    u
}
