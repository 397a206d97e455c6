use crate::geom::{self, Vec2};

use super::{FluxKind, FluxModel};

/// `sgn` with `sgn(0) = 0`.
#[inline]
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyKind {
    /// `η = |u - k|`, `q = sgn(u - k)(f(u) - f(k))`.
    Kruzkov { k: f64 },
    /// `η = u²/2`, `q = ∫_0^u v f'(v) dv`.
    Square,
}

/// A convex entropy with a compatible entropy flux, `q' = η' f'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPair {
    pub kind: EntropyKind,
    pub flux: FluxModel,
}

pub fn kruzkov_pair(flux: FluxModel, k: f64) -> EntropyPair {
    EntropyPair { kind: EntropyKind::Kruzkov { k }, flux }
}

pub fn square_pair(flux: FluxModel) -> EntropyPair {
    EntropyPair { kind: EntropyKind::Square, flux }
}

impl EntropyPair {
    pub fn kruzkov_parameter(&self) -> Option<f64> {
        match self.kind {
            EntropyKind::Kruzkov { k } => Some(k),
            EntropyKind::Square => None,
        }
    }

    pub fn eta(&self, u: f64) -> f64 {
        match self.kind {
            EntropyKind::Kruzkov { k } => (u - k).abs(),
            EntropyKind::Square => 0.5 * u * u,
        }
    }

    pub fn eta_prime(&self, u: f64) -> f64 {
        match self.kind {
            EntropyKind::Kruzkov { k } => sgn(u - k),
            EntropyKind::Square => u,
        }
    }

    pub fn q(&self, u: f64) -> Vec2 {
        match self.kind {
            EntropyKind::Kruzkov { k } => geom::scale(geom::sub(self.flux.eval(u), self.flux.eval(k)), sgn(u - k)),
            EntropyKind::Square => square_entropy_flux(&self.flux, u),
        }
    }
}

fn square_entropy_flux(flux: &FluxModel, u: f64) -> Vec2 {
    match flux.kind() {
        FluxKind::Burgers | FluxKind::RotatedBurgers { .. } => {
            // f = (u²/2) d  =>  q = (u³/3) d
            let d = flux.eval(1.0);
            geom::scale(d, 2.0 * u * u * u / 3.0)
        }
        FluxKind::LinearAdvection(a) => geom::scale(a, 0.5 * u * u),
        _ => {
            // integration by parts: q(u) = u f(u) - ∫_0^u f
            let fu = flux.eval(u);
            let int = integrate(|v| flux.eval(v)[0], 0.0, u);
            [u * fu[0] - int, 0.0]
        }
    }
}

/// Composite 5-point Gauss–Legendre; splits at 0 where shipped fluxes may kink.
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a.min(b) < 0.0 && a.max(b) > 0.0 {
        return gauss(&f, a, 0.0) + gauss(&f, 0.0, b);
    }
    gauss(&f, a, b)
}

fn gauss(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1, 0.236_926_885_056_189_1];
    let panels = 32;
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let c = a + h * (p as f64 + 0.5);
        for i in 0..5 {
            s += W[i] * f(c + 0.5 * h * X[i]);
        }
    }
    0.5 * h * s
}
