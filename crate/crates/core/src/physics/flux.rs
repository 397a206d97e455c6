use std::fmt;
use std::str::FromStr;

use crate::geom::{self, Vec2};

use super::PhysicsError;

/// Shape of `f` along a direction; selects the interval-extremum route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvexityClass {
    StrictlyConvex,
    Linear,
    /// Anything else (nonconvex, or convex with linear pieces).
    Nonconvex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxKind {
    /// `f(u) = u²/2` in 1-D.
    Burgers,
    /// `f(u) = a u`.
    LinearAdvection(Vec2),
    /// `f(u) = u² / (u² + (1-u)²)` in 1-D.
    BuckleyLeverett,
    /// `f(u) = (u²/2)(cos θ, sin θ)`.
    RotatedBurgers { angle: f64 },
    /// `f(u) = u` for `u < 0`, `u + u²/2` for `u ≥ 0`: linearly degenerate on
    /// the negative half-line.
    LinearQuadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Min,
    Max,
}

/// A flux function `f: R → R^d` with its derivative and the interval oracles
/// needed by Godunov-type and Engquist–Osher fluxes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxModel {
    kind: FluxKind,
}

const SAMPLES: usize = 64;
const BRACKET_TOL: f64 = 1e-10;

impl FluxModel {
    pub fn new(kind: FluxKind) -> Result<FluxModel, PhysicsError> {
        let finite = match kind {
            FluxKind::LinearAdvection(a) => a[0].is_finite() && a[1].is_finite(),
            FluxKind::RotatedBurgers { angle } => angle.is_finite(),
            _ => true,
        };
        if !finite {
            return Err(PhysicsError::BadParameter(format!("non-finite flux parameter in {kind:?}")));
        }
        Ok(FluxModel { kind })
    }

    pub fn burgers() -> FluxModel {
        FluxModel { kind: FluxKind::Burgers }
    }

    pub fn linear_advection(a: Vec2) -> FluxModel {
        FluxModel::new(FluxKind::LinearAdvection(a)).expect("finite velocity")
    }

    pub fn kind(&self) -> FluxKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        match self.kind {
            FluxKind::Burgers | FluxKind::BuckleyLeverett | FluxKind::LinearQuadratic => 1,
            FluxKind::LinearAdvection(a) => if a[1] == 0.0 { 1 } else { 2 },
            FluxKind::RotatedBurgers { .. } => 2,
        }
    }

    pub fn convexity(&self) -> ConvexityClass {
        match self.kind {
            FluxKind::Burgers | FluxKind::RotatedBurgers { .. } => ConvexityClass::StrictlyConvex,
            FluxKind::LinearAdvection(_) => ConvexityClass::Linear,
            FluxKind::BuckleyLeverett | FluxKind::LinearQuadratic => ConvexityClass::Nonconvex,
        }
    }

    /// Direction of a quadratic flux `(u²/2)·d`, if the flux is one.
    fn quadratic_direction(&self) -> Option<Vec2> {
        match self.kind {
            FluxKind::Burgers => Some([1.0, 0.0]),
            FluxKind::RotatedBurgers { angle } => Some([angle.cos(), angle.sin()]),
            _ => None,
        }
    }

    pub fn eval(&self, u: f64) -> Vec2 {
        match self.kind {
            FluxKind::Burgers => [0.5 * u * u, 0.0],
            FluxKind::LinearAdvection(a) => geom::scale(a, u),
            FluxKind::BuckleyLeverett => [u * u / (u * u + (1.0 - u) * (1.0 - u)), 0.0],
            FluxKind::RotatedBurgers { angle } => geom::scale([angle.cos(), angle.sin()], 0.5 * u * u),
            FluxKind::LinearQuadratic => [if u < 0.0 { u } else { u + 0.5 * u * u }, 0.0],
        }
    }

    pub fn deriv(&self, u: f64) -> Vec2 {
        match self.kind {
            FluxKind::Burgers => [u, 0.0],
            FluxKind::LinearAdvection(a) => a,
            FluxKind::BuckleyLeverett => {
                let d = u * u + (1.0 - u) * (1.0 - u);
                [2.0 * u * (1.0 - u) / (d * d), 0.0]
            }
            FluxKind::RotatedBurgers { angle } => geom::scale([angle.cos(), angle.sin()], u),
            FluxKind::LinearQuadratic => [if u < 0.0 { 1.0 } else { 1.0 + u }, 0.0],
        }
    }

    /// `f(u)·n`.
    #[inline]
    pub fn normal_flux(&self, u: f64, n: Vec2) -> f64 {
        geom::dot(self.eval(u), n)
    }

    /// `f'(u)·n`.
    #[inline]
    pub fn normal_speed(&self, u: f64, n: Vec2) -> f64 {
        geom::dot(self.deriv(u), n)
    }

    /// Extremal value of `f·n` over `[min(a,b), max(a,b)]`.
    pub fn interval_extremum(&self, a: f64, b: f64, n: Vec2, which: Extremum) -> f64 {
        // minima are computed as negated maxima of f·(-n) so that
        // min(f·n) and -max(f·(-n)) agree bit for bit
        match which {
            Extremum::Max => self.interval_max(a.min(b), a.max(b), n),
            Extremum::Min => -self.interval_max(a.min(b), a.max(b), geom::neg(n)),
        }
    }

    fn interval_max(&self, lo: f64, hi: f64, n: Vec2) -> f64 {
        if let Some(d) = self.quadratic_direction() {
            let c = geom::dot(d, n);
            let phi = |u: f64| c * (0.5 * u * u);
            let mut m = phi(lo).max(phi(hi));
            if lo < 0.0 && hi > 0.0 {
                m = m.max(phi(0.0));
            }
            return m;
        }
        if let FluxKind::LinearAdvection(_) = self.kind {
            return self.normal_flux(lo, n).max(self.normal_flux(hi, n));
        }
        let phi = |u: f64| self.normal_flux(u, n);
        turning_points(&phi, lo, hi).into_iter().map(phi).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `|f'(w)·n|` over the interval hull of `a` and `b`.
    pub fn max_normal_speed(&self, a: f64, b: f64, n: Vec2) -> f64 {
        let (lo, hi) = (a.min(b), a.max(b));
        if let Some(d) = self.quadratic_direction() {
            return geom::dot(d, n).abs() * lo.abs().max(hi.abs());
        }
        match self.kind {
            FluxKind::LinearAdvection(a) => geom::dot(a, n).abs(),
            FluxKind::LinearQuadratic => {
                // f'·n = n_x on u < 0 and n_x (1 + u) on u ≥ 0
                let s = |u: f64| self.normal_speed(u, n).abs();
                s(lo).max(s(hi)).max(if lo < 0.0 { n[0].abs() } else { 0.0 })
            }
            _ => {
                let speed = |u: f64| self.normal_speed(u, n);
                let up = turning_points(&speed, lo, hi).into_iter().map(speed).fold(f64::NEG_INFINITY, f64::max);
                let neg = |u: f64| -self.normal_speed(u, n);
                let down = turning_points(&neg, lo, hi).into_iter().map(neg).fold(f64::NEG_INFINITY, f64::max);
                up.abs().max(down.abs())
            }
        }
    }

    /// Largest Euclidean norm `|f'(w)|` over the hull of `a` and `b`; bounds
    /// `|f'·n|` for every unit normal.
    pub fn max_speed(&self, a: f64, b: f64) -> f64 {
        match self.dimension() {
            1 => self.max_normal_speed(a, b, [1.0, 0.0]),
            _ => {
                if let Some(_d) = self.quadratic_direction() {
                    a.abs().max(b.abs())
                } else if let FluxKind::LinearAdvection(v) = self.kind {
                    geom::norm(v)
                } else {
                    unreachable!("only quadratic and linear fluxes are two-dimensional")
                }
            }
        }
    }

    /// `∫ |f'(w)·n| dw` over the hull of `a` and `b` (nonnegative).
    pub fn total_variation(&self, a: f64, b: f64, n: Vec2) -> f64 {
        let (lo, hi) = (a.min(b), a.max(b));
        if let Some(d) = self.quadratic_direction() {
            let signed_sq = |u: f64| 0.5 * u * u.abs();
            return geom::dot(d, n).abs() * (signed_sq(hi) - signed_sq(lo));
        }
        if let FluxKind::LinearAdvection(v) = self.kind {
            return geom::dot(v, n).abs() * (hi - lo);
        }
        self.variation_split(lo, hi, n).0
    }

    /// `∫_lo^hi max(f'(w)·n, 0) dw` for `lo ≤ hi`.
    pub fn positive_variation(&self, lo: f64, hi: f64, n: Vec2) -> f64 {
        debug_assert!(lo <= hi);
        if let Some(d) = self.quadratic_direction() {
            let c = geom::dot(d, n);
            let pos = |u: f64| u.max(0.0);
            let neg = |u: f64| (-u).max(0.0);
            return if c >= 0.0 {
                c * 0.5 * (pos(hi) * pos(hi) - pos(lo) * pos(lo))
            } else {
                -c * 0.5 * (neg(lo) * neg(lo) - neg(hi) * neg(hi))
            };
        }
        if let FluxKind::LinearAdvection(v) = self.kind {
            return geom::dot(v, n).max(0.0) * (hi - lo);
        }
        self.variation_split(lo, hi, n).1
    }

    /// (total, positive) variation of `f·n` on `[lo, hi]` through its turning points.
    fn variation_split(&self, lo: f64, hi: f64, n: Vec2) -> (f64, f64) {
        let phi = |u: f64| self.normal_flux(u, n);
        let mut pts = turning_points(&phi, lo, hi);
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut total = 0.0;
        let mut positive = 0.0;
        for w in pts.windows(2) {
            let d = phi(w[1]) - phi(w[0]);
            total += d.abs();
            positive += d.max(0.0);
        }
        (total, positive)
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

/// Endpoints plus the interior turning points of `phi` on `[lo, hi]`, located
/// by sampling and refined by golden-section search inside each bracket.
fn turning_points(phi: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = vec![lo, hi];
    if hi <= lo {
        return out;
    }
    let step = (hi - lo) / SAMPLES as f64;
    let xs: Vec<f64> = (0..=SAMPLES).map(|i| if i == SAMPLES { hi } else { lo + step * i as f64 }).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| phi(x)).collect();
    for i in 1..SAMPLES {
        let d1 = ys[i] - ys[i - 1];
        let d2 = ys[i + 1] - ys[i];
        if d1 >= 0.0 && d2 <= 0.0 && (d1 > 0.0 || d2 < 0.0) {
            out.push(golden_max(phi, xs[i - 1], xs[i + 1]));
        } else if d1 <= 0.0 && d2 >= 0.0 && (d1 < 0.0 || d2 > 0.0) {
            out.push(golden_max(&|x| -phi(x), xs[i - 1], xs[i + 1]));
        }
    }
    out
}

fn golden_max(phi: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (phi(c), phi(d));
    while b - a > BRACKET_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = phi(d);
        }
    }
    // best of the bracket ends and interior probes
    [a, b, c, d].into_iter().fold(c, |best, x| if phi(x) > phi(best) { x } else { best })
}

impl fmt::Display for FluxModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FluxKind::Burgers => write!(f, "burgers"),
            FluxKind::LinearAdvection(a) => write!(f, "linear_advection({},{})", a[0], a[1]),
            FluxKind::BuckleyLeverett => write!(f, "buckley_leverett"),
            FluxKind::RotatedBurgers { angle } => write!(f, "rotated_burgers_2d({angle})"),
            FluxKind::LinearQuadratic => write!(f, "linear_quadratic"),
        }
    }
}

impl FromStr for FluxModel {
    type Err = PhysicsError;

    /// Accepts `burgers`, `linear_advection(a)`, `linear_advection(ax,ay)`,
    /// `buckley_leverett`, `rotated_burgers_2d(angle)` and `linear_quadratic`.
    fn from_str(s: &str) -> Result<FluxModel, PhysicsError> {
        let (name, args) = super::split_call(s)?;
        let kind = match (name.as_str(), args.as_slice()) {
            ("burgers", []) => FluxKind::Burgers,
            ("linear_advection", [a]) => FluxKind::LinearAdvection([*a, 0.0]),
            ("linear_advection", [a, b]) => FluxKind::LinearAdvection([*a, *b]),
            ("buckley_leverett", []) => FluxKind::BuckleyLeverett,
            ("rotated_burgers_2d", [t]) => FluxKind::RotatedBurgers { angle: *t },
            ("linear_quadratic", []) => FluxKind::LinearQuadratic,
            _ => return Err(PhysicsError::UnknownFlux(s.to_string())),
        };
        FluxModel::new(kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all() -> Vec<FluxModel> {
        ["burgers", "linear_advection(1,0.5)", "buckley_leverett", "rotated_burgers_2d(0.7)", "linear_quadratic", "linear_advection(-2)"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect()
    }

    #[test]
    fn named_values() {
        let b = FluxModel::burgers();
        assert_eq!(b.eval(2.0)[0], 2.0);
        assert_eq!(b.deriv(2.0)[0], 2.0);
        let l: FluxModel = "linear_advection(1,0)".parse().unwrap();
        assert_eq!(l.deriv(3.7), [1.0, 0.0]);
        let bl: FluxModel = "buckley_leverett".parse().unwrap();
        assert!((bl.eval(0.5)[0] - 0.5).abs() < 1e-15);
        assert_eq!(b.convexity(), ConvexityClass::StrictlyConvex);
        assert_eq!(l.convexity(), ConvexityClass::Linear);
        assert_eq!(bl.convexity(), ConvexityClass::Nonconvex);
        assert!(matches!("sqrt".parse::<FluxModel>(), Err(PhysicsError::UnknownFlux(_))));
        assert!("linear_advection(nan)".parse::<FluxModel>().is_err());
    }

    #[test]
    fn derivative_matches_central_differences() {
        for f in all() {
            for i in 0..100 {
                let u = -1.3 + 2.9 * i as f64 / 99.0;
                if matches!(f.kind(), FluxKind::LinearQuadratic) && u.abs() < 1e-3 {
                    continue;
                }
                let h = 1e-6;
                for c in 0..2 {
                    let fd = (f.eval(u + h)[c] - f.eval(u - h)[c]) / (2.0 * h);
                    let exact = f.deriv(u)[c];
                    assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{f} at {u}: {fd} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn interval_extremum_matches_brute_force() {
        let normals = [[1.0, 0.0], [-1.0, 0.0], [0.6, 0.8], [-0.28, 0.96]];
        let intervals: [(f64, f64); 6] = [(-1.0, 1.0), (0.2, 0.9), (-1.5, -0.1), (0.0, 1.0), (1.1, -0.4), (0.3, 0.3)];
        for f in all() {
            for n in normals {
                for (a, b) in intervals {
                    let (lo, hi) = (a.min(b), a.max(b));
                    let samples: Vec<f64> = (0..=10_000).map(|i| f.normal_flux(lo + (hi - lo) * i as f64 / 1e4, n)).collect();
                    let bmax = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let bmin = samples.iter().copied().fold(f64::INFINITY, f64::min);
                    assert!((f.interval_extremum(a, b, n, Extremum::Max) - bmax).abs() < 1e-8, "{f} max on [{lo},{hi}]");
                    assert!((f.interval_extremum(a, b, n, Extremum::Min) - bmin).abs() < 1e-8, "{f} min on [{lo},{hi}]");
                }
            }
        }
    }

    #[test]
    fn coincident_interval_is_point_value() {
        for f in all() {
            for u in [-0.7, 0.0, 0.4, 1.2] {
                assert_eq!(f.interval_extremum(u, u, [1.0, 0.0], Extremum::Max), f.normal_flux(u, [1.0, 0.0]));
                assert_eq!(f.interval_extremum(u, u, [0.6, 0.8], Extremum::Min), f.normal_flux(u, [0.6, 0.8]));
            }
        }
    }

    #[test]
    fn speeds_and_variations_match_sampling() {
        let n = [0.6, -0.8];
        for f in all() {
            for (a, b) in [(-1.0, 1.0), (0.1, 0.8), (-1.2, -0.3)] {
                let m = 20_000;
                let grid: Vec<f64> = (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect();
                let speed = grid.iter().map(|&u| f.normal_speed(u, n).abs()).fold(0.0, f64::max);
                assert!((f.max_normal_speed(a, b, n) - speed).abs() < 1e-6, "{f}");
                let tv: f64 = grid.windows(2).map(|w| (f.normal_flux(w[1], n) - f.normal_flux(w[0], n)).abs()).sum();
                assert!((f.total_variation(a, b, n) - tv).abs() < 1e-9, "{f}");
                let pv: f64 = grid.windows(2).map(|w| (f.normal_flux(w[1], n) - f.normal_flux(w[0], n)).max(0.0)).sum();
                assert!((f.positive_variation(a, b, n) - pv).abs() < 1e-9, "{f}");
            }
        }
    }

    #[test]
    fn display_round_trips() {
        for f in all() {
            assert_eq!(f.to_string().parse::<FluxModel>().unwrap(), f);
        }
    }
}
