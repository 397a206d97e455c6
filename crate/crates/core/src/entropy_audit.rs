//! Discrete entropy inequalities and the E-flux property.
//!
//! For a Kruzkov entropy `|u - k|` the numerical entropy flux is built from
//! the numerical flux by the Crandall–Majda splitting
//! `G(a, b; k) = g(a∨k, b∨k) - g(a∧k, b∧k)`, evaluated with the same speed
//! bound as the flux itself. The per-cell residual
//!
//! ```text
//! r_K = |u_K^{n+1} - k| - |u_K^n - k| + Δt/|K| Σ |e| G_{K,e}
//! ```
//!
//! is nonpositive for monotone schemes under the CFL condition; its positive
//! part measures the violation of the cell entropy inequality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::geom::Vec2;
use crate::physics::{sgn, FluxModel};
use crate::scheme::{face_states, numerical_flux, run_with, CellField, FaceState, FluxRule, LfDissipation, SchemeConfig, SchemeError};

/// Kruzkov numerical entropy flux `G(a, b; k)` across a face with normal `n`.
pub fn numerical_entropy_flux(rule: FluxRule, flux: &FluxModel, k: f64, a: f64, b: f64, n: Vec2, lambda: f64) -> Result<f64, SchemeError> {
    Ok(numerical_flux(rule, flux, a.max(k), b.max(k), n, lambda)? - numerical_flux(rule, flux, a.min(k), b.min(k), n, lambda)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyResidualField {
    pub residuals: Vec<f64>,
    pub k: f64,
    pub h: f64,
    pub dt: f64,
    /// Time of the field before the step.
    pub time: f64,
}

impl EntropyResidualField {
    /// `max_K r_K⁺`.
    pub fn max_positive(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

fn residuals_from_states(
    before: &CellField,
    after: &CellField,
    states: &[FaceState],
    dt: f64,
    flux: &FluxModel,
    rule: FluxRule,
    k: f64,
) -> Result<Vec<f64>, SchemeError> {
    let mesh = before.mesh();
    let g: Vec<f64> = mesh
        .faces()
        .par_iter()
        .zip(states.par_iter())
        .map(|(face, s)| numerical_entropy_flux(rule, flux, k, s.a, s.b, face.normal, s.lambda))
        .collect::<Result<_, _>>()?;
    let (u0, u1) = (before.values(), after.values());
    Ok(mesh
        .cells()
        .iter()
        .enumerate()
        .map(|(i, cell)| {
            let mut acc = 0.0;
            for cf in &cell.faces {
                acc += cf.sign * mesh.faces()[cf.face].length * g[cf.face];
            }
            (u1[i] - k).abs() - (u0[i] - k).abs() + dt / cell.area * acc
        })
        .collect())
}

fn check_pair(before: &CellField, after: &CellField) -> Result<(), SchemeError> {
    if before.same_mesh(after) || before.values().len() == after.values().len() {
        Ok(())
    } else {
        Err(SchemeError::MeshMismatch)
    }
}

/// Residuals of one step `before → after` of size `dt` for the Kruzkov
/// entropy with parameter `k`; fluxes use `before`'s traces.
pub fn entropy_residuals(
    before: &CellField,
    after: &CellField,
    dt: f64,
    flux: &FluxModel,
    config: &SchemeConfig,
    k: f64,
) -> Result<EntropyResidualField, SchemeError> {
    check_pair(before, after)?;
    let states = face_states(before, flux, config);
    let residuals = residuals_from_states(before, after, &states, dt, flux, config.flux_rule, k)?;
    Ok(EntropyResidualField { residuals, k, h: before.mesh().h(), dt, time: before.time() })
}

/// `(max_k max_K r_K⁺, arg-max k)` over a set of Kruzkov parameters.
pub fn max_positive_residual(
    before: &CellField,
    after: &CellField,
    dt: f64,
    flux: &FluxModel,
    config: &SchemeConfig,
    ks: &[f64],
) -> Result<(f64, f64), SchemeError> {
    check_pair(before, after)?;
    let states = face_states(before, flux, config);
    let mut worst = (0.0, ks.first().copied().unwrap_or(0.0));
    for &k in ks {
        let m = residuals_from_states(before, after, &states, dt, flux, config.flux_rule, k)?.into_iter().fold(0.0, f64::max);
        if m > worst.0 {
            worst = (m, k);
        }
    }
    Ok(worst)
}

/// 33 uniformly spaced values over `[lo, hi]` together with `extra` (the
/// Riemann states of a test problem, say), sorted without duplicates.
pub fn kruzkov_grid(lo: f64, hi: f64, extra: &[f64]) -> Vec<f64> {
    const POINTS: usize = 33;
    let mut ks: Vec<f64> = (0..POINTS).map(|i| lo + (hi - lo) * i as f64 / (POINTS - 1) as f64).collect();
    ks.extend_from_slice(extra);
    ks.sort_by(f64::total_cmp);
    ks.dedup();
    ks
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunEntropyReport {
    pub h: f64,
    pub steps: usize,
    /// Per step, `max_k max_K r_K⁺`.
    pub per_step_max: Vec<f64>,
    pub max: f64,
    /// Kruzkov parameter attaining `max`.
    pub worst_k: f64,
}

/// Run a scheme and audit every step against every `k` in `ks`.
pub fn audit_run(initial: &CellField, flux: &FluxModel, config: &SchemeConfig, t_final: f64, ks: &[f64]) -> Result<RunEntropyReport, SchemeError> {
    let mut per_step_max = Vec::new();
    let mut worst = (0.0, ks.first().copied().unwrap_or(0.0));
    let traj = run_with(initial, flux, config, t_final, &[], |s| {
        let (m, k) = max_positive_residual(s.before, s.after, s.dt, flux, config, ks)?;
        per_step_max.push(m);
        if m > worst.0 {
            worst = (m, k);
        }
        Ok(())
    })?;
    Ok(RunEntropyReport { h: initial.mesh().h(), steps: traj.steps, per_step_max, max: worst.0, worst_k: worst.1 })
}

/// How the Lax-Friedrichs speed bound is chosen while sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaPolicy {
    /// Per sample, over the hull of `a` and `b`.
    Local,
    /// One bound over the whole sampling range.
    Global,
}

impl From<LfDissipation> for LambdaPolicy {
    fn from(mode: LfDissipation) -> LambdaPolicy {
        match mode {
            LfDissipation::Local => LambdaPolicy::Local,
            LfDissipation::Global => LambdaPolicy::Global,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EFluxCounterexample {
    pub a: f64,
    pub b: f64,
    pub w: f64,
    pub n: Vec2,
    pub g: f64,
    /// `sgn(b - a)(g - f(w)·n)`.
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EFluxReport {
    pub rule: FluxRule,
    pub samples: usize,
    pub seed: u64,
    pub passed: bool,
    pub worst_violation: f64,
    /// The worst sample first, then up to nine more, in sampling order.
    pub counterexamples: Vec<EFluxCounterexample>,
}

pub const E_FLUX_TOLERANCE: f64 = 1e-12;

/// Brute-force check of `sgn(b - a)(g(a,b,n) - f(w)·n) ≤ 0` for `w` on a
/// dense grid between `a` and `b`, over `samples` random `(a, b, n)` with
/// states drawn from `range`.
pub fn check_e_flux(rule: FluxRule, flux: &FluxModel, policy: LambdaPolicy, samples: usize, range: (f64, f64), seed: u64) -> Result<EFluxReport, SchemeError> {
    if samples == 0 {
        return Err(SchemeError::Config("E-flux check needs at least one sample".into()));
    }
    const W_POINTS: usize = 256;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let global = flux.max_speed(range.0, range.1);
    let mut worst: Option<EFluxCounterexample> = None;
    let mut others = Vec::new();
    for _ in 0..samples {
        let a = rng.gen_range(range.0..=range.1);
        let b = rng.gen_range(range.0..=range.1);
        let n = if flux.dimension() == 1 {
            if rng.gen_bool(0.5) { [1.0, 0.0] } else { [-1.0, 0.0] }
        } else {
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            [t.cos(), t.sin()]
        };
        let lambda = match policy {
            LambdaPolicy::Local => flux.max_normal_speed(a, b, n),
            LambdaPolicy::Global => global,
        };
        let g = numerical_flux(rule, flux, a, b, n, lambda)?;
        let s = sgn(b - a);
        let (lo, hi) = (a.min(b), a.max(b));
        let mut local: Option<EFluxCounterexample> = None;
        for i in 0..=W_POINTS {
            let w = lo + (hi - lo) * i as f64 / W_POINTS as f64;
            let violation = s * (g - flux.normal_flux(w, n));
            if local.is_none_or(|c| violation > c.violation) {
                local = Some(EFluxCounterexample { a, b, w, n, g, violation });
            }
        }
        let c = local.expect("at least one w");
        if c.violation > E_FLUX_TOLERANCE {
            if others.len() < 9 {
                others.push(c);
            }
        }
        if worst.is_none_or(|w| c.violation > w.violation) {
            worst = Some(c);
        }
    }
    let worst = worst.expect("samples ≥ 1");
    let passed = worst.violation <= E_FLUX_TOLERANCE;
    let counterexamples = if passed {
        Vec::new()
    } else {
        std::iter::once(worst).chain(others.into_iter().filter(|c| *c != worst)).collect()
    };
    Ok(EFluxReport { rule, samples, seed, passed, worst_violation: worst.violation.max(0.0), counterexamples })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::mesh::{uniform_interval, Boundary};
    use crate::physics::{kruzkov_pair, ReferenceSolution};
    use crate::scheme::{max_stable_dt, step};

    const N: Vec2 = [1.0, 0.0];

    #[test]
    fn entropy_flux_examples() {
        let b = FluxModel::burgers();
        assert_eq!(numerical_entropy_flux(FluxRule::Godunov, &b, 0.0, 1.0, -1.0, N, 0.0).unwrap(), 0.0);
        assert_eq!(numerical_entropy_flux(FluxRule::LaxFriedrichs, &b, 0.0, 1.0, -1.0, N, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn entropy_flux_consistency() {
        for name in ["burgers", "buckley_leverett", "rotated_burgers_2d(2.0)"] {
            let f: FluxModel = name.parse().unwrap();
            let n = [0.8, -0.6];
            for k in [-0.7, 0.1, 0.5] {
                for c in [-1.0, 0.3, 0.9] {
                    let q = kruzkov_pair(f, k).q(c);
                    let expect = q[0] * n[0] + q[1] * n[1];
                    for rule in [FluxRule::Godunov, FluxRule::LaxFriedrichs, FluxRule::EngquistOsher] {
                        let g = numerical_entropy_flux(rule, &f, k, c, c, n, f.max_normal_speed(c, c, n)).unwrap();
                        assert!((g - expect).abs() < 1e-14, "{name} {rule} k={k} c={c}");
                    }
                }
            }
        }
    }

    #[test]
    fn constant_field_has_zero_residual() {
        let mesh = Arc::new(uniform_interval(0.0, 1.0, 10, Boundary::Periodic));
        let f = CellField::constant(mesh, 0.3);
        let b = FluxModel::burgers();
        let cfg = SchemeConfig::default();
        let dt = max_stable_dt(&f, &b, &cfg);
        let g = step(&f, &b, &cfg, dt).unwrap();
        for k in [-1.0, 0.3, 0.5] {
            assert!(entropy_residuals(&f, &g, dt, &b, &cfg, k).unwrap().residuals.iter().all(|r| r.abs() < 1e-15));
        }
    }

    #[test]
    fn godunov_shock_step_satisfies_entropy_inequality() {
        let b = FluxModel::burgers();
        let r = ReferenceSolution::new("riemann_shock", &b).unwrap();
        let f = CellField::from_reference(Arc::new(uniform_interval(-1.0, 1.0, 40, Boundary::Outflow)), &r, 0.0).unwrap();
        let cfg = SchemeConfig::default();
        let dt = max_stable_dt(&f, &b, &cfg);
        let g = step(&f, &b, &cfg, dt).unwrap();
        let ks = kruzkov_grid(0.0, 1.0, &[0.0, 1.0]);
        assert!(max_positive_residual(&f, &g, dt, &b, &cfg, &ks).unwrap().0 <= 1e-12);
    }

    #[test]
    fn e_flux_verdicts() {
        let b = FluxModel::burgers();
        for rule in [FluxRule::Godunov, FluxRule::LaxFriedrichs, FluxRule::EngquistOsher] {
            let r = check_e_flux(rule, &b, LambdaPolicy::Local, 500, (-2.0, 2.0), 7).unwrap();
            assert!(r.passed, "{rule}: {r:?}");
        }
        let r = check_e_flux(FluxRule::Central, &b, LambdaPolicy::Local, 500, (-2.0, 2.0), 7).unwrap();
        assert!(!r.passed && !r.counterexamples.is_empty());
        assert_eq!(r.counterexamples[0].violation, r.worst_violation);
    }

    #[test]
    fn central_flux_counterexample() {
        let b = FluxModel::burgers();
        let g = numerical_flux(FluxRule::Central, &b, -1.0, 1.0, N, 0.0).unwrap();
        assert_eq!(g, 0.5);
        assert!(sgn(2.0) * (g - b.normal_flux(0.0, N)) > 0.0);
    }

    #[test]
    fn grid_has_33_points_plus_extras() {
        let ks = kruzkov_grid(-1.0, 1.0, &[0.3, 1.0]);
        assert_eq!(ks.len(), 34);
        assert!(ks.windows(2).all(|w| w[0] < w[1]));
    }
}
