use crate::physics::FluxModel;

use super::{max_stable_dt, step, CellField, SchemeConfig, SchemeError};

/// Step-by-step tracker of the maximum principle, total variation and mass
/// drift relative to an initial field.
#[derive(Debug, Clone)]
pub struct Monitor {
    lower: f64,
    upper: f64,
    mass0: f64,
    scale: f64,
    prev_tv: f64,
    report: MonitorReport,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MonitorReport {
    pub steps: usize,
    /// Largest excursion outside `[min u⁰, max u⁰]`.
    pub max_principle_violation: f64,
    /// Largest one-step increase of the total variation.
    pub max_tv_increase: f64,
    /// Largest `|Σ|K|uⁿ - Σ|K|u⁰|`.
    pub max_mass_drift: f64,
    /// `max_mass_drift / Σ|K||u⁰|` (absolute drift if the initial field vanishes).
    pub relative_mass_drift: f64,
}

impl Monitor {
    pub fn new(initial: &CellField) -> Monitor {
        let l1 = initial.l1_norm();
        Monitor {
            lower: initial.min(),
            upper: initial.max(),
            mass0: initial.mass(),
            scale: if l1 > 0.0 { l1 } else { 1.0 },
            prev_tv: initial.total_variation(),
            report: MonitorReport::default(),
        }
    }

    pub fn observe(&mut self, field: &CellField) {
        let r = &mut self.report;
        r.steps += 1;
        r.max_principle_violation = r.max_principle_violation.max(self.lower - field.min()).max(field.max() - self.upper);
        let tv = field.total_variation();
        r.max_tv_increase = r.max_tv_increase.max(tv - self.prev_tv);
        self.prev_tv = tv;
        r.max_mass_drift = r.max_mass_drift.max((field.mass() - self.mass0).abs());
        r.relative_mass_drift = r.max_mass_drift / self.scale;
    }

    pub fn report(&self) -> &MonitorReport {
        &self.report
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    /// `Σ|K||uⁿ - vⁿ|` for n = 0, 1, ...
    pub distances: Vec<f64>,
    /// Largest one-step increase of the distance (≤ 0 for a contraction).
    pub max_increase: f64,
}

/// Advance two fields side by side with a shared time step and record their
/// L1 distance after every step.
pub fn l1_contraction(u0: &CellField, v0: &CellField, flux: &FluxModel, config: &SchemeConfig, t_final: f64) -> Result<ContractionReport, SchemeError> {
    if !u0.same_mesh(v0) {
        return Err(SchemeError::MeshMismatch);
    }
    let (mut u, mut v) = (u0.clone(), v0.clone());
    let mut distances = vec![u.l1_distance(&v)?];
    let mut max_increase = f64::NEG_INFINITY;
    while u.time() < t_final {
        let dt = max_stable_dt(&u, flux, config).min(max_stable_dt(&v, flux, config)).min(t_final - u.time());
        u = step(&u, flux, config, dt)?;
        v = step(&v, flux, config, dt)?;
        let d = u.l1_distance(&v)?;
        max_increase = max_increase.max(d - distances.last().unwrap());
        distances.push(d);
    }
    Ok(ContractionReport { distances, max_increase: if max_increase.is_finite() { max_increase } else { 0.0 } })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::mesh::{uniform_interval, Boundary};
    use crate::scheme::{run_with, FluxRule};

    #[test]
    fn monitor_tracks_shock_run() {
        let mesh = Arc::new(uniform_interval(-1.0, 1.0, 80, Boundary::Outflow));
        let u0 = CellField::from_fn(mesh, |x| if x[0] < 0.0 { 1.0 } else { 0.0 }).unwrap();
        let b = FluxModel::burgers();
        for rule in [FluxRule::Godunov, FluxRule::LaxFriedrichs, FluxRule::EngquistOsher] {
            let mut m = Monitor::new(&u0);
            run_with(&u0, &b, &SchemeConfig::first_order(rule), 0.4, &[], |s| {
                m.observe(s.after);
                Ok(())
            })
            .unwrap();
            let r = m.report();
            assert!(r.steps > 10);
            assert!(r.max_principle_violation <= 1e-12 && r.max_tv_increase <= 1e-12, "{rule}: {r:?}");
        }
    }

    #[test]
    fn twin_runs_contract() {
        let mesh = Arc::new(uniform_interval(0.0, 1.0, 64, Boundary::Periodic));
        let u0 = CellField::from_fn(mesh.clone(), |x| (2.0 * std::f64::consts::PI * x[0]).sin()).unwrap();
        let v0 = CellField::from_fn(mesh, |x| (2.0 * std::f64::consts::PI * x[0]).sin() + 0.2 * (x[0] > 0.3 && x[0] < 0.6) as i32 as f64).unwrap();
        let r = l1_contraction(&u0, &v0, &FluxModel::burgers(), &SchemeConfig::default(), 0.5).unwrap();
        assert!(r.distances.len() > 10);
        assert!(r.max_increase <= 1e-12, "{}", r.max_increase);
    }
}
