use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entropy_audit::{kruzkov_grid, max_positive_residual};
use crate::kinetic::{DefectAccumulator, VGrid};
use crate::mesh::{Dimension, Mesh};
use crate::scheme::{l1_contraction, run_with, CellField, Monitor};
use crate::young::{build_young, initial_consistency, max_nonlinearity_gap, patches_for};

use super::io::{write_field_dump, write_file, write_vtk, REPORT_COLUMNS};
use super::{fit_rate, l1_error, HarnessError, StudyConfig};

const TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub level: usize,
    pub h: f64,
    pub cells: usize,
    pub steps: usize,
    pub l1_error: f64,
    pub max_principle_violation: Option<f64>,
    pub tv_max_increase: Option<f64>,
    pub contraction_max_increase: Option<f64>,
    pub entropy_max_residual: Option<f64>,
    /// Relative mass drift `max_n |Σ|K|uⁿ - Σ|K|u⁰| / Σ|K||u⁰|`.
    pub mass_drift: f64,
    pub kinetic_negativity: Option<f64>,
    pub kinetic_mass: Option<f64>,
    pub young_max_variance: Option<f64>,
    pub young_max_gap: Option<f64>,
    pub initial_consistency: Option<f64>,
    pub passed: bool,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub levels: Vec<LevelReport>,
    /// Fitted L1 rate over all levels, if every error is positive.
    pub rate: Option<f64>,
    /// Negativity score strictly decreasing over the levels.
    pub kinetic_trend: Option<bool>,
    /// Maximum patch variance strictly decreasing over the levels.
    pub young_trend: Option<bool>,
    pub seed: u64,
    pub mixed_order: bool,
    pub passed: bool,
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn level_mesh(base: &Mesh, level: usize) -> Result<Mesh, HarnessError> {
    Ok(if level == 0 { base.clone() } else { base.refine(level)? })
}

fn run_level(config: &StudyConfig, base: &Mesh, level: usize, kinetic_grid: Option<VGrid>) -> Result<(LevelReport, CellField), HarnessError> {
    let start = Instant::now();
    let reference = config.reference()?;
    let mesh = Arc::new(level_mesh(base, level)?);
    let u0 = CellField::from_reference(mesh.clone(), &reference, 0.0)?;
    let scheme = &config.scheme;
    let flux = &config.flux;
    let monotone = scheme.is_monotone();
    let audits = config.audits;

    let ks = kruzkov_grid(u0.min(), u0.max(), &reference.riemann_states().map_or(vec![], |(l, r)| vec![l, r]));
    let mut monitor = Monitor::new(&u0);
    let mut entropy_max: f64 = 0.0;
    let mut kinetic = match kinetic_grid {
        Some(g) => Some(DefectAccumulator::new(&mesh, *flux, g, config.kinetic_patches)?),
        None => None,
    };
    // the early window shrinks with h so the score isolates initialization
    let early = mesh.h().min(config.t_final);
    let outputs: Vec<f64> = if audits.young { [0.5 * early, early].into_iter().filter(|&t| t < config.t_final).collect() } else { vec![] };
    let traj = run_with(&u0, flux, scheme, config.t_final, &outputs, |s| {
        monitor.observe(s.after);
        if audits.entropy {
            entropy_max = entropy_max.max(max_positive_residual(s.before, s.after, s.dt, flux, scheme, &ks)?.0);
        }
        if let Some(acc) = kinetic.as_mut() {
            acc.add_step(s.before, s.after).map_err(|e| crate::scheme::SchemeError::Config(e.to_string()))?;
        }
        Ok(())
    })?;
    let last = traj.last().clone();
    let err = l1_error(&last, &reference, config.t_final)?;
    let m = monitor.report().clone();

    let contraction = if audits.contraction {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(level as u64));
        let v0 = u0.with_values(u0.values().iter().map(|u| u + config.contraction_amplitude * rng.gen_range(-1.0..=1.0)).collect(), 0.0)?;
        Some(l1_contraction(&u0, &v0, flux, scheme, config.t_final)?.max_increase)
    } else {
        None
    };
    let (young_var, young_gap, consistency) = if audits.young {
        let ym = build_young(&last, patches_for(&mesh, config.young_cells_per_patch), config.young_bins)?;
        let u0_fn = |x: [f64; 2]| reference.initial(x);
        let c = initial_consistency(&traj.records, &u0_fn, early)?;
        (Some(ym.max_variance()), Some(max_nonlinearity_gap(&ym, flux)), Some(c))
    } else {
        (None, None, None)
    };
    let defect = kinetic.map(|k| k.finish());

    let one_d = mesh.dimension() == Dimension::One;
    let mut passed = true;
    if audits.max_principle {
        passed &= m.max_principle_violation <= TOL;
    }
    if audits.tv && one_d && monotone {
        passed &= m.max_tv_increase <= TOL;
    }
    // extrapolated boundary states feed inflow differences into the domain
    if let (Some(c), true) = (contraction, monotone && mesh.is_periodic()) {
        passed &= c <= TOL;
    }
    if audits.entropy && monotone {
        passed &= entropy_max <= TOL;
    }
    if mesh.is_periodic() {
        passed &= m.relative_mass_drift <= TOL;
    }
    let report = LevelReport {
        level,
        h: mesh.h(),
        cells: mesh.num_cells(),
        steps: traj.steps,
        l1_error: err,
        max_principle_violation: audits.max_principle.then_some(m.max_principle_violation.max(0.0)),
        tv_max_increase: (audits.tv && one_d).then_some(m.max_tv_increase.max(0.0)),
        contraction_max_increase: contraction,
        entropy_max_residual: audits.entropy.then_some(entropy_max),
        mass_drift: m.relative_mass_drift,
        kinetic_negativity: defect.as_ref().map(|d| d.negativity_score),
        kinetic_mass: defect.as_ref().map(|d| d.total_mass),
        young_max_variance: young_var,
        young_max_gap: young_gap,
        initial_consistency: consistency,
        passed,
        runtime_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((report, last))
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{v:e}"))
}

fn row(r: &LevelReport) -> String {
    [
        r.level.to_string(),
        format!("{:e}", r.h),
        r.cells.to_string(),
        r.steps.to_string(),
        format!("{:e}", r.l1_error),
        opt(r.max_principle_violation),
        opt(r.tv_max_increase),
        opt(r.contraction_max_increase),
        opt(r.entropy_max_residual),
        format!("{:e}", r.mass_drift),
        opt(r.kinetic_negativity),
        opt(r.kinetic_mass),
        opt(r.young_max_variance),
        opt(r.young_max_gap),
        opt(r.initial_consistency),
        if r.passed { "ok" } else { "fail" }.to_string(),
    ]
    .join(",")
}

fn header(config: &StudyConfig) -> String {
    let mut s = String::from("# conlaw convergence report\n");
    writeln!(s, "# problem = {}", config.problem).unwrap();
    writeln!(s, "# flux = {}", config.flux).unwrap();
    writeln!(s, "# scheme = {}", config.scheme).unwrap();
    writeln!(s, "# mixed_order = {}", config.scheme.is_mixed_order()).unwrap();
    writeln!(s, "# mesh = {}", config.mesh).unwrap();
    writeln!(s, "# t_final = {}", config.t_final).unwrap();
    writeln!(s, "# seed = {}", config.seed).unwrap();
    s.push_str(&REPORT_COLUMNS.join(","));
    s.push('\n');
    s
}

fn write_partial(dir: &Path, config: &StudyConfig, rows: &[LevelReport], error: &HarnessError) {
    let mut s = header(config);
    for r in rows {
        s.push_str(&row(r));
        s.push('\n');
    }
    let message = error.to_string().replace([',', '\n'], ";");
    let mut failed = vec![String::new(); REPORT_COLUMNS.len()];
    failed[0] = "FAILED".into();
    failed[REPORT_COLUMNS.len() - 1] = message;
    s.push_str(&failed.join(","));
    s.push('\n');
    // best effort: the original error is what the caller sees
    let _ = write_file(&dir.join("report.csv"), &s);
}

/// Run every level of a study with its enabled audits; with an output
/// directory, write `report.csv`, `rate.dat`, `runtime.csv` and per-level
/// field dumps. On failure the completed rows are flushed followed by a
/// `FAILED` row.
pub fn run_study(config: &StudyConfig) -> Result<ConvergenceReport, HarnessError> {
    let dir = config.output_dir.as_deref();
    let mut rows = Vec::new();
    match run_levels(config, &mut rows) {
        Ok(()) => {}
        Err(e) => {
            if let Some(dir) = dir {
                write_partial(dir, config, &rows, &e);
            }
            return Err(e);
        }
    }
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.h, r.l1_error)).collect();
    let rate = fit_rate(&pairs).ok();
    let kinetic_trend = config.audits.kinetic.then(|| strictly_decreasing(&rows.iter().map(|r| r.kinetic_negativity.unwrap()).collect::<Vec<_>>()));
    let young_trend = (config.audits.young && config.levels >= 3)
        .then(|| strictly_decreasing(&rows.iter().map(|r| r.young_max_variance.unwrap()).collect::<Vec<_>>()));
    let rate_ok = match config.min_rate {
        Some(min) => rate.is_some_and(|p| p >= min),
        None => true,
    };
    let passed = rows.iter().all(|r| r.passed) && kinetic_trend != Some(false) && young_trend != Some(false) && rate_ok;
    let report = ConvergenceReport {
        levels: rows,
        rate,
        kinetic_trend,
        young_trend,
        seed: config.seed,
        mixed_order: config.scheme.is_mixed_order(),
        passed,
    };
    if let Some(dir) = dir {
        write_report(dir, config, &report)?;
    }
    Ok(report)
}

fn run_levels(config: &StudyConfig, rows: &mut Vec<LevelReport>) -> Result<(), HarnessError> {
    config.validate()?;
    let base = config.mesh.build()?;
    if config.audits.kinetic && !base.is_periodic() {
        return Err(HarnessError::Config("the kinetic audit needs a periodic mesh".into()));
    }
    let kinetic_grid = if config.audits.kinetic {
        let u0 = CellField::from_reference(Arc::new(base.clone()), &config.reference()?, 0.0)?;
        Some(VGrid::covering(u0.min(), u0.max(), config.kinetic_bins)?)
    } else {
        None
    };
    for level in 0..config.levels {
        let (r, last) = run_level(config, &base, level, kinetic_grid)?;
        if let Some(dir) = config.output_dir.as_deref() {
            if config.write_fields {
                write_field_dump(&dir.join(format!("level_{level}.dat")), &last)?;
            }
            if config.write_vtk {
                write_vtk(&dir.join(format!("level_{level}.vtk")), &last)?;
            }
        }
        rows.push(r);
    }
    Ok(())
}

fn write_report(dir: &Path, config: &StudyConfig, report: &ConvergenceReport) -> Result<(), HarnessError> {
    let mut csv = header(config);
    for r in &report.levels {
        csv.push_str(&row(r));
        csv.push('\n');
    }
    writeln!(csv, "# rate = {}", opt(report.rate)).unwrap();
    let trend = |t: Option<bool>| t.map_or("", |b| if b { "pass" } else { "fail" });
    writeln!(csv, "# kinetic_trend = {}", trend(report.kinetic_trend)).unwrap();
    writeln!(csv, "# young_trend = {}", trend(report.young_trend)).unwrap();
    writeln!(csv, "# status = {}", if report.passed { "pass" } else { "fail" }).unwrap();
    write_file(&dir.join("report.csv"), &csv)?;

    let mut dat = format!("# h l1_error (fitted rate {})\n", opt(report.rate));
    for r in &report.levels {
        writeln!(dat, "{:e} {:e}", r.h, r.l1_error).unwrap();
    }
    write_file(&dir.join("rate.dat"), &dat)?;

    let mut rt = String::from("level,seconds\n");
    for r in &report.levels {
        writeln!(rt, "{},{:.6}", r.level, r.runtime_seconds).unwrap();
    }
    write_file(&dir.join("runtime.csv"), &rt)
}
