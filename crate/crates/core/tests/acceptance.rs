//! End-to-end acceptance run: every criterion is evaluated, one verdict line
//! is printed per criterion, and the test fails if any criterion fails.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;
use std::time::Instant;

use conlaw_core::entropy_audit::{audit_run, check_e_flux, kruzkov_grid, LambdaPolicy};
use conlaw_core::harness::{run_study, MeshSpec, StudyConfig};
use conlaw_core::kinetic::{defect_measure, nondegeneracy, VGrid};
use conlaw_core::mesh::{rectangle_triangles, uniform_interval, Boundary, Mesh};
use conlaw_core::physics::{FluxKind, FluxModel, ReferenceSolution};
use conlaw_core::scheme::{
    l1_contraction, max_stable_dt, run, run_with, step, CellField, FluxRule, LfDissipation, Monitor, ReconstructionMode, SchemeConfig, TimeIntegrator,
};
use conlaw_core::young::{build_young, dirac_trend, max_nonlinearity_gap, patches_for};
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;
const MONOTONE: [FluxRule; 3] = [FluxRule::Godunov, FluxRule::LaxFriedrichs, FluxRule::EngquistOsher];

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rotated_burgers() -> FluxModel {
    FluxModel::new(FluxKind::RotatedBurgers { angle: FRAC_PI_4 }).unwrap()
}

fn monotone_configs() -> Vec<SchemeConfig> {
    let mut out: Vec<SchemeConfig> = MONOTONE.iter().map(|&r| SchemeConfig::first_order(r)).collect();
    out.push(SchemeConfig { lf_dissipation: LfDissipation::Global, ..SchemeConfig::first_order(FluxRule::LaxFriedrichs) });
    out
}

fn all_configs() -> Vec<SchemeConfig> {
    let mut out = Vec::new();
    for &rule in FluxRule::ALL {
        for &reconstruction in ReconstructionMode::ALL {
            for &time_integrator in TimeIntegrator::ALL {
                for &lf_dissipation in LfDissipation::ALL {
                    if rule != FluxRule::LaxFriedrichs && lf_dissipation == LfDissipation::Global {
                        continue;
                    }
                    out.push(SchemeConfig { flux_rule: rule, reconstruction, time_integrator, cfl: 0.45, lf_dissipation });
                }
            }
        }
    }
    out
}

/// Burgers shock and rarefaction data in 1-D, and the rotated problems on a
/// triangulated square.
fn riemann_cases() -> Vec<(String, FluxModel, CellField)> {
    let mut out = Vec::new();
    let line = Arc::new(uniform_interval(-1.0, 1.0, 200, Boundary::Outflow));
    let square = Arc::new(rectangle_triangles([-1.0, 1.0], [-1.0, 1.0], 20, 20, Boundary::Outflow));
    for problem in ["riemann_shock", "riemann_rarefaction"] {
        for (mesh, flux, tag) in [(&line, FluxModel::burgers(), "1-D"), (&square, rotated_burgers(), "2-D")] {
            let r = ReferenceSolution::new(problem, &flux).unwrap();
            out.push((format!("{problem} {tag}"), flux, CellField::from_reference(mesh.clone(), &r, 0.0).unwrap()));
        }
    }
    out
}

fn periodic_sine_1d(n: usize) -> CellField {
    let mesh = Arc::new(uniform_interval(0.0, 1.0, n, Boundary::Periodic));
    CellField::from_fn(mesh, |x| (2.0 * PI * x[0]).sin() + 0.25).unwrap()
}

fn periodic_wave_2d(n: usize) -> CellField {
    let mesh = Arc::new(rectangle_triangles([0.0, 1.0], [0.0, 1.0], n, n, Boundary::Periodic));
    CellField::from_fn(mesh, |x| (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos() + 0.3).unwrap()
}

fn steps(u0: &CellField, flux: &FluxModel, config: &SchemeConfig, n: usize, mut each: impl FnMut(&CellField)) -> Result<(), String> {
    let mut u = u0.clone();
    for _ in 0..n {
        let dt = max_stable_dt(&u, flux, config);
        u = step(&u, flux, config, dt).map_err(|e| e.to_string())?;
        each(&u);
    }
    Ok(())
}

fn conservation() -> Verdict {
    let burgers = FluxModel::burgers();
    let mut worst: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    let mut runs = 0;
    for config in all_configs() {
        for (u0, flux) in [(periodic_sine_1d(200), burgers), (periodic_wave_2d(12), rotated_burgers())] {
            let scale = u0.l1_norm();
            let mass0 = u0.mass();
            let start = Instant::now();
            steps(&u0, &flux, &config, 200, |u| worst = worst.max((u.mass() - mass0).abs() / scale)).map_err(|e| format!("{config}: {e}"))?;
            if u0.is_one_dimensional() {
                slowest = slowest.max(start.elapsed().as_secs_f64());
            }
            runs += 1;
        }
    }
    check(worst <= TOL && slowest < 5.0, format!("{runs} runs x 200 steps, max relative drift {worst:.2e}, slowest 1-D run {slowest:.3}s"))
}

fn maximum_principle() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for (name, flux, u0) in riemann_cases() {
        for config in monotone_configs() {
            let mut m = Monitor::new(&u0);
            run_with(&u0, &flux, &config, 0.4, &[], |s| {
                m.observe(s.after);
                Ok(())
            })
            .map_err(|e| format!("{name}: {e}"))?;
            worst = worst.max(m.report().max_principle_violation);
            runs += 1;
        }
    }
    check(worst <= TOL, format!("{runs} runs (1-D and triangulated square), max bound violation {worst:.2e}"))
}

fn entropy_inequality() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut total_steps = 0;
    for (name, flux, u0) in riemann_cases() {
        let ks = kruzkov_grid(u0.min(), u0.max(), &[]);
        if ks.len() != 33 {
            return Err(format!("k-grid has {} values", ks.len()));
        }
        for rule in MONOTONE {
            let r = audit_run(&u0, &flux, &SchemeConfig::first_order(rule), 0.4, &ks).map_err(|e| format!("{name}: {e}"))?;
            worst = worst.max(r.max);
            total_steps += r.steps;
        }
    }
    check(worst <= TOL, format!("{total_steps} steps x 33 k, max positive residual {worst:.2e}"))
}

fn kuznetsov_rate() -> Verdict {
    let config = StudyConfig {
        problem: "riemann_shock".into(),
        flux: FluxModel::burgers(),
        scheme: SchemeConfig::first_order(FluxRule::Godunov),
        mesh: MeshSpec::Interval { x0: -1.0, x1: 1.0, n: 100, boundary: Boundary::Outflow },
        levels: 5,
        t_final: 0.4,
        min_rate: Some(0.45),
        ..StudyConfig::default()
    };
    let start = Instant::now();
    let report = run_study(&config).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let p = report.rate.ok_or("no rate")?;
    let hs: Vec<String> = report.levels.iter().map(|l| format!("1/{:.0}", 1.0 / l.h)).collect();
    check(p >= 0.45 && secs < 60.0 && report.passed, format!("h = {}, p = {p:.3}, {secs:.2}s", hs.join(",")))
}

fn l1_contraction_twins() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = f64::NEG_INFINITY;
    let mut runs = 0;
    for (u0, flux) in [(periodic_sine_1d(200), FluxModel::burgers()), (periodic_wave_2d(12), rotated_burgers())] {
        let bump = u0.with_values(u0.values().iter().map(|u| u + 0.2 * rng.gen_range(-1.0..1.0)).collect(), 0.0).unwrap();
        for config in monotone_configs() {
            let r = l1_contraction(&u0, &bump, &flux, &config, 0.4).map_err(|e| e.to_string())?;
            worst = worst.max(r.max_increase);
            runs += 1;
        }
    }
    check(worst <= TOL, format!("{runs} twin runs, max one-step distance increase {worst:.2e}"))
}

fn is_monotone_increasing(u: &[f64]) -> bool {
    u.windows(2).all(|w| w[1] >= w[0] - TOL)
}

fn tvd() -> Verdict {
    let b = FluxModel::burgers();
    let line = Arc::new(uniform_interval(-1.0, 1.0, 200, Boundary::Outflow));
    let mut data = vec![periodic_sine_1d(200)];
    for p in ["riemann_shock", "riemann_rarefaction"] {
        data.push(CellField::from_reference(line.clone(), &ReferenceSolution::new(p, &b).unwrap(), 0.0).unwrap());
    }
    let mut worst: f64 = 0.0;
    for u0 in &data {
        for config in monotone_configs() {
            let mut m = Monitor::new(u0);
            run_with(u0, &b, &config, 0.5, &[], |s| {
                m.observe(s.after);
                Ok(())
            })
            .map_err(|e| e.to_string())?;
            worst = worst.max(m.report().max_tv_increase);
        }
    }
    let rare = &data[2];
    let mut new_extrema = 0;
    for rule in MONOTONE {
        run_with(rare, &b, &SchemeConfig::second_order(rule), 0.5, &[], |s| {
            let u = s.after.values();
            if !is_monotone_increasing(u) || s.after.min() < rare.min() - TOL || s.after.max() > rare.max() + TOL {
                new_extrema += 1;
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    }
    check(worst <= TOL && new_extrema == 0, format!("max TV increase {worst:.2e}; limited_linear steps with new extrema: {new_extrema}"))
}

fn e_flux() -> Verdict {
    let models = [
        (FluxModel::burgers(), (-2.0, 2.0)),
        (FluxModel::new(FluxKind::BuckleyLeverett).unwrap(), (0.0, 1.0)),
        (FluxModel::new(FluxKind::LinearQuadratic).unwrap(), (-2.0, 2.0)),
    ];
    for (flux, range) in models {
        for rule in MONOTONE {
            for policy in [LambdaPolicy::Local, LambdaPolicy::Global] {
                let r = check_e_flux(rule, &flux, policy, 10_000, range, 99).map_err(|e| e.to_string())?;
                if !r.passed {
                    return Err(format!("{rule} on {flux} fails: {:?}", r.counterexamples.first()));
                }
            }
        }
    }
    let central = check_e_flux(FluxRule::Central, &FluxModel::burgers(), LambdaPolicy::Local, 10_000, (-2.0, 2.0), 99).map_err(|e| e.to_string())?;
    let Some(cx) = central.counterexamples.first() else {
        return Err("central flux passed the E-flux check".into());
    };
    check(
        !central.passed,
        format!("G/LF/EO pass 10^4 samples on 3 fluxes; central fails at a = {:.3}, b = {:.3}, w = {:.3} (violation {:.3e})", cx.a, cx.b, cx.w, cx.violation),
    )
}

fn kinetic_trend() -> Verdict {
    let b = FluxModel::burgers();
    let r = ReferenceSolution::new("riemann_rarefaction", &b).unwrap();
    let grid = VGrid::covering(-1.0, 1.0, 256).map_err(|e| e.to_string())?;
    let config = SchemeConfig::first_order(FluxRule::Godunov);
    let t_final = 0.5;
    let mut scores = Vec::new();
    let mut finest: Option<Arc<Mesh>> = None;
    for n in [50, 100, 200] {
        let mesh = Arc::new(uniform_interval(-1.0, 1.0, n, Boundary::Periodic));
        let u0 = CellField::from_reference(mesh.clone(), &r, 0.0).unwrap();
        let mut fields = vec![u0.clone()];
        run_with(&u0, &b, &config, t_final, &[], |s| {
            fields.push(s.after.clone());
            Ok(())
        })
        .map_err(|e| e.to_string())?;
        scores.push(defect_measure(&fields, &b, &grid, 8).map_err(|e| e.to_string())?.negativity_score);
        finest = Some(mesh);
    }
    // a stationary -1|1 jump is a weak solution that violates the entropy condition
    let mesh = finest.unwrap();
    let jump = CellField::from_fn(mesh.clone(), |x| if x[0] < 0.0 { -1.0 } else { 1.0 }).unwrap();
    let dt = config.cfl * mesh.h() / 2.0;
    let n_steps = (t_final / dt).ceil() as usize;
    let frozen: Vec<CellField> = (0..=n_steps).map(|i| jump.with_values(jump.values().to_vec(), (i as f64 * dt).min(t_final)).unwrap()).collect();
    let calibration = defect_measure(&frozen, &b, &grid, 8).map_err(|e| e.to_string())?.negativity_score;
    let decreasing = scores.windows(2).all(|w| w[1] < w[0]);
    let finest_score = *scores.last().unwrap();
    check(
        decreasing && calibration >= 10.0 * finest_score,
        format!("scores {:.4e} / {:.4e} / {:.4e}; expansion shock {calibration:.4e} ({:.0}x finest)", scores[0], scores[1], scores[2], calibration / finest_score),
    )
}

fn nondegeneracy_detector() -> Verdict {
    let tol = 1e-3;
    let span = 2.0;
    let burgers = nondegeneracy(&FluxModel::burgers(), (-1.0, 1.0), 500, tol, 5).map_err(|e| e.to_string())?;
    let linear = nondegeneracy(&FluxModel::linear_advection([1.0, 0.0]), (-1.0, 1.0), 500, tol, 5).map_err(|e| e.to_string())?;
    check(
        burgers.measure <= 5.0 * tol / span && linear.measure >= 0.99,
        format!("burgers {:.3e} (bound {:.1e}), linear advection {:.4}", burgers.measure, 5.0 * tol / span, linear.measure),
    )
}

fn checkerboard(n: usize) -> CellField {
    let mesh = Arc::new(uniform_interval(0.0, 1.0, n, Boundary::Periodic));
    let v = (0..n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
    CellField::new(mesh, v, 0.0).unwrap()
}

fn young_dichotomy() -> Verdict {
    let b = FluxModel::burgers();
    let r = ReferenceSolution::new("riemann_rarefaction", &b).unwrap();
    let cells_per_patch = 8;
    let patches = |f: &CellField| patches_for(f.mesh(), cells_per_patch);
    let mut godunov = Vec::new();
    let mut frozen = Vec::new();
    let linear = FluxModel::linear_advection([1.0, 0.0]);
    let central = SchemeConfig::first_order(FluxRule::Central);
    for n in [64, 128, 256, 512] {
        let mesh = Arc::new(uniform_interval(-1.0, 1.0, n, Boundary::Outflow));
        let u0 = CellField::from_reference(mesh, &r, 0.0).unwrap();
        godunov.push(run(&u0, &b, &SchemeConfig::first_order(FluxRule::Godunov), 0.4, &[]).map_err(|e| e.to_string())?.last().clone());
        frozen.push(run(&checkerboard(n), &linear, &central, 0.4, &[]).map_err(|e| e.to_string())?.last().clone());
    }
    let g = dirac_trend(&godunov, patches, 64).map_err(|e| e.to_string())?;
    let c = dirac_trend(&frozen, patches, 64).map_err(|e| e.to_string())?;
    let gv: Vec<f64> = g.iter().map(|l| l.max_variance).collect();
    let cv: Vec<f64> = c.iter().map(|l| l.max_variance).collect();
    let gap = max_nonlinearity_gap(&build_young(&checkerboard(64), 8, 64).map_err(|e| e.to_string())?, &b);
    let ok = gv.windows(2).all(|w| w[1] < w[0]) && cv.iter().all(|&v| v >= 0.9) && (gap - 0.5).abs() <= 1.0 / 64.0;
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(" > ");
    check(ok, format!("godunov variance {}; checkerboard min variance {:.3}; gap {gap:.4}", fmt(&gv), cv.iter().copied().fold(f64::INFINITY, f64::min)))
}

fn property_suites() -> Verdict {
    let mut report = Vec::new();
    let meshes = common::sample_meshes();
    let mut run = |name: &str, cases: u32, f: &mut dyn FnMut(&mut TestRunner) -> Result<(), String>| -> Result<(), String> {
        let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
        f(&mut runner).map_err(|e| format!("{name}: {e}"))?;
        report.push(format!("{name} {cases}"));
        Ok(())
    };
    run("flux conservativity", 10_000, &mut |r| r.run(&common::flux_case(), |c| common::check_flux_conservativity(&c)).map_err(|e| e.to_string()))?;
    run("limiter bounds", 2_000, &mut |r| r.run(&common::limiter_case(), |c| common::check_limiter(&meshes, &c)).map_err(|e| e.to_string()))?;
    run("chi identities", 5_000, &mut |r| r.run(&common::chi_case(), |c| common::check_chi(&c)).map_err(|e| e.to_string()))?;
    run("mesh closure", 1_000, &mut |r| r.run(&common::mesh_case(), |c| common::check_mesh_closure(&c)).map_err(|e| e.to_string()))?;
    Ok(report.join(", ") + " cases")
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("conservation", conservation),
        ("discrete maximum principle", maximum_principle),
        ("entropy inequality with C = 0", entropy_inequality),
        ("Kuznetsov rate", kuznetsov_rate),
        ("L1 contraction", l1_contraction_twins),
        ("TVD in 1-D", tvd),
        ("E-flux verification", e_flux),
        ("kinetic defect trend", kinetic_trend),
        ("nondegeneracy detector", nondegeneracy_detector),
        ("Young measure dichotomy", young_dichotomy),
        ("property suites", property_suites),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = f();
        let secs = start.elapsed().as_secs_f64();
        match &verdict {
            Ok(d) => println!("[PASS] {:>2} {name}: {d} [{secs:.2}s]", i + 1),
            Err(d) => {
                println!("[FAIL] {:>2} {name}: {d} [{secs:.2}s]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
