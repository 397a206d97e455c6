//! `conlaw`: command line front end for studies and audits.
//!
//! Every subcommand reads an optional `key = value` config file, then applies
//! `--set key=value` overrides in order. Relative output directories are
//! resolved against `$CONLAW_OUTPUT_ROOT` (or the working directory).
//! Exit status: 0 when every enabled audit passes, 1 when one fails, 2 on
//! errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use conlaw_core::entropy_audit::{audit_run, kruzkov_grid};
use conlaw_core::harness::{fit_rate, l1_error, read_field_dump, run_study, write_field_dump, write_vtk, StudyConfig};
use conlaw_core::kinetic::{defect_measure, nondegeneracy, VGrid};
use conlaw_core::mesh::{regularity, Mesh};
use conlaw_core::scheme::{run_with, CellField, Monitor};

const OUTPUT_ROOT_VAR: &str = "CONLAW_OUTPUT_ROOT";
const TOL: f64 = 1e-12;

#[derive(Parser)]
#[command(name = "conlaw", version, about = "Finite volume solver and verification suite for scalar conservation laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single run on the base mesh with field dumps at output times.
    Run {
        #[command(flatten)]
        common: Common,
        /// Comma separated output times.
        #[arg(long, value_delimiter = ',')]
        output_times: Vec<f64>,
    },
    /// Convergence study over all refinement levels with every enabled audit.
    Converge {
        #[command(flatten)]
        common: Common,
    },
    /// Per-step maximum positive entropy residual on every level.
    EntropyAudit {
        #[command(flatten)]
        common: Common,
    },
    /// Kinetic defect measure per level, or for a sequence of field dumps.
    KineticAudit {
        #[command(flatten)]
        common: Common,
        /// Field dumps of one trajectory on the base mesh, in time order.
        #[arg(long, num_args = 1..)]
        dumps: Vec<PathBuf>,
        /// Tolerance of the nondegeneracy measure.
        #[arg(long, default_value_t = 1e-2)]
        degeneracy_tol: f64,
    },
    /// Empirical Young measure diagnostics per level.
    YoungAudit {
        #[command(flatten)]
        common: Common,
    },
    /// Cell and face counts, h and shape regularity of a mesh.
    MeshInfo {
        #[command(flatten)]
        common: Common,
        /// Uniform refinements applied before reporting.
        #[arg(long, default_value_t = 0)]
        refine: usize,
    },
}

#[derive(Args)]
struct Common {
    /// `key = value` configuration file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override a configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    mesh: Option<String>,
    #[arg(long)]
    flux: Option<String>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    levels: Option<usize>,
    /// Output directory, relative to the output root.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write VTK files.
    #[arg(long)]
    vtk: bool,
}

impl Common {
    fn load(&self, default_dir: &str) -> Result<StudyConfig> {
        let mut c = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                StudyConfig::from_text(&text).with_context(|| p.display().to_string())?
            }
            None => StudyConfig::default(),
        };
        let flags = [("mesh", self.mesh.clone()), ("flux", self.flux.clone()), ("problem", self.problem.clone())];
        for (k, v) in flags {
            if let Some(v) = v {
                c.set(k, &v)?;
            }
        }
        if let Some(t) = self.t_final {
            c.t_final = t;
        }
        if let Some(l) = self.levels {
            c.levels = l;
        }
        for o in &self.overrides {
            let Some((k, v)) = o.split_once('=') else { bail!("--set expects KEY=VALUE, got '{o}'") };
            c.set(k.trim(), v.trim())?;
        }
        if let Some(o) = &self.output {
            c.output_dir = Some(o.clone());
        }
        c.write_vtk |= self.vtk;
        let dir = c.output_dir.clone().unwrap_or_else(|| PathBuf::from(default_dir));
        c.output_dir = Some(resolve(&dir));
        Ok(c)
    }
}

fn resolve(dir: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_VAR) {
        Some(root) if dir.is_relative() => PathBuf::from(root).join(dir),
        _ => dir.to_path_buf(),
    }
}

fn save(path: &Path, text: &str) -> Result<()> {
    if let Some(d) = path.parent() {
        fs::create_dir_all(d).with_context(|| d.display().to_string())?;
    }
    fs::write(path, text).with_context(|| path.display().to_string())
}

fn level_meshes(config: &StudyConfig) -> Result<Vec<Arc<Mesh>>> {
    let base = config.mesh.build()?;
    let mut out = vec![Arc::new(base.clone())];
    for l in 1..config.levels {
        out.push(Arc::new(base.refine(l)?));
    }
    Ok(out)
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{v:e}"))
}

fn cmd_run(common: &Common, output_times: &[f64]) -> Result<bool> {
    let config = common.load("run")?;
    config.scheme.validate()?;
    let dir = config.output_dir.clone().unwrap();
    let reference = config.reference()?;
    let mesh = Arc::new(config.mesh.build()?);
    let u0 = CellField::from_reference(mesh, &reference, 0.0)?;
    let mut monitor = Monitor::new(&u0);
    let traj = run_with(&u0, &config.flux, &config.scheme, config.t_final, output_times, |s| {
        monitor.observe(s.after);
        Ok(())
    })?;
    let mut summary = String::from("record,t,min,max,mass\n");
    for (i, f) in traj.records.iter().enumerate() {
        writeln!(summary, "{i},{:e},{:e},{:e},{:e}", f.time(), f.min(), f.max(), f.mass())?;
        write_field_dump(&dir.join(format!("field_{i}.dat")), f)?;
        if config.write_vtk {
            write_vtk(&dir.join(format!("field_{i}.vtk")), f)?;
        }
    }
    let m = monitor.report();
    let error = reference.check_time(config.t_final).ok().map(|_| l1_error(traj.last(), &reference, config.t_final)).transpose()?;
    writeln!(summary, "# steps = {}", traj.steps)?;
    writeln!(summary, "# l1_error = {}", opt(error))?;
    writeln!(summary, "# max_principle_violation = {:e}", m.max_principle_violation.max(0.0))?;
    writeln!(summary, "# mixed_order = {}", config.scheme.is_mixed_order())?;
    save(&dir.join("summary.csv"), &summary)?;
    print!("{summary}");
    let checked = config.audits.max_principle && config.scheme.is_monotone();
    Ok(!checked || m.max_principle_violation <= TOL)
}

fn cmd_converge(common: &Common) -> Result<bool> {
    let config = common.load("converge")?;
    let dir = config.output_dir.clone().unwrap();
    let report = run_study(&config)?;
    print!("{}", fs::read_to_string(dir.join("report.csv"))?);
    Ok(report.passed)
}

fn cmd_entropy(common: &Common) -> Result<bool> {
    let config = common.load("entropy-audit")?;
    config.validate()?;
    let dir = config.output_dir.clone().unwrap();
    let reference = config.reference()?;
    let extra = reference.riemann_states().map_or(vec![], |(l, r)| vec![l, r]);
    let mut steps = String::from("level,h,step,max_positive_residual\n");
    let mut summary = String::from("level,h,steps,max_positive_residual,worst_k\n");
    let mut pairs = Vec::new();
    let mut worst: f64 = 0.0;
    for (level, mesh) in level_meshes(&config)?.into_iter().enumerate() {
        let u0 = CellField::from_reference(mesh, &reference, 0.0)?;
        let ks = kruzkov_grid(u0.min(), u0.max(), &extra);
        let r = audit_run(&u0, &config.flux, &config.scheme, config.t_final, &ks)?;
        for (n, m) in r.per_step_max.iter().enumerate() {
            writeln!(steps, "{level},{:e},{n},{m:e}", r.h)?;
        }
        writeln!(summary, "{level},{:e},{},{:e},{:e}", r.h, r.steps, r.max, r.worst_k)?;
        pairs.push((r.h, r.max));
        worst = worst.max(r.max);
    }
    writeln!(summary, "# h_exponent = {}", opt(fit_rate(&pairs).ok()))?;
    save(&dir.join("entropy_steps.csv"), &steps)?;
    save(&dir.join("entropy.csv"), &summary)?;
    print!("{summary}");
    Ok(!config.scheme.is_monotone() || worst <= TOL)
}

fn cmd_kinetic(common: &Common, dumps: &[PathBuf], tol: f64) -> Result<bool> {
    let mut config = common.load("kinetic-audit")?;
    let dir = config.output_dir.clone().unwrap();
    let mut out = String::from("level,h,negativity_score,total_mass,degeneracy\n");
    let passed;
    if dumps.is_empty() {
        config.audits.kinetic = true;
        config.audits.young = false;
        config.write_fields = false;
        let report = run_study(&config)?;
        let reference = config.reference()?;
        let u0 = CellField::from_reference(Arc::new(config.mesh.build()?), &reference, 0.0)?;
        let degeneracy = nondegeneracy(&config.flux, (u0.min(), u0.max()), 100, tol, config.seed)?.measure;
        for l in &report.levels {
            writeln!(out, "{},{:e},{},{},{degeneracy:e}", l.level, l.h, opt(l.kinetic_negativity), opt(l.kinetic_mass))?;
        }
        passed = report.kinetic_trend != Some(false);
    } else {
        let mesh = Arc::new(config.mesh.build()?);
        let fields = dumps.iter().map(|p| read_field_dump(p, mesh.clone())).collect::<Result<Vec<_>, _>>()?;
        let lo = fields.iter().map(CellField::min).fold(f64::INFINITY, f64::min);
        let hi = fields.iter().map(CellField::max).fold(f64::NEG_INFINITY, f64::max);
        let grid = VGrid::covering(lo, hi, config.kinetic_bins)?;
        let d = defect_measure(&fields, &config.flux, &grid, config.kinetic_patches)?;
        let degeneracy = nondegeneracy(&config.flux, (lo, hi), 100, tol, config.seed)?.measure;
        writeln!(out, "0,{:e},{:e},{:e},{degeneracy:e}", mesh.h(), d.negativity_score, d.total_mass)?;
        passed = true;
    }
    save(&dir.join("kinetic.csv"), &out)?;
    print!("{out}");
    Ok(passed)
}

fn cmd_young(common: &Common) -> Result<bool> {
    let mut config = common.load("young-audit")?;
    let dir = config.output_dir.clone().unwrap();
    config.audits.young = true;
    config.audits.kinetic = false;
    config.write_fields = false;
    let report = run_study(&config)?;
    let mut out = String::from("level,h,max_variance,max_nonlinearity_gap,initial_consistency\n");
    for l in &report.levels {
        writeln!(out, "{},{:e},{},{},{}", l.level, l.h, opt(l.young_max_variance), opt(l.young_max_gap), opt(l.initial_consistency))?;
    }
    save(&dir.join("young.csv"), &out)?;
    print!("{out}");
    Ok(true)
}

fn cmd_mesh_info(common: &Common, refine: usize) -> Result<bool> {
    let config = common.load("mesh-info")?;
    let mut mesh = config.mesh.build()?;
    if refine > 0 {
        mesh = mesh.refine(refine)?;
    }
    let r = regularity(&mesh)?;
    let mut out = String::from("cells,faces,vertices,h,max_regularity_ratio\n");
    writeln!(out, "{},{},{},{:e},{:e}", mesh.num_cells(), mesh.num_faces(), mesh.vertices().len(), mesh.h(), r.max_ratio)?;
    out.push_str("ratio_lower,ratio_upper,count\n");
    for (lo, hi, n) in &r.histogram {
        writeln!(out, "{lo:e},{hi:e},{n}")?;
    }
    print!("{out}");
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { common, output_times } => cmd_run(common, output_times),
        Command::Converge { common } => cmd_converge(common),
        Command::EntropyAudit { common } => cmd_entropy(common),
        Command::KineticAudit { common, dumps, degeneracy_tol } => cmd_kinetic(common, dumps, *degeneracy_tol),
        Command::YoungAudit { common } => cmd_young(common),
        Command::MeshInfo { common, refine } => cmd_mesh_info(common, *refine),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("conlaw: audit failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("conlaw: {e:#}");
            ExitCode::from(2)
        }
    }
}
