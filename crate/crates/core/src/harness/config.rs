use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::mesh::{rectangle_triangles, sliver_triangle, uniform_interval, Boundary, Mesh};
use crate::physics::{FluxModel, ReferenceSolution};
use crate::scheme::SchemeConfig;

use super::HarnessError;

/// Base mesh of a study: a generator or a mesh file.
///
/// Generator strings are `interval:x0:x1:n:bc`, `square:n:bc`,
/// `rect:x0:x1:y0:y1:nx:ny:bc` and `sliver:eps`, with `bc` one of `periodic`
/// or `outflow`. Anything else is read as a path.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshSpec {
    Interval { x0: f64, x1: f64, n: usize, boundary: Boundary },
    Rect { x: [f64; 2], y: [f64; 2], nx: usize, ny: usize, boundary: Boundary },
    Sliver { eps: f64 },
    File(PathBuf),
}

fn bc_name(b: Boundary) -> &'static str {
    match b {
        Boundary::Periodic => "periodic",
        Boundary::Outflow => "outflow",
    }
}

impl MeshSpec {
    pub fn build(&self) -> Result<Mesh, HarnessError> {
        Ok(match self {
            MeshSpec::Interval { x0, x1, n, boundary } => uniform_interval(*x0, *x1, *n, *boundary),
            MeshSpec::Rect { x, y, nx, ny, boundary } => rectangle_triangles(*x, *y, *nx, *ny, *boundary),
            MeshSpec::Sliver { eps } => sliver_triangle(*eps),
            MeshSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
                Mesh::parse(&text)?
            }
        })
    }
}

impl fmt::Display for MeshSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshSpec::Interval { x0, x1, n, boundary } => write!(f, "interval:{x0}:{x1}:{n}:{}", bc_name(*boundary)),
            MeshSpec::Rect { x, y, nx, ny, boundary } => {
                write!(f, "rect:{}:{}:{}:{}:{nx}:{ny}:{}", x[0], x[1], y[0], y[1], bc_name(*boundary))
            }
            MeshSpec::Sliver { eps } => write!(f, "sliver:{eps}"),
            MeshSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl FromStr for MeshSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<MeshSpec, HarnessError> {
        let s = s.trim();
        let parts: Vec<&str> = s.split(':').collect();
        let bad = |msg: &str| HarnessError::Config(format!("mesh '{s}': {msg}"));
        let num = |t: &str| t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad(&format!("invalid number '{t}'")));
        let count = |t: &str| t.parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(|| bad(&format!("invalid cell count '{t}'")));
        let bc = |t: &str| match t {
            "periodic" => Ok(Boundary::Periodic),
            "outflow" => Ok(Boundary::Outflow),
            _ => Err(bad(&format!("unknown boundary '{t}'"))),
        };
        let spec = match parts.as_slice() {
            ["interval", x0, x1, n, b] => MeshSpec::Interval { x0: num(x0)?, x1: num(x1)?, n: count(n)?, boundary: bc(b)? },
            ["square", n, b] => {
                let n = count(n)?;
                MeshSpec::Rect { x: [0.0, 1.0], y: [0.0, 1.0], nx: n, ny: n, boundary: bc(b)? }
            }
            ["rect", x0, x1, y0, y1, nx, ny, b] => MeshSpec::Rect {
                x: [num(x0)?, num(x1)?],
                y: [num(y0)?, num(y1)?],
                nx: count(nx)?,
                ny: count(ny)?,
                boundary: bc(b)?,
            },
            ["sliver", eps] => MeshSpec::Sliver { eps: num(eps)? },
            [kind, ..] if ["interval", "square", "rect", "sliver"].contains(kind) => return Err(bad("wrong number of fields")),
            _ => return Ok(MeshSpec::File(PathBuf::from(s))),
        };
        match &spec {
            MeshSpec::Interval { x0, x1, .. } if x1 <= x0 => Err(bad("empty interval")),
            MeshSpec::Rect { x, y, .. } if x[1] <= x[0] || y[1] <= y[0] => Err(bad("empty rectangle")),
            MeshSpec::Sliver { eps } if *eps <= 0.0 => Err(bad("sliver height must be positive")),
            _ => Ok(spec),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditToggles {
    pub max_principle: bool,
    pub tv: bool,
    pub contraction: bool,
    pub entropy: bool,
    pub kinetic: bool,
    pub young: bool,
}

impl Default for AuditToggles {
    fn default() -> AuditToggles {
        AuditToggles { max_principle: true, tv: true, contraction: true, entropy: true, kinetic: false, young: false }
    }
}

/// A refinement study: level `i` runs on the base mesh refined `i` times.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub problem: String,
    pub flux: FluxModel,
    pub scheme: SchemeConfig,
    pub mesh: MeshSpec,
    pub levels: usize,
    pub t_final: f64,
    pub output_dir: Option<PathBuf>,
    pub audits: AuditToggles,
    pub seed: u64,
    pub write_fields: bool,
    pub write_vtk: bool,
    pub kinetic_bins: usize,
    pub kinetic_patches: usize,
    pub young_bins: usize,
    pub young_cells_per_patch: usize,
    pub contraction_amplitude: f64,
    /// Fitted rates below this fail the study.
    pub min_rate: Option<f64>,
}

impl Default for StudyConfig {
    fn default() -> StudyConfig {
        StudyConfig {
            problem: "riemann_shock".into(),
            flux: FluxModel::burgers(),
            scheme: SchemeConfig::default(),
            mesh: MeshSpec::Interval { x0: -1.0, x1: 1.0, n: 100, boundary: Boundary::Outflow },
            levels: 4,
            t_final: 0.4,
            output_dir: None,
            audits: AuditToggles::default(),
            seed: 12345,
            write_fields: true,
            write_vtk: false,
            kinetic_bins: crate::kinetic::DEFAULT_BINS,
            kinetic_patches: crate::kinetic::DEFAULT_TEST_PATCHES,
            young_bins: crate::young::DEFAULT_BINS,
            young_cells_per_patch: 8,
            contraction_amplitude: 0.1,
            min_rate: None,
        }
    }
}

/// `key = value` lines; `#` starts a comment. Returns `(line, key, value)`.
pub fn parse_key_values(text: &str) -> Result<Vec<(usize, String, String)>, HarnessError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(HarnessError::Config(format!("line {}: expected key = value, got '{line}'", i + 1)));
        };
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_bool(key: &str, v: &str) -> Result<bool, HarnessError> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(HarnessError::Config(format!("{key}: expected a boolean, got '{v}'"))),
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, HarnessError> {
    v.parse().map_err(|_| HarnessError::Config(format!("{key}: invalid value '{v}'")))
}

impl StudyConfig {
    pub const KEYS: &'static [&'static str] = &[
        "problem",
        "flux",
        "flux_rule",
        "reconstruction",
        "time_integrator",
        "cfl",
        "lf_dissipation",
        "mesh",
        "levels",
        "t_final",
        "output_dir",
        "audit_max_principle",
        "audit_tv",
        "audit_contraction",
        "audit_entropy",
        "audit_kinetic",
        "audit_young",
        "seed",
        "write_fields",
        "write_vtk",
        "kinetic_bins",
        "kinetic_patches",
        "young_bins",
        "young_cells_per_patch",
        "contraction_amplitude",
        "min_rate",
    ];

    /// Defaults overridden by a `key = value` text.
    pub fn from_text(text: &str) -> Result<StudyConfig, HarnessError> {
        let mut c = StudyConfig::default();
        for (line, k, v) in parse_key_values(text)? {
            c.set(&k, &v).map_err(|e| HarnessError::Config(format!("line {line}: {e}")))?;
        }
        Ok(c)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), HarnessError> {
        match key {
            "problem" => self.problem = v.to_string(),
            "flux" => self.flux = v.parse()?,
            "flux_rule" => self.scheme.flux_rule = v.parse()?,
            "reconstruction" => self.scheme.reconstruction = v.parse()?,
            "time_integrator" => self.scheme.time_integrator = v.parse()?,
            "cfl" => self.scheme.cfl = parse_num(key, v)?,
            "lf_dissipation" => self.scheme.lf_dissipation = v.parse()?,
            "mesh" => self.mesh = v.parse()?,
            "levels" => self.levels = parse_num(key, v)?,
            "t_final" => self.t_final = parse_num(key, v)?,
            "output_dir" => self.output_dir = Some(PathBuf::from(v)),
            "audit_max_principle" => self.audits.max_principle = parse_bool(key, v)?,
            "audit_tv" => self.audits.tv = parse_bool(key, v)?,
            "audit_contraction" => self.audits.contraction = parse_bool(key, v)?,
            "audit_entropy" => self.audits.entropy = parse_bool(key, v)?,
            "audit_kinetic" => self.audits.kinetic = parse_bool(key, v)?,
            "audit_young" => self.audits.young = parse_bool(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "write_fields" => self.write_fields = parse_bool(key, v)?,
            "write_vtk" => self.write_vtk = parse_bool(key, v)?,
            "kinetic_bins" => self.kinetic_bins = parse_num(key, v)?,
            "kinetic_patches" => self.kinetic_patches = parse_num(key, v)?,
            "young_bins" => self.young_bins = parse_num(key, v)?,
            "young_cells_per_patch" => self.young_cells_per_patch = parse_num(key, v)?,
            "contraction_amplitude" => self.contraction_amplitude = parse_num(key, v)?,
            "min_rate" => self.min_rate = Some(parse_num(key, v)?),
            _ => return Err(HarnessError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn reference(&self) -> Result<ReferenceSolution, HarnessError> {
        Ok(ReferenceSolution::new(&self.problem, &self.flux)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.levels < 2 {
            return Err(HarnessError::Config(format!("a rate study needs at least 2 levels, got {}", self.levels)));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(HarnessError::Config(format!("t_final must be positive, got {}", self.t_final)));
        }
        self.scheme.validate()?;
        self.reference()?.check_time(self.t_final)?;
        if self.young_cells_per_patch < 2 || self.young_bins == 0 || self.kinetic_patches < 2 {
            return Err(HarnessError::Config("young/kinetic sampling parameters are too small".into()));
        }
        Ok(())
    }

    /// `key = value` lines reproducing this configuration.
    pub fn to_text(&self) -> String {
        let a = &self.audits;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        kv("problem", self.problem.clone());
        kv("flux", self.flux.to_string());
        kv("flux_rule", self.scheme.flux_rule.to_string());
        kv("reconstruction", self.scheme.reconstruction.to_string());
        kv("time_integrator", self.scheme.time_integrator.to_string());
        kv("cfl", self.scheme.cfl.to_string());
        kv("lf_dissipation", self.scheme.lf_dissipation.to_string());
        kv("mesh", self.mesh.to_string());
        kv("levels", self.levels.to_string());
        kv("t_final", self.t_final.to_string());
        if let Some(d) = &self.output_dir {
            kv("output_dir", d.display().to_string());
        }
        kv("audit_max_principle", a.max_principle.to_string());
        kv("audit_tv", a.tv.to_string());
        kv("audit_contraction", a.contraction.to_string());
        kv("audit_entropy", a.entropy.to_string());
        kv("audit_kinetic", a.kinetic.to_string());
        kv("audit_young", a.young.to_string());
        kv("seed", self.seed.to_string());
        kv("write_fields", self.write_fields.to_string());
        kv("write_vtk", self.write_vtk.to_string());
        kv("kinetic_bins", self.kinetic_bins.to_string());
        kv("kinetic_patches", self.kinetic_patches.to_string());
        kv("young_bins", self.young_bins.to_string());
        kv("young_cells_per_patch", self.young_cells_per_patch.to_string());
        kv("contraction_amplitude", self.contraction_amplitude.to_string());
        if let Some(r) = self.min_rate {
            kv("min_rate", r.to_string());
        }
        s
    }
}
