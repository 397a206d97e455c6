use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::mesh::{Dimension, Mesh};
use crate::scheme::CellField;

use super::HarnessError;

/// Column order of `report.csv`.
pub const REPORT_COLUMNS: &[&str] = &[
    "level",
    "h",
    "cells",
    "steps",
    "l1_error",
    "max_principle_violation",
    "tv_max_increase",
    "contraction_max_increase",
    "entropy_max_residual",
    "mass_drift",
    "kinetic_negativity",
    "kinetic_mass",
    "young_max_variance",
    "young_max_gap",
    "initial_consistency",
    "status",
];

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

/// Text dump: a `# t = ...` header, then `cell x y value` per line.
pub fn write_field_dump(path: &Path, field: &CellField) -> Result<(), HarnessError> {
    let mut s = format!("# t = {:e}\n# cell x y value\n", field.time());
    for (k, (c, u)) in field.mesh().cells().iter().zip(field.values()).enumerate() {
        writeln!(s, "{k} {:e} {:e} {:e}", c.centroid[0], c.centroid[1], u).expect("string write");
    }
    write_file(path, &s)
}

/// Read a dump written by [`write_field_dump`] back onto `mesh`.
pub fn read_field_dump(path: &Path, mesh: Arc<Mesh>) -> Result<CellField, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let bad = |line: usize, msg: &str| HarnessError::Config(format!("{}:{line}: {msg}", path.display()));
    let mut time = None;
    let mut values = vec![f64::NAN; mesh.num_cells()];
    let mut seen = vec![false; mesh.num_cells()];
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(t) = rest.trim().strip_prefix("t =") {
                time = Some(t.trim().parse::<f64>().map_err(|_| bad(i + 1, "invalid time"))?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [k, _, _, u] = parts.as_slice() else {
            return Err(bad(i + 1, "expected 'cell x y value'"));
        };
        let k: usize = k.parse().map_err(|_| bad(i + 1, "invalid cell index"))?;
        if k >= values.len() || seen[k] {
            return Err(bad(i + 1, "cell index out of range or repeated"));
        }
        values[k] = u.parse().map_err(|_| bad(i + 1, "invalid value"))?;
        seen[k] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(bad(0, "dump does not cover every cell"));
    }
    let time = time.ok_or_else(|| bad(0, "missing '# t = ...' header"))?;
    Ok(CellField::new(mesh, values, time)?)
}

const VTK_LINE: u8 = 3;
const VTK_TRIANGLE: u8 = 5;
const VTK_POLYGON: u8 = 7;

/// Legacy ASCII VTK unstructured grid with the field as cell data `u`.
pub fn write_vtk(path: &Path, field: &CellField) -> Result<(), HarnessError> {
    let mesh = field.mesh();
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    writeln!(s, "cell averages t={:e}", field.time()).unwrap();
    s.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    writeln!(s, "POINTS {} double", mesh.vertices().len()).unwrap();
    for v in mesh.vertices() {
        writeln!(s, "{:e} {:e} 0", v[0], v[1]).unwrap();
    }
    let size: usize = mesh.cells().iter().map(|c| c.vertices.len() + 1).sum();
    writeln!(s, "CELLS {} {size}", mesh.num_cells()).unwrap();
    for c in mesh.cells() {
        s.push_str(&c.vertices.len().to_string());
        for v in &c.vertices {
            write!(s, " {v}").unwrap();
        }
        s.push('\n');
    }
    writeln!(s, "CELL_TYPES {}", mesh.num_cells()).unwrap();
    for c in mesh.cells() {
        let t = match (mesh.dimension(), c.vertices.len()) {
            (Dimension::One, _) => VTK_LINE,
            (Dimension::Two, 3) => VTK_TRIANGLE,
            (Dimension::Two, _) => VTK_POLYGON,
        };
        writeln!(s, "{t}").unwrap();
    }
    writeln!(s, "CELL_DATA {}\nSCALARS u double 1\nLOOKUP_TABLE default", mesh.num_cells()).unwrap();
    for u in field.values() {
        writeln!(s, "{u:e}").unwrap();
    }
    write_file(path, &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{unit_square_two_triangles, uniform_interval, Boundary};

    #[test]
    fn dump_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mesh = Arc::new(uniform_interval(0.0, 1.0, 7, Boundary::Periodic));
        let f = CellField::from_fn(mesh.clone(), |x| (x[0] * 10.0).sin() / 3.0).unwrap();
        let f = f.with_values(f.values().to_vec(), 0.125).unwrap();
        let p = dir.path().join("sub/f.dat");
        write_field_dump(&p, &f).unwrap();
        let g = read_field_dump(&p, mesh).unwrap();
        assert_eq!(g.values(), f.values());
        assert_eq!(g.time(), 0.125);
    }

    #[test]
    fn vtk_layout() {
        let dir = tempfile::tempdir().unwrap();
        let f = CellField::constant(Arc::new(unit_square_two_triangles()), 2.0);
        let p = dir.path().join("f.vtk");
        write_vtk(&p, &f).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("# vtk DataFile Version 3.0\n"));
        assert!(text.contains("POINTS 4 double\n"));
        assert!(text.contains("CELLS 2 8\n"));
        assert!(text.contains("CELL_TYPES 2\n5\n5\n"));
        assert!(text.ends_with("LOOKUP_TABLE default\n2e0\n2e0\n"));
    }
}
