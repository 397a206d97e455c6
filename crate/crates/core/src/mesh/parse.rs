//! Plain-text mesh format.
//!
//! ```text
//! # comments and blank lines are ignored
//! dimension 2
//! vertices 4
//! 0 0
//! 1 0
//! 1 1
//! 0 1
//! cells 2
//! 3 0 1 2          # vertex count, then counter-clockwise vertex indices
//! 3 0 2 3
//! boundary 2       # optional; untagged boundary entities are outflow
//! 0 1 periodic 3 2 # edge 0-1 identified with edge 3-2
//! 1 2 outflow
//! ```
//!
//! In 1-D each vertex line holds one coordinate, every cell is `2 i j` with
//! `x_i < x_j`, and tag lines name single vertices (`4 periodic 0`).

use super::{BoundaryTag, Dimension, MeshDescription, MeshError};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let text = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = text.split_whitespace().collect();
            self.last = i + 1;
            if !toks.is_empty() {
                return Some((i + 1, toks));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), MeshError> {
        self.next_tokens().ok_or(MeshError::Parse { line: self.last + 1, msg: format!("unexpected end of file, expected {what}") })
    }
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, MeshError> {
    Err(MeshError::Parse { line, msg: msg.into() })
}

fn num<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T, MeshError> {
    tok.parse().or_else(|_| err(line, format!("invalid number '{tok}'")))
}

fn header(lines: &mut Lines<'_>, key: &str) -> Result<usize, MeshError> {
    let (line, toks) = lines.expect(key)?;
    if toks.len() != 2 || toks[0] != key {
        return err(line, format!("expected '{key} <count>'"));
    }
    num(line, toks[1])
}

pub(super) fn parse_description(source: &str) -> Result<MeshDescription, MeshError> {
    let mut lines = Lines { inner: source.lines().enumerate(), last: 0 };
    let (line, toks) = lines.expect("dimension")?;
    let dimension = match toks.as_slice() {
        ["dimension", "1"] => Dimension::One,
        ["dimension", "2"] => Dimension::Two,
        _ => return err(line, "expected 'dimension 1' or 'dimension 2'"),
    };
    let d = dimension.as_usize();

    let nv = header(&mut lines, "vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, toks) = lines.expect("vertex coordinates")?;
        if toks.len() != d {
            return err(line, format!("expected {d} coordinate(s)"));
        }
        let x: f64 = num(line, toks[0])?;
        let y: f64 = if d == 2 { num(line, toks[1])? } else { 0.0 };
        if !x.is_finite() || !y.is_finite() {
            return err(line, "non-finite coordinate");
        }
        vertices.push([x, y]);
    }

    let nc = header(&mut lines, "cells")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (line, toks) = lines.expect("cell")?;
        let k: usize = num(line, toks[0])?;
        if toks.len() != k + 1 {
            return err(line, format!("cell declares {k} vertices but lists {}", toks.len() - 1));
        }
        let idx = toks[1..].iter().map(|t| num::<usize>(line, t)).collect::<Result<Vec<_>, _>>()?;
        if let Some(bad) = idx.iter().find(|&&v| v >= nv) {
            return err(line, format!("vertex index {bad} out of range"));
        }
        cells.push(idx);
    }

    let mut tags = Vec::new();
    if let Some((line, toks)) = lines.next_tokens() {
        if toks.len() != 2 || toks[0] != "boundary" {
            return err(line, "expected 'boundary <count>'");
        }
        let nb: usize = num(line, toks[1])?;
        for _ in 0..nb {
            let (line, toks) = lines.expect("boundary tag")?;
            let ids = |t: &[&str]| t.iter().map(|s| num::<usize>(line, s)).collect::<Result<Vec<_>, _>>();
            let tag = match (toks.get(d).copied(), toks.len()) {
                (Some("outflow"), n) if n == d + 1 => BoundaryTag::Outflow(ids(&toks[..d])?),
                (Some("periodic"), n) if n == 2 * d + 1 => BoundaryTag::Periodic(ids(&toks[..d])?, ids(&toks[d + 1..])?),
                _ => return err(line, "expected '<entity> outflow' or '<entity> periodic <entity>'"),
            };
            tags.push(tag);
        }
        if let Some((line, _)) = lines.next_tokens() {
            return err(line, "trailing content after boundary section");
        }
    }
    Ok(MeshDescription { dimension, vertices, cells, tags })
}

pub(super) fn write_description(d: &MeshDescription) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let dim = d.dimension.as_usize();
    writeln!(s, "dimension {dim}").unwrap();
    writeln!(s, "vertices {}", d.vertices.len()).unwrap();
    for p in &d.vertices {
        if dim == 1 {
            writeln!(s, "{:e}", p[0]).unwrap();
        } else {
            writeln!(s, "{:e} {:e}", p[0], p[1]).unwrap();
        }
    }
    writeln!(s, "cells {}", d.cells.len()).unwrap();
    for c in &d.cells {
        let idx: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        writeln!(s, "{} {}", c.len(), idx.join(" ")).unwrap();
    }
    writeln!(s, "boundary {}", d.tags.len()).unwrap();
    let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    for t in &d.tags {
        match t {
            BoundaryTag::Outflow(e) => writeln!(s, "{} outflow", join(e)).unwrap(),
            BoundaryTag::Periodic(a, b) => writeln!(s, "{} periodic {}", join(a), join(b)).unwrap(),
        }
    }
    s
}
