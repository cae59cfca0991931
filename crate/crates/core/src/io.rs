//! Plain-text body format.
//!
//! ```text
//! # optional comments
//! dim 3
//! kind symV          # symV | genV | H | frame
//! count 4
//! 1.7320508075688772e0 0e0 0e0
//! ...
//! ```
//!
//! Each of the `count` lines holds one generator (`symV`), vertex (`genV`),
//! slab normal (`H`) or frame column (`frame`). A file may hold several
//! records back to back. Numbers are written with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{GeneralVPolytope, HPolytope, Projection, SymVPolytope};

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Sym(SymVPolytope),
    General(GeneralVPolytope),
    H(HPolytope),
    Frame(Projection),
}

impl Body {
    pub fn kind(&self) -> &'static str {
        match self {
            Body::Sym(_) => "symV",
            Body::General(_) => "genV",
            Body::H(_) => "H",
            Body::Frame(_) => "frame",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Body::Sym(b) => b.dim(),
            Body::General(b) => b.dim(),
            Body::H(b) => b.dim(),
            Body::Frame(p) => p.ambient_dim(),
        }
    }

    /// The body's defining vectors as columns.
    fn columns(&self) -> DMatrix<f64> {
        match self {
            Body::Sym(b) => b.generators().clone(),
            Body::General(b) => b.vertices().clone(),
            Body::H(b) => b.rows().transpose(),
            Body::Frame(p) => p.frame().clone(),
        }
    }
}

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_body(body: &Body) -> String {
    let cols = body.columns();
    let mut s = String::new();
    let _ = writeln!(s, "dim {}", body.dim());
    let _ = writeln!(s, "kind {}", body.kind());
    let _ = writeln!(s, "count {}", cols.ncols());
    for c in cols.column_iter() {
        let line: Vec<String> = c.iter().map(|&x| format_f64(x)).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

pub fn save_body(path: &Path, body: &Body) -> Result<()> {
    std::fs::write(path, write_body(body)).map_err(|e| Error::io(path, e))
}

pub fn load_bodies(path: &Path) -> Result<Vec<Body>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_bodies(&text)
}

/// Reads a file holding exactly one record.
pub fn load_body(path: &Path) -> Result<Body> {
    let mut bodies = load_bodies(path)?;
    match bodies.len() {
        1 => Ok(bodies.remove(0)),
        n => Err(Error::Parse { line: 0, msg: format!("expected one record, found {n}") }),
    }
}

fn header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, key: &str) -> Result<(usize, &'a str)> {
    let (no, line) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 0, msg: format!("missing `{key}` line") })?;
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == key => Ok((no, v)),
        _ => Err(Error::Parse { line: no, msg: format!("expected `{key} <value>`") }),
    }
}

fn parse_usize(no: usize, v: &str, what: &str) -> Result<usize> {
    v.parse().map_err(|_| Error::Parse { line: no, msg: format!("invalid {what} `{v}`") })
}

pub fn parse_bodies(text: &str) -> Result<Vec<Body>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();
    let mut out = Vec::new();
    while lines.peek().is_some() {
        let (no, d) = header(&mut lines, "dim")?;
        let dim = parse_usize(no, d, "dimension")?;
        let (kno, kind) = header(&mut lines, "kind")?;
        let (no, c) = header(&mut lines, "count")?;
        let count = parse_usize(no, c, "count")?;
        let mut cols = DMatrix::zeros(dim, count);
        for j in 0..count {
            let (no, line) = lines
                .next()
                .ok_or_else(|| Error::Parse { line: no, msg: format!("expected {count} data lines, got {j}") })?;
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| Error::Parse { line: no, msg: format!("invalid number `{t}`") }))
                .collect::<Result<_>>()?;
            if vals.len() != dim {
                return Err(Error::Parse { line: no, msg: format!("expected {dim} numbers, got {}", vals.len()) });
            }
            cols.column_mut(j).copy_from_slice(&vals);
        }
        let body = match kind {
            "symV" => Body::Sym(SymVPolytope::from_columns(cols)?),
            "genV" => Body::General(GeneralVPolytope::from_columns(cols)?),
            "H" => Body::H(HPolytope::from_rows_matrix(cols.transpose())?),
            "frame" => Body::Frame(Projection::new(cols)?),
            other => return Err(Error::Parse { line: kno, msg: format!("unknown kind `{other}`") }),
        };
        out.push(body);
    }
    Ok(out)
}
