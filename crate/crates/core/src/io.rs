//! Flat-file formats.
//!
//! Points are CSV: one point per line, comma-separated coordinates, an
//! optional `# dim=d` header (needed for an empty set), `#` comments and
//! blank lines ignored. Numbers are written in Rust's shortest round-trip
//! form, so writing and reading back gives identical values.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::experiment::ProcessSection;
use crate::geometry::{Cuboid, PointSet};
use crate::poisson::PoissonConfig;

pub fn parse_points_csv(text: &str) -> Result<PointSet> {
    let mut dim = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(d) = comment.trim().strip_prefix("dim=") {
                dim = Some(d.trim().parse::<usize>().map_err(|e| {
                    Error::Parse(format!("line {}: bad dim header: {e}", lineno + 1))
                })?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}: {f:?}", lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    match (dim, rows.is_empty()) {
        (Some(d), true) => PointSet::empty(d),
        (None, true) => Err(Error::Parse(
            "empty point file needs a `# dim=d` header".into(),
        )),
        (Some(d), false) => PointSet::new(d, &rows),
        (None, false) => PointSet::from_rows(&rows),
    }
}

pub fn points_to_csv(points: &PointSet) -> String {
    let mut s = format!("# dim={}\n", points.dim());
    for p in points.iter() {
        for (i, x) in p.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            write!(s, "{x}").expect("writing to a String");
        }
        s.push('\n');
    }
    s
}

fn file_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::File {
        path: path.display().to_string(),
        source,
    }
}

/// Reads a whole file, naming it in the error.
pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    fs::read_to_string(path).map_err(file_error(path))
}

/// Writes a whole file, naming it in the error.
pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(file_error(path))
}

pub fn read_points(path: impl AsRef<Path>) -> Result<PointSet> {
    parse_points_csv(&read_text(path)?)
}

pub fn write_points(path: impl AsRef<Path>, points: &PointSet) -> Result<()> {
    write_text(path, &points_to_csv(points))
}

pub fn read_complex(path: impl AsRef<Path>) -> Result<SimplicialComplex> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

pub fn write_complex(path: impl AsRef<Path>, complex: &SimplicialComplex) -> Result<()> {
    write_json(path, complex)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_text(path, &s)
}

/// Parses `a1:b1,a2:b2,...` into a box.
pub fn parse_window(s: &str) -> Result<Cuboid> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for part in s.split(',') {
        let (a, b) = part
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("window interval {part:?} is not `lo:hi`")))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("window bound {x:?}: {e}")))
        };
        lo.push(parse(a)?);
        hi.push(parse(b)?);
    }
    Cuboid::new(lo, hi)
}

/// Reads a sampling config given either at top level or as the `[process]`
/// section of an experiment file.
pub fn parse_poisson_config(text: &str) -> Result<PoissonConfig> {
    if let Ok(cfg) = PoissonConfig::from_toml_str(text) {
        return Ok(cfg);
    }
    #[derive(serde::Deserialize)]
    struct Wrapper {
        process: ProcessSection,
    }
    let w: Wrapper = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let p = w.process;
    PoissonConfig::new(
        p.intensity
            .ok_or_else(|| Error::Parse("[process] intensity is required".into()))?,
        p.window
            .ok_or_else(|| Error::Parse("[process] window is required".into()))?,
        p.seed,
        p.mode,
    )
}
