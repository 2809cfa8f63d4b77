//! Plain-text point-set dumps.
//!
//! ```text
//! # point-set v1
//! dim 2
//! box 4 4
//! 0 0
//! 2 1
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::boxes::{Coord, LatticeBox};
use super::set::BoxSet;

pub const DUMP_HEADER: &str = "# point-set v1";

pub fn write_dump(set: &BoxSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{DUMP_HEADER}");
    let _ = writeln!(out, "dim {}", set.dim());
    let _ = writeln!(out, "box {}", join(set.bounds().bounds()));
    for p in set.iter() {
        let _ = writeln!(out, "{}", join(&p));
    }
    out
}

fn join(values: &[Coord]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Parses a dump. Blank lines and `#` comments are ignored; points may come in any order.
pub fn parse_dump(text: &str) -> Result<BoxSet> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, header) = lines.next().ok_or_else(|| Error::parse(1, "empty dump"))?;
    let dim: usize = header
        .strip_prefix("dim ")
        .and_then(|d| d.trim().parse().ok())
        .ok_or_else(|| Error::parse(line, "expected `dim <n>`"))?;
    if dim == 0 {
        return Err(Error::parse(line, "dimension must be positive"));
    }

    let (line, box_line) = lines
        .next()
        .ok_or_else(|| Error::parse(line + 1, "missing `box` line"))?;
    let bounds = box_line
        .strip_prefix("box ")
        .ok_or_else(|| Error::parse(line, "expected `box <M1> ... <Mn>`"))
        .and_then(|rest| numbers(line, rest))?;
    if bounds.len() != dim {
        return Err(Error::parse(
            line,
            format!("box has {} bounds but dim is {dim}", bounds.len()),
        ));
    }
    let bounds = LatticeBox::new(bounds).map_err(|e| Error::parse(line, e.to_string()))?;

    let mut indices = Vec::new();
    for (line, text) in lines {
        let point = numbers(line, text)?;
        if point.len() != dim {
            return Err(Error::parse(
                line,
                format!("point has {} coordinates, expected {dim}", point.len()),
            ));
        }
        if !bounds.contains(&point) {
            return Err(Error::parse(line, format!("point {point:?} outside box {bounds}")));
        }
        indices.push(bounds.encode(&point));
    }
    let count = indices.len();
    let set = BoxSet::from_indices(bounds, indices);
    if set.len() != count {
        return Err(Error::parse(0, "duplicate points in dump"));
    }
    Ok(set)
}

fn numbers(line: usize, text: &str) -> Result<Vec<Coord>> {
    text.split_whitespace()
        .map(|w| {
            w.parse::<Coord>()
                .map_err(|_| Error::parse(line, format!("`{w}` is not a non-negative integer")))
        })
        .collect()
}
