//! The `.inc` text format for incidence systems.
//!
//! ```text
//! planecode v1
//! points <v>
//! lines <b>
//! <ascending point indices of line 0>
//! ...
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::incidence::IncidenceSystem;

pub const INC_MAGIC: &str = "planecode v1";

pub fn write_inc(sys: &IncidenceSystem) -> String {
    let mut out = String::new();
    writeln!(out, "{INC_MAGIC}").unwrap();
    writeln!(out, "points {}", sys.num_points()).unwrap();
    writeln!(out, "lines {}", sys.num_lines()).unwrap();
    for line in sys.lines() {
        let mut first = true;
        for x in line {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{x}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn header_value(line: Option<&str>, key: &str) -> Result<usize> {
    let line = line.ok_or_else(|| Error::Malformed(format!("missing `{key}` header")))?;
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == key => v
            .parse()
            .map_err(|_| Error::Malformed(format!("bad `{key}` value {v:?}"))),
        _ => Err(Error::Malformed(format!("expected `{key} <n>`, found {line:?}"))),
    }
}

/// Parses the `.inc` format. Lines must be strictly ascending and in range.
pub fn parse_inc(text: &str) -> Result<IncidenceSystem> {
    let mut rows = text.lines();
    match rows.next() {
        Some(first) if first.trim() == INC_MAGIC => {}
        other => {
            return Err(Error::Malformed(format!(
                "expected `{INC_MAGIC}` header, found {other:?}"
            )))
        }
    }
    let v = header_value(rows.next(), "points")?;
    let b = header_value(rows.next(), "lines")?;
    let mut lines = Vec::with_capacity(b);
    for i in 0..b {
        let row = rows
            .next()
            .ok_or_else(|| Error::Malformed(format!("expected {b} lines, found {i}")))?;
        let mut line = Vec::new();
        for tok in row.split_whitespace() {
            let x: usize = tok
                .parse()
                .map_err(|_| Error::Malformed(format!("line {i}: bad point index {tok:?}")))?;
            if x >= v {
                return Err(Error::Malformed(format!("line {i}: point {x} out of range")));
            }
            if line.last().is_some_and(|&last| last >= x) {
                return Err(Error::Malformed(format!("line {i} is not strictly ascending")));
            }
            line.push(x);
        }
        lines.push(line);
    }
    if rows.any(|r| !r.trim().is_empty()) {
        return Err(Error::Malformed("trailing content after the last line".into()));
    }
    IncidenceSystem::new(v, lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let sys = IncidenceSystem::new(4, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]).unwrap();
        let text = write_inc(&sys);
        assert_eq!(text, "planecode v1\npoints 4\nlines 4\n0 1\n0 3\n1 2\n2 3\n");
        assert_eq!(parse_inc(&text).unwrap(), sys);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_inc("planecode v2\npoints 1\nlines 0\n").is_err());
        assert!(parse_inc("planecode v1\npoints 3\nlines 1\n0 3\n").is_err());
        assert!(parse_inc("planecode v1\npoints 3\nlines 1\n1 0\n").is_err());
        assert!(parse_inc("planecode v1\npoints 3\nlines 2\n0 1\n").is_err());
        assert!(parse_inc("planecode v1\npoints 3\nlines 1\n0 1\n1 2\n").is_err());
    }
}
