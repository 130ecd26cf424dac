//! The JSON curve file.
//!
//! ```text
//! {
//!   "k": 2,
//!   "fractions": [
//!     {"cell": [0, 0], "iso": "md", "rev": false},
//!     ...
//!   ]
//! }
//! ```
//!
//! Parsing checks shape only; validation is a separate step.

use std::fmt::Write;

use serde::Deserialize;

use peano::curve::{CellIndex, CurveError, FractalCurve, FractionSpec};
use peano::geometry::Isometry;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, field `{field}`: {message}")]
pub struct FormatError {
    pub line: usize,
    /// Path of the offending field, e.g. `fractions[2].iso`.
    pub field: String,
    pub message: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    k: u32,
    fractions: Vec<RawFraction>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFraction {
    cell: [u32; 2],
    iso: Isometry,
    rev: bool,
}

pub fn parse_curve(text: &str) -> Result<FractalCurve, FormatError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        FormatError {
            line: inner.line(),
            field: if path == "." { "(document)".into() } else { path },
            message: strip_position(&inner.to_string()),
        }
    })?;
    let fractions = raw
        .fractions
        .iter()
        .map(|f| FractionSpec::new(CellIndex::new(f.cell[0], f.cell[1]), f.iso, f.rev))
        .collect();
    FractalCurve::new(raw.k, fractions).map_err(|e| {
        let (field, line) = match &e {
            CurveError::CellOutOfRange { index, .. } => {
                (format!("fractions[{index}].cell"), nth_key_line(text, "\"cell\"", *index))
            }
            CurveError::FractionCount { .. } => ("fractions".to_string(), nth_key_line(text, "\"fractions\"", 0)),
            _ => ("k".to_string(), nth_key_line(text, "\"k\"", 0)),
        };
        FormatError { line: line.unwrap_or(1), field, message: e.to_string() }
    })
}

/// serde_json appends " at line L column C"; the line is reported separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn nth_key_line(text: &str, key: &str, n: usize) -> Option<usize> {
    let (pos, _) = text.match_indices(key).nth(n)?;
    Some(text[..pos].matches('\n').count() + 1)
}

/// One fraction per line, so files diff well.
pub fn write_curve(curve: &FractalCurve) -> String {
    let mut s = format!("{{\n  \"k\": {},\n  \"fractions\": [\n", curve.k());
    let n = curve.fractions().len();
    for (i, f) in curve.fractions().iter().enumerate() {
        let _ = write!(
            s,
            "    {{\"cell\": [{}, {}], \"iso\": \"{}\", \"rev\": {}}}{}\n",
            f.cell.col,
            f.cell.row,
            f.iso,
            f.reversed,
            if i + 1 < n { "," } else { "" }
        );
    }
    s.push_str("  ]\n}\n");
    s
}
