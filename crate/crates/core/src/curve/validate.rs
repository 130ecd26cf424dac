use std::fmt;

use serde::Serialize;

use super::{classify_endpoints, CellIndex, FractalCurve};
use crate::geometry::{Point, Rational};

/// How the images of two consecutive first-order fractions touch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Adjacency {
    Side,
    Vertex,
    Disjoint,
}

impl Adjacency {
    pub fn of_cells(a: CellIndex, b: CellIndex) -> Adjacency {
        let dc = (a.col as i64 - b.col as i64).abs();
        let dr = (a.row as i64 - b.row as i64).abs();
        match (dc, dr) {
            (1, 0) | (0, 1) => Adjacency::Side,
            (1, 1) => Adjacency::Vertex,
            _ => Adjacency::Disjoint,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationFailure {
    /// Some cell is used twice (and hence some other cell never).
    CellsNotPartition { duplicated: Vec<CellIndex> },
    /// Exit of fraction `junction` differs from entry of fraction `junction + 1`.
    Discontinuity { junction: usize, exit: Point, entry: Point },
    EndpointNotVertex { entry: Point, exit: Point },
    CoincidentEndpoints { point: Point },
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationFailure::CellsNotPartition { duplicated } => {
                write!(f, "cells not a partition (duplicated:")?;
                for c in duplicated {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
            ValidationFailure::Discontinuity { junction, exit, entry } => write!(
                f,
                "discontinuity at junction {}-{}: exit {exit} != entry {entry}",
                junction,
                junction + 1
            ),
            ValidationFailure::EndpointNotVertex { entry, exit } => {
                write!(f, "entry {entry} / exit {exit} not both vertices of the unit square")
            }
            ValidationFailure::CoincidentEndpoints { point } => {
                write!(f, "entry and exit coincide at {point}")
            }
        }
    }
}

/// Outcome of [`FractalCurve::validate`]. Empty `failures` means valid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub failures: Vec<ValidationFailure>,
    /// Contact type of each consecutive cell pair `(i, i + 1)`.
    pub adjacency: Vec<Adjacency>,
    pub entry: Point,
    pub exit: Point,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    /// True when every consecutive pair shares a side.
    pub fn all_side_adjacent(&self) -> bool {
        self.adjacency.iter().all(|a| *a == Adjacency::Side)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return f.write_str("valid");
        }
        for (i, fail) in self.failures.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{fail}")?;
        }
        Ok(())
    }
}

pub(super) fn validate(curve: &FractalCurve) -> ValidationReport {
    let mut failures = Vec::new();
    let fr = curve.fractions();

    let mut seen = vec![false; fr.len()];
    let mut duplicated = Vec::new();
    for f in fr {
        let idx = (f.cell.row * curve.k() + f.cell.col) as usize;
        if std::mem::replace(&mut seen[idx], true) && !duplicated.contains(&f.cell) {
            duplicated.push(f.cell);
        }
    }
    if !duplicated.is_empty() {
        failures.push(ValidationFailure::CellsNotPartition { duplicated });
    }

    let (entry, exit) = curve.entry_exit();
    let ends: Vec<(Point, Point)> = (0..fr.len()).map(|i| curve.fraction_endpoints(i, entry, exit)).collect();
    for i in 0..fr.len() - 1 {
        if ends[i].1 != ends[i + 1].0 {
            failures.push(ValidationFailure::Discontinuity { junction: i, exit: ends[i].1, entry: ends[i + 1].0 });
        }
    }

    let is_vertex = |p: Point| {
        [p.x, p.y].iter().all(|c| *c == Rational::ZERO || *c == Rational::ONE)
    };
    if !is_vertex(entry) || !is_vertex(exit) {
        failures.push(ValidationFailure::EndpointNotVertex { entry, exit });
    } else if classify_endpoints(entry, exit).is_err() {
        failures.push(ValidationFailure::CoincidentEndpoints { point: entry });
    }

    let adjacency = fr.windows(2).map(|w| Adjacency::of_cells(w[0].cell, w[1].cell)).collect();
    ValidationReport { failures, adjacency, entry, exit }
}
