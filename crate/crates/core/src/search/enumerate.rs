//! Backtracking generator of every valid curve with a given divisor.
//!
//! For a fixed entry vertex `E` and exit vertex `X`, a curve is a sequence
//! of cells where each fraction enters at the point the previous one left.
//! Each step picks an unused cell touching the current point and an
//! `(iso, reversed)` pair carrying the curve's start to that point; the
//! exit is then forced. A sequence ending at `k·X` is a valid curve.

use serde::{Deserialize, Serialize};

use super::conditions::{five_necessary_conditions, Condition};
use crate::curve::{Adjacency, CellIndex, FractalCurve, FractionSpec};
use crate::geometry::{vertex_coords, vertex_index, Isometry};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationSpec {
    pub k: u32,
    pub require_side_adjacency: bool,
    /// Emit one curve (the canonical one) per symmetry class.
    pub dedup_by_symmetry: bool,
    /// Skip curves for which any of these conditions is violated.
    pub filters: Vec<Condition>,
}

impl EnumerationSpec {
    pub fn new(k: u32) -> EnumerationSpec {
        EnumerationSpec { k, require_side_adjacency: false, dedup_by_symmetry: true, filters: Vec::new() }
    }
}

/// `(iso, reversed, exit corner)` choices placing the curve's start at a
/// given cell corner, indexed by that corner.
type Moves = [Vec<(Isometry, bool, u8)>; 4];

fn moves(entry: u8, exit: u8) -> Moves {
    let mut out: Moves = Default::default();
    for iso in Isometry::ALL {
        for reversed in [false, true] {
            let (s, e) = if reversed { (exit, entry) } else { (entry, exit) };
            let (sx, sy) = iso.apply_int(vertex_coords(s), 1);
            let (ex, ey) = iso.apply_int(vertex_coords(e), 1);
            out[vertex_index(sx, sy) as usize].push((iso, reversed, vertex_index(ex, ey)));
        }
    }
    out
}

/// A unit of enumeration work: a fixed prefix for one endpoint pair.
#[derive(Clone, Debug)]
pub struct Task {
    k: u32,
    entry: u8,
    exit: u8,
    prefix: Vec<FractionSpec>,
    point: (i64, i64),
    used: u128,
}

struct Walker<'a> {
    spec: &'a EnumerationSpec,
    moves: Moves,
    target: (i64, i64),
}

impl Walker<'_> {
    fn k(&self) -> i64 {
        self.spec.k as i64
    }

    /// Continuations of a partial sequence by one fraction.
    fn step(&self, prefix: &[FractionSpec], point: (i64, i64), used: u128, mut f: impl FnMut(FractionSpec, (i64, i64), u128)) {
        let k = self.k();
        for (dx, dy) in [(-1, -1), (0, -1), (-1, 0), (0, 0)] {
            let (cx, cy) = (point.0 + dx, point.1 + dy);
            if cx < 0 || cy < 0 || cx >= k || cy >= k {
                continue;
            }
            let bit = 1u128 << (cy * k + cx);
            if used & bit != 0 {
                continue;
            }
            let cell = CellIndex::new(cx as u32, cy as u32);
            if self.spec.require_side_adjacency {
                if let Some(prev) = prefix.last() {
                    if Adjacency::of_cells(prev.cell, cell) != Adjacency::Side {
                        continue;
                    }
                }
            }
            let corner = vertex_index(point.0 - cx, point.1 - cy) as usize;
            for &(iso, reversed, out) in &self.moves[corner] {
                let (ox, oy) = vertex_coords(out);
                f(FractionSpec::new(cell, iso, reversed), (cx + ox, cy + oy), used | bit);
            }
        }
    }

    fn walk(&self, prefix: &mut Vec<FractionSpec>, point: (i64, i64), used: u128, out: &mut dyn FnMut(&[FractionSpec])) {
        let g = (self.spec.k * self.spec.k) as usize;
        if prefix.len() == g {
            if point == self.target {
                out(prefix);
            }
            return;
        }
        let mut next = Vec::new();
        self.step(prefix, point, used, |f, p, u| next.push((f, p, u)));
        for (f, p, u) in next {
            prefix.push(f);
            self.walk(prefix, p, u, out);
            prefix.pop();
        }
    }
}

fn walker<'a>(spec: &'a EnumerationSpec, entry: u8, exit: u8) -> Walker<'a> {
    let k = spec.k as i64;
    let (xx, xy) = vertex_coords(exit);
    Walker { spec, moves: moves(entry, exit), target: (xx * k, xy * k) }
}

/// Independent work units covering the whole search, in a fixed order.
pub fn tasks(spec: &EnumerationSpec, prefix_len: usize) -> Vec<Task> {
    let k = spec.k as i64;
    let mut out = Vec::new();
    for entry in 0..4u8 {
        for exit in 0..4u8 {
            if entry == exit {
                continue;
            }
            let w = walker(spec, entry, exit);
            let (ex, ey) = vertex_coords(entry);
            let mut level = vec![Task { k: spec.k, entry, exit, prefix: Vec::new(), point: (ex * k, ey * k), used: 0 }];
            for _ in 0..prefix_len.min((spec.k * spec.k) as usize) {
                let mut grown = Vec::new();
                for t in &level {
                    w.step(&t.prefix, t.point, t.used, |f, p, u| {
                        let mut prefix = t.prefix.clone();
                        prefix.push(f);
                        grown.push(Task { k: t.k, entry, exit, prefix, point: p, used: u });
                    });
                }
                level = grown;
            }
            out.extend(level);
        }
    }
    out
}

/// Runs one task, passing each accepted curve to `out` in a fixed order.
pub fn run_task(spec: &EnumerationSpec, task: &Task, out: &mut dyn FnMut(FractalCurve)) {
    let w = walker(spec, task.entry, task.exit);
    let mut prefix = task.prefix.clone();
    w.walk(&mut prefix, task.point, task.used, &mut |fr| {
        let curve = FractalCurve::new(task.k, fr.to_vec()).expect("cells stay in the grid");
        if spec.dedup_by_symmetry && !curve.is_canonical() {
            return;
        }
        if !spec.filters.is_empty() {
            let valid = curve.clone().into_valid().expect("chained sequences are valid");
            let report = five_necessary_conditions(&valid);
            if spec.filters.iter().any(|c| report.violated(*c)) {
                return;
            }
        }
        out(curve);
    });
}

/// Every valid curve matching the spec, in a deterministic order.
pub fn enumerate_curves(spec: &EnumerationSpec) -> impl Iterator<Item = FractalCurve> + '_ {
    tasks(spec, 2).into_iter().flat_map(move |t| {
        let mut v = Vec::new();
        run_task(spec, &t, &mut |c| v.push(c));
        v
    })
}
