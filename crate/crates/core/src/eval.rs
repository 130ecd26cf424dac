//! Evaluating a curve at a time, digital scan orders, and the elongation of
//! the pixel blob swept during a time interval.

use std::collections::HashMap;

use serde::Serialize;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::curve::{CellIndex, Frame, FractionSpec, ValidCurve};
use crate::geometry::{Point, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("time {0} outside [0, 1]")]
    TimeOutOfRange(Rational),
    #[error("scan grid side {side} exceeds the cap {cap}")]
    GridTooLarge { side: u128, cap: u128 },
    #[error("exact point at time {0} does not fit 128-bit rationals")]
    Overflow(Rational),
    #[error("interval [{from}, {to}] invalid for a scan of {len} cells")]
    BadInterval { from: usize, to: usize, len: usize },
}

/// The closed depth-`n` grid square known to contain `f(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PointEnclosure {
    pub depth: u32,
    pub col: u64,
    pub row: u64,
    /// Side `k^{−depth}`.
    pub side: Rational,
}

impl PointEnclosure {
    pub fn contains(&self, p: Point) -> bool {
        let lo_x = Rational::from_int(self.col as i128) * self.side;
        let lo_y = Rational::from_int(self.row as i128) * self.side;
        lo_x <= p.x && p.x <= lo_x + self.side && lo_y <= p.y && p.y <= lo_y + self.side
    }
}

/// Enclosure of `f(t)` after `depth` digit steps.
///
/// A time on a period boundary belongs to the earlier period.
pub fn evaluate(curve: &ValidCurve, t: Rational, depth: u32) -> Result<PointEnclosure, EvalError> {
    if t < Rational::ZERO || t > Rational::ONE {
        return Err(EvalError::TimeOutOfRange(t));
    }
    let g = Rational::from(curve.genus() as i64);
    let mut frame = Frame::ROOT;
    // u is the position inside the current period, in global time direction.
    let mut u = t;
    for _ in 0..depth {
        let scaled = u * g;
        let j = (scaled.ceil() - 1).max(0);
        frame = frame.child(curve.curve(), j as usize);
        u = scaled - Rational::from_int(j);
    }
    Ok(PointEnclosure {
        depth,
        col: frame.origin.0 as u64,
        row: frame.origin.1 as u64,
        side: Rational::new(1, (curve.k() as i128).pow(depth)),
    })
}

/// Exact `f(t)`.
///
/// The base-time `s` evolves by `s ↦ σ_b(g·s − b)`; rational times make that
/// orbit eventually periodic. Once a value repeats, the point at the start of
/// the cycle is the fixed point of the cycle's composed contraction. Long
/// cycles are composed in big integers; the result must fit a [`Rational`].
pub fn evaluate_exact(curve: &ValidCurve, t: Rational) -> Result<Point, EvalError> {
    if t < Rational::ZERO || t > Rational::ONE {
        return Err(EvalError::TimeOutOfRange(t));
    }
    let g = curve.genus() as i128;
    let gq = Rational::from_int(g);
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    let mut maps: Vec<usize> = Vec::new();
    let mut s = t;
    let cycle_start = loop {
        if let Some(&at) = seen.get(&s) {
            break at;
        }
        seen.insert(s, maps.len());
        let b = (s * gq).floor().min(g - 1);
        let f = &curve.fractions()[b as usize];
        maps.push(b as usize);
        let local = s * gq - Rational::from_int(b);
        s = if f.reversed { Rational::ONE - local } else { local };
    };
    let k = BigInt::from(curve.k());
    let fractions = curve.fractions();
    let mut cycle = Affine::identity();
    for &b in &maps[cycle_start..] {
        cycle = cycle.then(&Affine::fraction(&fractions[b], &k));
    }
    let mut p = cycle.fixed_point();
    for &b in maps[..cycle_start].iter().rev() {
        p = Affine::fraction(&fractions[b], &k).apply(&p);
    }
    p.to_point().ok_or(EvalError::Overflow(t))
}

/// `p ↦ (c + R p) / s` with integer `c`, `R`, `s`.
struct Affine {
    c: [BigInt; 2],
    r: [[i64; 2]; 2],
    s: BigInt,
}

/// `(x, y) / d`.
struct BigPoint {
    x: BigInt,
    y: BigInt,
    d: BigInt,
}

impl Affine {
    fn identity() -> Affine {
        Affine { c: [BigInt::zero(), BigInt::zero()], r: [[1, 0], [0, 1]], s: BigInt::one() }
    }

    /// `p ↦ (cell + iso(p)) / k`.
    fn fraction(f: &FractionSpec, k: &BigInt) -> Affine {
        let t = f.iso.apply_int((0, 0), 1);
        let ex = f.iso.apply_vector((1, 0));
        let ey = f.iso.apply_vector((0, 1));
        Affine {
            c: [BigInt::from(f.cell.col as i64 + t.0), BigInt::from(f.cell.row as i64 + t.1)],
            r: [[ex.0, ey.0], [ex.1, ey.1]],
            s: k.clone(),
        }
    }

    /// `self ∘ inner`.
    fn then(&self, inner: &Affine) -> Affine {
        let rc = |row: usize| &inner.c[0] * self.r[row][0] + &inner.c[1] * self.r[row][1];
        let rr = |i: usize, j: usize| self.r[i][0] * inner.r[0][j] + self.r[i][1] * inner.r[1][j];
        Affine {
            c: [&self.c[0] * &inner.s + rc(0), &self.c[1] * &inner.s + rc(1)],
            r: [[rr(0, 0), rr(0, 1)], [rr(1, 0), rr(1, 1)]],
            s: &self.s * &inner.s,
        }
    }

    fn apply(&self, p: &BigPoint) -> BigPoint {
        let x = &self.c[0] * &p.d + &p.x * self.r[0][0] + &p.y * self.r[0][1];
        let y = &self.c[1] * &p.d + &p.x * self.r[1][0] + &p.y * self.r[1][1];
        BigPoint { x, y, d: &self.s * &p.d }
    }

    /// Solves `(s I − R) p = c`.
    fn fixed_point(&self) -> BigPoint {
        let a = &self.s - self.r[0][0];
        let d = &self.s - self.r[1][1];
        let (b, c) = (BigInt::from(-self.r[0][1]), BigInt::from(-self.r[1][0]));
        let det = &a * &d - &b * &c;
        BigPoint { x: &d * &self.c[0] - &b * &self.c[1], y: &a * &self.c[1] - &c * &self.c[0], d: det }
    }
}

impl BigPoint {
    fn to_point(&self) -> Option<Point> {
        let coord = |n: &BigInt| {
            let g = n.gcd(&self.d);
            let (mut n, mut d) = (n / &g, &self.d / &g);
            if d.is_negative() {
                n = -n;
                d = -d;
            }
            Some(Rational::new(n.to_i128()?, d.to_i128()?))
        };
        Some(Point::new(coord(&self.x)?, coord(&self.y)?))
    }
}

/// Depth-`n` traversal order of the `kⁿ × kⁿ` grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanOrder {
    pub depth: u32,
    pub side: u64,
    pub cells: Vec<CellIndex>,
}

/// Default cap on the scan grid side (`kⁿ`).
pub const DEFAULT_SCAN_SIDE_CAP: u128 = 4096;

pub fn scan_order(curve: &ValidCurve, depth: u32, side_cap: u128) -> Result<ScanOrder, EvalError> {
    let side = (curve.k() as u128).checked_pow(depth).unwrap_or(u128::MAX);
    if side > side_cap {
        return Err(EvalError::GridTooLarge { side, cap: side_cap });
    }
    let frames = curve.frames_of_order(depth);
    let cells = frames
        .iter()
        .map(|f| CellIndex::new(f.origin.0 as u32, f.origin.1 as u32))
        .collect();
    Ok(ScanOrder { depth, side: side as u64, cells })
}

impl ScanOrder {
    /// Row-major order (row 0 left to right, then row 1, ...).
    pub fn row_major(side: u32) -> ScanOrder {
        let cells = (0..side).flat_map(|r| (0..side).map(move |c| CellIndex::new(c, r))).collect();
        ScanOrder { depth: 0, side: side as u64, cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlobMetrics {
    /// Number of pixels.
    pub area: u64,
    /// Largest squared distance between pixel centers, in pixel units.
    pub diameter_sq: u64,
    /// `diameter_sq / area`.
    pub elongation: Rational,
}

/// Blobs up to this many pixels use the exhaustive pair scan.
pub const EXHAUSTIVE_BLOB_CAP: usize = 2048;

/// Shape of the pixels swept during `[from, to]` (inclusive indices).
pub fn blob_metrics(order: &ScanOrder, from: usize, to: usize) -> Result<BlobMetrics, EvalError> {
    if from > to || to >= order.len() {
        return Err(EvalError::BadInterval { from, to, len: order.len() });
    }
    let pts: Vec<(i64, i64)> = order.cells[from..=to].iter().map(|c| (c.col as i64, c.row as i64)).collect();
    let diameter_sq = if pts.len() <= EXHAUSTIVE_BLOB_CAP { diameter_exhaustive(&pts) } else { diameter_hull(&pts) };
    let area = pts.len() as u64;
    Ok(BlobMetrics { area, diameter_sq, elongation: Rational::new(diameter_sq as i128, area as i128) })
}

fn dist2(a: (i64, i64), b: (i64, i64)) -> u64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    (dx * dx + dy * dy) as u64
}

fn diameter_exhaustive(pts: &[(i64, i64)]) -> u64 {
    let mut best = 0;
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            best = best.max(dist2(a, b));
        }
    }
    best
}

/// Diameter via the convex hull and rotating calipers.
fn diameter_hull(pts: &[(i64, i64)]) -> u64 {
    let hull = convex_hull(pts);
    let n = hull.len();
    if n <= 2 {
        return diameter_exhaustive(&hull);
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut best = 0;
    let mut j = 1;
    for i in 0..n {
        let ni = (i + 1) % n;
        while cross(hull[i], hull[ni], hull[(j + 1) % n]).abs() > cross(hull[i], hull[ni], hull[j]).abs() {
            j = (j + 1) % n;
        }
        best = best.max(dist2(hull[i], hull[j])).max(dist2(hull[ni], hull[j]));
    }
    best
}

/// Andrew's monotone chain; counter-clockwise, no collinear points.
fn convex_hull(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut p = pts.to_vec();
    p.sort_unstable();
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::FractalCurve;
    use proptest::prelude::*;

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn hilbert() -> ValidCurve {
        FractalCurve::hilbert().into_valid().unwrap()
    }

    #[test]
    fn enclosure_examples() {
        let h = hilbert();
        let e = evaluate(&h, Rational::ZERO, 5).unwrap();
        assert_eq!((e.col, e.row), (0, 0));
        // t = 1/2 sits between fractions 1 and 2; the earlier one wins.
        let e = evaluate(&h, q(1, 2), 1).unwrap();
        assert_eq!((e.col, e.row), (0, 1));
        let e = evaluate(&h, q(1, 3), 8).unwrap();
        assert_eq!(e.side, q(1, 256));
        assert!(e.contains(Point::from_ints(0, 1)));
        assert!(evaluate(&h, q(3, 2), 1).is_err());
    }

    #[test]
    fn exact_examples() {
        let h = hilbert();
        assert_eq!(evaluate_exact(&h, Rational::ZERO).unwrap(), Point::ORIGIN);
        assert_eq!(evaluate_exact(&h, Rational::ONE).unwrap(), Point::from_ints(1, 0));
        assert_eq!(evaluate_exact(&h, q(1, 4)).unwrap(), Point::new(Rational::ZERO, q(1, 2)));
        assert_eq!(evaluate_exact(&h, q(1, 3)).unwrap(), Point::from_ints(0, 1));
        assert_eq!(evaluate_exact(&h, q(1, 2)).unwrap(), Point::new(q(1, 2), q(1, 2)));
    }

    #[test]
    fn scan_examples() {
        let h = hilbert();
        let s1 = scan_order(&h, 1, DEFAULT_SCAN_SIDE_CAP).unwrap();
        let c = |x, y| CellIndex::new(x, y);
        assert_eq!(s1.cells, vec![c(0, 0), c(0, 1), c(1, 1), c(1, 0)]);
        let s0 = scan_order(&h, 0, DEFAULT_SCAN_SIDE_CAP).unwrap();
        assert_eq!(s0.cells, vec![c(0, 0)]);
        let s2 = scan_order(&h, 2, DEFAULT_SCAN_SIDE_CAP).unwrap();
        assert_eq!(&s2.cells[..5], &[c(0, 0), c(1, 0), c(1, 1), c(0, 1), c(0, 2)]);
        assert!(matches!(scan_order(&h, 13, DEFAULT_SCAN_SIDE_CAP), Err(EvalError::GridTooLarge { .. })));
    }

    #[test]
    fn blob_examples() {
        let row = ScanOrder::row_major(8);
        let m = blob_metrics(&row, 3, 3).unwrap();
        assert_eq!((m.area, m.diameter_sq, m.elongation), (1, 0, Rational::ZERO));
        let m = blob_metrics(&row, 3, 4).unwrap();
        assert_eq!((m.area, m.diameter_sq, m.elongation), (2, 1, q(1, 2)));
        let m = blob_metrics(&row, 0, 7).unwrap();
        assert_eq!((m.area, m.diameter_sq, m.elongation), (8, 49, q(49, 8)));
        assert!(blob_metrics(&row, 5, 64).is_err());
    }

    #[test]
    fn calipers_match_exhaustive() {
        let h = hilbert();
        let s = scan_order(&h, 6, DEFAULT_SCAN_SIDE_CAP).unwrap();
        let pts: Vec<(i64, i64)> = s.cells[100..3000].iter().map(|c| (c.col as i64, c.row as i64)).collect();
        assert_eq!(diameter_hull(&pts), diameter_exhaustive(&pts));
    }

    proptest! {
        #[test]
        fn hull_diameter_is_exact(pts in proptest::collection::vec((0i64..40, 0i64..40), 1..60)) {
            prop_assert_eq!(diameter_hull(&pts), diameter_exhaustive(&pts));
        }

        #[test]
        fn exact_point_lies_in_enclosures(n in 0i128..=360, depth in 0u32..7) {
            let h = hilbert();
            let t = q(n, 360);
            let p = evaluate_exact(&h, t).unwrap();
            prop_assert!(evaluate(&h, t, depth).unwrap().contains(p));
        }
    }
}
