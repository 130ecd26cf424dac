//! Regular fractal Peano curves of genus `k²`.
//!
//! A curve is described by its base divisor `k` and, for every first-order
//! fraction in time order, the cell it occupies, the symmetry of the square
//! that carries the whole curve onto that cell, and whether the copy runs
//! backwards in time. The curve is the unique fixed point of that
//! description:
//!
//! ```text
//! f(t) = A_i( f(σ_i(g·t − i)) )   for t ∈ [i/g, (i+1)/g],
//! A_i(p) = (cell_i + iso_i(p)) / k,
//! σ_i(s) = s, or 1 − s when fraction i is reversed.
//! ```
//!
//! [`FractalCurve`] is the raw description. [`FractalCurve::validate`] checks
//! it; [`ValidCurve`] caches what every downstream computation needs
//! (entry/exit vertices, corner moments) and is the type most of the crate
//! operates on.

mod frame;
mod symmetry;
mod validate;

pub use frame::{Acceleration, Frame, FractionPath, Shape, Turn};
pub(crate) use frame::classify_turn;
pub use validate::{Adjacency, ValidationFailure, ValidationReport};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{solve_linear, vertex_coords, Isometry, Point, Rational};

/// Index of a cell in the `k × k` grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct CellIndex {
    pub col: u32,
    pub row: u32,
}

impl From<[u32; 2]> for CellIndex {
    fn from([col, row]: [u32; 2]) -> CellIndex {
        CellIndex { col, row }
    }
}

impl From<CellIndex> for [u32; 2] {
    fn from(c: CellIndex) -> [u32; 2] {
        [c.col, c.row]
    }
}

impl CellIndex {
    pub const fn new(col: u32, row: u32) -> CellIndex {
        CellIndex { col, row }
    }

    pub(crate) fn as_i64(self) -> (i64, i64) {
        (self.col as i64, self.row as i64)
    }
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.col, self.row)
    }
}

/// One first-order fraction: where it sits, how it is turned, which way it runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FractionSpec {
    pub cell: CellIndex,
    pub iso: Isometry,
    pub reversed: bool,
}

impl Serialize for FractionSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("FractionSpec", 3)?;
        st.serialize_field("cell", &self.cell)?;
        st.serialize_field("iso", &self.iso)?;
        st.serialize_field("rev", &self.reversed)?;
        st.end()
    }
}

impl FractionSpec {
    pub const fn new(cell: CellIndex, iso: Isometry, reversed: bool) -> FractionSpec {
        FractionSpec { cell, iso, reversed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CurveError {
    #[error("base divisor must be at least 2, got {0}")]
    DivisorTooSmall(u32),
    #[error("a curve with k = {k} needs {expected} fractions, got {got}")]
    FractionCount { k: u32, expected: usize, got: usize },
    #[error("fraction {index}: cell {cell} outside the {k}x{k} grid")]
    CellOutOfRange { index: usize, cell: CellIndex, k: u32 },
    #[error("path digit {digit} at position {position} is not below the genus {genus}")]
    BadPathDigit { position: usize, digit: u32, genus: u32 },
    #[error("fraction index {index} out of range for genus {genus}")]
    BadFractionIndex { index: usize, genus: u32 },
    #[error("entry and exit coincide at {0}")]
    CoincidentEndpoints(Point),
    #[error("paths of different orders {0} and {1}")]
    OrderMismatch(usize, usize),
    #[error("fraction displacement {0:?} is not axis-aligned")]
    NotAxisAligned((Rational, Rational)),
}

/// Structurally well-formed description of a regular fractal curve.
///
/// Construction checks only shape (divisor, fraction count, cell bounds);
/// geometric validity is the job of [`FractalCurve::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FractalCurve {
    k: u32,
    fractions: Vec<FractionSpec>,
}

impl FractalCurve {
    pub fn new(k: u32, fractions: Vec<FractionSpec>) -> Result<FractalCurve, CurveError> {
        if k < 2 {
            return Err(CurveError::DivisorTooSmall(k));
        }
        let expected = (k * k) as usize;
        if fractions.len() != expected {
            return Err(CurveError::FractionCount { k, expected, got: fractions.len() });
        }
        for (index, f) in fractions.iter().enumerate() {
            if f.cell.col >= k || f.cell.row >= k {
                return Err(CurveError::CellOutOfRange { index, cell: f.cell, k });
            }
        }
        Ok(FractalCurve { k, fractions })
    }

    /// The Hilbert curve: enters at `(0,0)`, leaves at `(1,0)`.
    pub fn hilbert() -> FractalCurve {
        let f = |c, r, iso| FractionSpec::new(CellIndex::new(c, r), iso, false);
        FractalCurve::new(
            2,
            vec![f(0, 0, Isometry::Md), f(0, 1, Isometry::E), f(1, 1, Isometry::E), f(1, 0, Isometry::Ma)],
        )
        .expect("hilbert description is well formed")
    }

    /// Peano's original serpentine curve of genus 9, entering at `(0,0)` and
    /// leaving at `(1,1)`.
    pub fn peano() -> FractalCurve {
        let f = |c, r, iso| FractionSpec::new(CellIndex::new(c, r), iso, false);
        use Isometry::{Mx, My, R2, E};
        FractalCurve::new(
            3,
            vec![
                f(0, 0, E),
                f(0, 1, My),
                f(0, 2, E),
                f(1, 2, Mx),
                f(1, 1, R2),
                f(1, 0, Mx),
                f(2, 0, E),
                f(2, 1, My),
                f(2, 2, E),
            ],
        )
        .expect("peano description is well formed")
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of first-order fractions, `k²`.
    pub fn genus(&self) -> u32 {
        self.k * self.k
    }

    pub fn fractions(&self) -> &[FractionSpec] {
        &self.fractions
    }

    /// First-order contraction `A_i` applied to `p`.
    pub fn fraction_map(&self, i: usize, p: Point) -> Point {
        let f = &self.fractions[i];
        let k = Rational::from(self.k as i64);
        let c = Point::from_ints(f.cell.col as i64, f.cell.row as i64);
        (c + f.iso.apply(p)).scale(k.recip())
    }

    /// Entry and exit points, solved exactly from the fixed-point system
    ///
    /// `E = A₀(E or X)`, `X = A_{g−1}(X or E)`
    ///
    /// (the argument is `X` for a reversed end fraction). The system is a
    /// contraction, so the solution always exists and is unique.
    pub fn entry_exit(&self) -> (Point, Point) {
        let g = self.fractions.len();
        let k = Rational::from(self.k as i64);
        let inv_k = k.recip();
        // Unknowns: [Ex, Ey, Xx, Xy].
        let mut a = vec![vec![Rational::ZERO; 4]; 4];
        let mut b = vec![Rational::ZERO; 4];
        let rows = [(0usize, 0usize, self.fractions[0].reversed), (2, g - 1, !self.fractions[g - 1].reversed)];
        for (lhs, frac, uses_x) in rows {
            // lhs_point = (c + L q + c_iso) / k with q = X if uses_x else E.
            let f = &self.fractions[frac];
            let q = if uses_x { 2 } else { 0 };
            let c_iso = f.iso.apply(Point::ORIGIN);
            let col_x = f.iso.apply_vector_q((Rational::ONE, Rational::ZERO));
            let col_y = f.iso.apply_vector_q((Rational::ZERO, Rational::ONE));
            for (r, (cell, ciso)) in [(f.cell.col, c_iso.x), (f.cell.row, c_iso.y)].into_iter().enumerate() {
                let row = lhs + r;
                a[row][row] += Rational::ONE;
                let (lx, ly) = if r == 0 { (col_x.0, col_y.0) } else { (col_x.1, col_y.1) };
                a[row][q] -= lx * inv_k;
                a[row][q + 1] -= ly * inv_k;
                b[row] = (Rational::from(cell as i64) + ciso) * inv_k;
            }
        }
        let sol = solve_linear(a, b).expect("contraction system is nonsingular");
        (Point::new(sol[0], sol[1]), Point::new(sol[2], sol[3]))
    }

    /// Entry and exit of first-order fraction `i`, given the curve's own.
    pub fn fraction_endpoints(&self, i: usize, entry: Point, exit: Point) -> (Point, Point) {
        let f = &self.fractions[i];
        let (s, e) = if f.reversed { (exit, entry) } else { (entry, exit) };
        (self.fraction_map(i, s), self.fraction_map(i, e))
    }

    /// Checks regular partition, continuity and the vertex endpoints.
    pub fn validate(&self) -> ValidationReport {
        validate::validate(self)
    }

    /// Validates and caches the data derived from a valid description.
    pub fn into_valid(self) -> Result<ValidCurve, ValidationReport> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(report);
        }
        Ok(ValidCurve::from_checked(self))
    }

    /// Index of the fraction occupying `cell`, if any.
    pub fn fraction_at(&self, cell: CellIndex) -> Option<usize> {
        self.fractions.iter().position(|f| f.cell == cell)
    }
}

/// Diagonal curves enter and leave at opposite corners, one-sided curves at
/// the two ends of one side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveClass {
    Diagonal,
    OneSided,
}

/// Classifies a pair of entry/exit vertices.
pub fn classify_endpoints(entry: Point, exit: Point) -> Result<CurveClass, CurveError> {
    if entry == exit {
        return Err(CurveError::CoincidentEndpoints(entry));
    }
    let d = crate::geometry::squared_distance(entry, exit);
    Ok(if d == Rational::from_int(2) { CurveClass::Diagonal } else { CurveClass::OneSided })
}

/// The time at which the curve passes one vertex of its square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CornerMoment {
    pub vertex: Point,
    pub time: Rational,
}

/// A curve that passed validation, with its derived invariants cached.
///
/// Vertices of the unit square are indexed `v = x + 2y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ValidCurve {
    curve: FractalCurve,
    entry: u8,
    exit: u8,
    class: CurveClass,
    /// Passage time of each vertex, indexed by vertex.
    corner_times: [Rational; 4],
    /// Vertex indices in order of passage.
    order: [u8; 4],
    /// Common denominator of the corner times.
    q: i128,
    /// `corner_times[v] · q`.
    corner_num: [i128; 4],
}

impl ValidCurve {
    fn from_checked(curve: FractalCurve) -> ValidCurve {
        let (e, x) = curve.entry_exit();
        let to_vertex = |p: Point| {
            let (px, py) = p.to_grid(1).expect("validated endpoints are vertices");
            crate::geometry::vertex_index(px, py)
        };
        let class = classify_endpoints(e, x).expect("validated endpoints are distinct");
        let corner_times = frame::solve_corner_times(&curve);
        let mut order = [0u8, 1, 2, 3];
        order.sort_by(|&a, &b| corner_times[a as usize].cmp(&corner_times[b as usize]));
        let q = corner_times
            .iter()
            .fold(1i128, |acc, t| num_integer::Integer::lcm(&acc, &t.denom()));
        let corner_num = corner_times.map(|t| t.numer() * (q / t.denom()));
        ValidCurve { entry: to_vertex(e), exit: to_vertex(x), class, corner_times, order, q, corner_num, curve }
    }

    pub fn curve(&self) -> &FractalCurve {
        &self.curve
    }

    pub fn into_curve(self) -> FractalCurve {
        self.curve
    }

    pub fn k(&self) -> u32 {
        self.curve.k
    }

    pub fn genus(&self) -> u32 {
        self.curve.genus()
    }

    pub fn fractions(&self) -> &[FractionSpec] {
        &self.curve.fractions
    }

    pub fn entry_vertex(&self) -> u8 {
        self.entry
    }

    pub fn exit_vertex(&self) -> u8 {
        self.exit
    }

    pub fn entry_exit(&self) -> (Point, Point) {
        let p = |v: u8| {
            let (x, y) = vertex_coords(v);
            Point::from_ints(x, y)
        };
        (p(self.entry), p(self.exit))
    }

    pub fn class(&self) -> CurveClass {
        self.class
    }

    /// Passage times of the four vertices, in increasing time order
    /// (`A, B, C, D`: entry, two internal vertices, exit).
    pub fn corner_moments(&self) -> [CornerMoment; 4] {
        self.order.map(|v| {
            let (x, y) = vertex_coords(v);
            CornerMoment { vertex: Point::from_ints(x, y), time: self.corner_times[v as usize] }
        })
    }

    /// Passage time of vertex `v` (index `x + 2y`).
    pub fn corner_time(&self, v: u8) -> Rational {
        self.corner_times[v as usize]
    }

    /// Vertex indices in passage order.
    pub fn vertex_order(&self) -> [u8; 4] {
        self.order
    }

    /// Common denominator `Q` of the corner times, and the numerators
    /// `τ_v · Q` indexed by vertex. Integer kernels work in units of `1/Q`.
    pub fn corner_numerators(&self) -> (i128, [i128; 4]) {
        (self.q, self.corner_num)
    }

    /// The time-reversed curve, also valid.
    pub fn reversed(&self) -> ValidCurve {
        ValidCurve::from_checked(self.curve.reversed())
    }

    /// The curve carried by a symmetry of the square, also valid.
    pub fn conjugated(&self, h: Isometry) -> ValidCurve {
        ValidCurve::from_checked(self.curve.conjugated(h))
    }
}

impl fmt::Display for FractalCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} [", self.k)?;
        for (i, fr) in self.fractions.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}{}{}", fr.cell.col, fr.cell.row, fr.iso, if fr.reversed { "'" } else { "" })?;
        }
        f.write_str("]")
    }
}
