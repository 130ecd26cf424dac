//! Fractions of arbitrary order, addressed by digit paths, and the
//! combinatorial data attached to them: corner moments, displacement,
//! N/Z shape, acceleration.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CurveError, FractalCurve, ValidCurve};
use crate::geometry::{solve_linear, vertex_coords, Isometry, Point, Rational, Similarity};

/// Address of an order-`n` fraction: `n` base-`g` digits in time order.
///
/// Digit `j` at position `m` selects the `j`-th sub-period (in global time)
/// of the fraction addressed by the first `m` digits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FractionPath(pub Vec<u32>);

impl FractionPath {
    pub fn root() -> FractionPath {
        FractionPath(Vec::new())
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, digit: u32) -> FractionPath {
        let mut d = self.0.clone();
        d.push(digit);
        FractionPath(d)
    }

    /// Digits of period `index` at the given order.
    pub fn from_index(mut index: u128, order: usize, genus: u32) -> FractionPath {
        let mut d = vec![0u32; order];
        for slot in d.iter_mut().rev() {
            *slot = (index % genus as u128) as u32;
            index /= genus as u128;
        }
        FractionPath(d)
    }
}

impl From<Vec<u32>> for FractionPath {
    fn from(v: Vec<u32>) -> Self {
        FractionPath(v)
    }
}

impl fmt::Display for FractionPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("]")
    }
}

/// Placement of an order-`depth` fraction, in integer units.
///
/// The fraction's image is the square with lower-left corner `origin · k⁻ⁿ`
/// and side `k⁻ⁿ`; the sub-curve there is `iso` applied to a scaled copy of
/// the whole curve, traversed backwards when `reversed`. Its period is
/// `[index · g⁻ⁿ, (index + 1) · g⁻ⁿ]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Frame {
    pub depth: u32,
    pub origin: (i64, i64),
    pub iso: Isometry,
    pub reversed: bool,
    pub index: u128,
}

impl Frame {
    pub const ROOT: Frame = Frame { depth: 0, origin: (0, 0), iso: Isometry::E, reversed: false, index: 0 };

    /// The `j`-th sub-fraction in time order.
    #[inline]
    pub fn child(&self, curve: &FractalCurve, j: usize) -> Frame {
        let g = curve.genus() as usize;
        let base = if self.reversed { g - 1 - j } else { j };
        let f = &curve.fractions()[base];
        let k = curve.k() as i64;
        let (cx, cy) = self.iso.apply_int(f.cell.as_i64(), k - 1);
        Frame {
            depth: self.depth + 1,
            origin: (self.origin.0 * k + cx, self.origin.1 * k + cy),
            iso: self.iso.compose(f.iso),
            reversed: self.reversed ^ f.reversed,
            index: self.index * g as u128 + j as u128,
        }
    }

    /// Position of the base curve's vertex `v` inside this fraction, in
    /// units of `k^{−depth}`.
    #[inline]
    pub fn vertex(&self, v: u8) -> (i64, i64) {
        let (x, y) = self.iso.apply_int(vertex_coords(v), 1);
        (self.origin.0 + x, self.origin.1 + y)
    }

    /// The similarity carrying the unit square onto this fraction's image.
    pub fn similarity(&self, k: u32) -> Similarity {
        let scale = Rational::new(1, (k as i128).pow(self.depth));
        Similarity { scale, iso: self.iso, offset: Point::from_ints(self.origin.0, self.origin.1).scale(scale) }
    }

    /// `[start, end]` of the period.
    pub fn period(&self, genus: u32) -> (Rational, Rational) {
        let len = (genus as i128).pow(self.depth);
        (Rational::new(self.index as i128, len), Rational::new(self.index as i128 + 1, len))
    }

    pub fn path(&self, genus: u32) -> FractionPath {
        FractionPath::from_index(self.index, self.depth as usize, genus)
    }
}

/// Shape of a fraction: direction of the step from its entry to its first
/// internal vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    /// Horizontal first step.
    Z,
    /// Vertical first step.
    N,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceleration {
    /// Reaches its first internal vertex later than it leaves its second one
    /// early: `t₁ − t₀ > t₃ − t₂`.
    Accelerating,
    /// `t₁ − t₀ < t₃ − t₂`.
    Decelerating,
    /// `t₁ − t₀ = t₃ − t₂`.
    Neutral,
}

impl Acceleration {
    pub fn reversed(self) -> Acceleration {
        match self {
            Acceleration::Accelerating => Acceleration::Decelerating,
            Acceleration::Decelerating => Acceleration::Accelerating,
            Acceleration::Neutral => Acceleration::Neutral,
        }
    }
}

/// Kind of change of displacement between two consecutive fractions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Turn {
    Straight,
    /// Displacements orthogonal.
    Side,
    /// Displacements opposite.
    Back,
    /// Anything else (only possible for invalid or mixed data).
    Other,
}

/// Passage time of each unit-square vertex.
///
/// Vertex `v` lies in exactly one corner cell; pulling it back through that
/// fraction gives another vertex `w` and the relation
/// `τ(v) = (i + σ(τ(w))) / g`. The four relations form a nonsingular linear
/// system (coefficients `±1/g`), solved exactly.
pub(super) fn solve_corner_times(curve: &FractalCurve) -> [Rational; 4] {
    let k = curve.k() as i64;
    let g = Rational::from(curve.genus() as i64);
    let mut a = vec![vec![Rational::ZERO; 4]; 4];
    let mut b = vec![Rational::ZERO; 4];
    for v in 0..4u8 {
        let (vx, vy) = vertex_coords(v);
        let cell = super::CellIndex::new((vx * (k - 1)) as u32, (vy * (k - 1)) as u32);
        let i = curve.fraction_at(cell).expect("valid curve covers every corner cell");
        let f = &curve.fractions()[i];
        // Corner of the cell hit by v, in cell-local coordinates, pulled back.
        let local = (vx * k - cell.col as i64, vy * k - cell.row as i64);
        let (wx, wy) = f.iso.inverse().apply_int(local, 1);
        let w = crate::geometry::vertex_index(wx, wy) as usize;
        let row = v as usize;
        a[row][row] += Rational::ONE;
        let sign = if f.reversed { -Rational::ONE } else { Rational::ONE };
        a[row][w] -= sign / g;
        b[row] = (Rational::from(i as i64) + if f.reversed { Rational::ONE } else { Rational::ZERO }) / g;
    }
    let sol = solve_linear(a, b).expect("corner system is nonsingular");
    [sol[0], sol[1], sol[2], sol[3]]
}

impl ValidCurve {
    /// Frame of the fraction addressed by `path`.
    pub fn fraction_frame(&self, path: &FractionPath) -> Result<Frame, CurveError> {
        let genus = self.genus();
        let mut frame = Frame::ROOT;
        for (position, &digit) in path.0.iter().enumerate() {
            if digit >= genus {
                return Err(CurveError::BadPathDigit { position, digit, genus });
            }
            frame = frame.child(self.curve(), digit as usize);
        }
        Ok(frame)
    }

    /// All fractions of the given order, in time order.
    pub fn frames_of_order(&self, order: u32) -> Vec<Frame> {
        let mut level = vec![Frame::ROOT];
        for _ in 0..order {
            level = level
                .iter()
                .flat_map(|f| (0..self.genus() as usize).map(move |j| f.child(self.curve(), j)))
                .collect();
        }
        level
    }

    /// Global time of base vertex `v` inside `frame`.
    pub fn frame_vertex_time(&self, frame: &Frame, v: u8) -> Rational {
        let tau = self.corner_time(v);
        let local = if frame.reversed { Rational::ONE - tau } else { tau };
        let len = Rational::new(1, (self.genus() as i128).pow(frame.depth));
        (Rational::from_int(frame.index as i128) + local) * len
    }

    /// Base vertex indices of the frame's corners in the order they are passed.
    pub fn frame_vertex_order(&self, frame: &Frame) -> [u8; 4] {
        let mut o = self.vertex_order();
        if frame.reversed {
            o.reverse();
        }
        o
    }

    /// Points of the frame's four corners in passage order.
    pub fn frame_corner_points(&self, frame: &Frame) -> [Point; 4] {
        let s = Rational::new(1, (self.k() as i128).pow(frame.depth));
        self.frame_vertex_order(frame).map(|v| {
            let (x, y) = frame.vertex(v);
            Point::from_ints(x, y).scale(s)
        })
    }

    /// The second and third vertex passages of the addressed fraction.
    pub fn internal_corner_moments(&self, path: &FractionPath) -> Result<(Rational, Rational), CurveError> {
        let frame = self.fraction_frame(path)?;
        let o = self.frame_vertex_order(&frame);
        Ok((self.frame_vertex_time(&frame, o[1]), self.frame_vertex_time(&frame, o[2])))
    }

    /// Exit point minus entry point of the addressed fraction.
    pub fn displacement(&self, path: &FractionPath) -> Result<(Rational, Rational), CurveError> {
        let frame = self.fraction_frame(path)?;
        Ok(self.frame_displacement(&frame))
    }

    pub fn frame_displacement(&self, frame: &Frame) -> (Rational, Rational) {
        let p = self.frame_corner_points(frame);
        (p[3].x - p[0].x, p[3].y - p[0].y)
    }

    /// Integer displacement in units of `k^{−depth}`.
    pub(crate) fn frame_displacement_int(&self, frame: &Frame) -> (i64, i64) {
        let o = self.frame_vertex_order(frame);
        let (a, d) = (frame.vertex(o[0]), frame.vertex(o[3]));
        (d.0 - a.0, d.1 - a.1)
    }

    pub fn fraction_shape(&self, path: &FractionPath) -> Result<Shape, CurveError> {
        let frame = self.fraction_frame(path)?;
        self.frame_shape(&frame)
    }

    pub fn frame_shape(&self, frame: &Frame) -> Result<Shape, CurveError> {
        let o = self.frame_vertex_order(frame);
        let (a, b) = (frame.vertex(o[0]), frame.vertex(o[1]));
        match (b.0 - a.0, b.1 - a.1) {
            (dx, 0) if dx != 0 => Ok(Shape::Z),
            (0, dy) if dy != 0 => Ok(Shape::N),
            (dx, dy) => Err(CurveError::NotAxisAligned((Rational::from(dx), Rational::from(dy)))),
        }
    }

    /// Acceleration class of the whole curve (forward orientation).
    pub fn base_acceleration(&self) -> Acceleration {
        let o = self.vertex_order();
        let head = self.corner_time(o[1]);
        let tail = Rational::ONE - self.corner_time(o[2]);
        match head.cmp(&tail) {
            std::cmp::Ordering::Greater => Acceleration::Accelerating,
            std::cmp::Ordering::Less => Acceleration::Decelerating,
            std::cmp::Ordering::Equal => Acceleration::Neutral,
        }
    }

    pub fn frame_acceleration(&self, frame: &Frame) -> Acceleration {
        let a = self.base_acceleration();
        if frame.reversed {
            a.reversed()
        } else {
            a
        }
    }

    pub fn acceleration_class(&self, path: &FractionPath) -> Result<Acceleration, CurveError> {
        let frame = self.fraction_frame(path)?;
        Ok(self.frame_acceleration(&frame))
    }

    /// True iff first-order fractions `i` and `i + 1` have different
    /// displacements.
    pub fn is_turn(&self, i: usize) -> Result<bool, CurveError> {
        let g = self.genus();
        if i + 1 >= g as usize {
            return Err(CurveError::BadFractionIndex { index: i, genus: g });
        }
        let a = Frame::ROOT.child(self.curve(), i);
        let b = Frame::ROOT.child(self.curve(), i + 1);
        Ok(self.frame_displacement_int(&a) != self.frame_displacement_int(&b))
    }

    /// Classifies the turn between two frames of the same order.
    pub fn turn_between(&self, a: &Frame, b: &Frame) -> Turn {
        classify_turn(self.frame_displacement_int(a), self.frame_displacement_int(b))
    }
}

pub(crate) fn classify_turn(da: (i64, i64), db: (i64, i64)) -> Turn {
    if da == db {
        Turn::Straight
    } else if da.0 * db.0 + da.1 * db.1 == 0 {
        Turn::Side
    } else if da == (-db.0, -db.1) {
        Turn::Back
    } else {
        Turn::Other
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CellIndex, FractionSpec};

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn hilbert() -> ValidCurve {
        FractalCurve::hilbert().into_valid().unwrap()
    }

    #[test]
    fn empty_path_is_identity() {
        let h = hilbert();
        let f = h.fraction_frame(&FractionPath::root()).unwrap();
        assert_eq!(f, Frame::ROOT);
        assert_eq!(f.similarity(2), Similarity::IDENTITY);
    }

    #[test]
    fn first_fraction_frame() {
        let h = hilbert();
        let f = h.fraction_frame(&vec![0].into()).unwrap();
        assert_eq!((f.origin, f.iso, f.reversed), ((0, 0), Isometry::Md, false));
        assert_eq!(f.period(4), (q(0, 1), q(1, 4)));
    }

    #[test]
    fn second_order_frame_composes_by_hand() {
        // md at (0,0) then, inside it, base fraction 3 (ma at (1,0)).
        let h = hilbert();
        let f = h.fraction_frame(&vec![0, 3].into()).unwrap();
        let by_hand = Similarity { scale: q(1, 2), iso: Isometry::Md, offset: Point::ORIGIN }.then_inner(&Similarity {
            scale: q(1, 2),
            iso: Isometry::Ma,
            offset: Point::new(q(1, 2), Rational::ZERO),
        });
        let sim = f.similarity(2);
        for p in [Point::ORIGIN, Point::from_ints(1, 0), Point::from_ints(0, 1), Point::from_ints(1, 1)] {
            assert_eq!(sim.apply(p), by_hand.apply(p));
        }
        assert_eq!(sim.scale, q(1, 4));
        // md maps cell (1,0) of the quadrant to (0,1): image square [0,1/4]x[1/4,1/2].
        assert_eq!(f.origin, (0, 1));
        assert_eq!(f.period(4), (q(3, 16), q(4, 16)));
    }

    #[test]
    fn bad_digit_rejected() {
        assert!(matches!(
            hilbert().fraction_frame(&vec![0, 4].into()),
            Err(CurveError::BadPathDigit { position: 1, digit: 4, genus: 4 })
        ));
    }

    #[test]
    fn internal_moments_of_hilbert() {
        let h = hilbert();
        assert_eq!(h.internal_corner_moments(&FractionPath::root()).unwrap(), (q(1, 3), q(2, 3)));
        let (a, b) = h.internal_corner_moments(&vec![0].into()).unwrap();
        assert!(Rational::ZERO < a && a < b && b < q(1, 4));
        assert_eq!((a, b), (q(1, 12), q(2, 12)));
    }

    #[test]
    fn reversed_fraction_swaps_moment_roles() {
        // Hilbert satisfies f(1 − s) = my(f(s)), so (md, forward) and
        // (md ∘ my = r3, reversed) describe the same first fraction.
        let mut fr = FractalCurve::hilbert().fractions().to_vec();
        fr[0] = FractionSpec::new(CellIndex::new(0, 0), Isometry::R3, true);
        let c = FractalCurve::new(2, fr).unwrap().into_valid().unwrap();
        let f = c.fraction_frame(&vec![0].into()).unwrap();
        assert!(f.reversed);
        // Reversed frames read the base moments backwards: t = (1 − τ)/4.
        let o = c.frame_vertex_order(&f);
        assert_eq!(o, [1, 3, 2, 0]);
        let (a, b) = c.internal_corner_moments(&vec![0].into()).unwrap();
        assert_eq!((a, b), (q(1, 4) * (Rational::ONE - q(2, 3)), q(1, 4) * (Rational::ONE - q(1, 3))));
        assert_eq!((a, b), hilbert().internal_corner_moments(&vec![0].into()).unwrap());
    }

    #[test]
    fn hilbert_shapes_and_acceleration() {
        let h = hilbert();
        assert_eq!(h.fraction_shape(&FractionPath::root()).unwrap(), Shape::N);
        assert_eq!(h.acceleration_class(&FractionPath::root()).unwrap(), Acceleration::Neutral);
        assert_eq!(h.fraction_shape(&vec![0].into()).unwrap(), Shape::Z);
    }

    #[test]
    fn displacements() {
        let h = hilbert();
        assert_eq!(h.displacement(&FractionPath::root()).unwrap(), (q(1, 1), q(0, 1)));
        assert_eq!(h.displacement(&vec![0].into()).unwrap(), (q(0, 1), q(1, 2)));
        let p = FractalCurve::peano().into_valid().unwrap();
        assert_eq!(p.displacement(&FractionPath::root()).unwrap(), (q(1, 1), q(1, 1)));
    }

    #[test]
    fn hilbert_turns() {
        let h = hilbert();
        // up, right, right, down
        assert_eq!(h.is_turn(0).unwrap(), true);
        assert_eq!(h.is_turn(1).unwrap(), false);
        assert_eq!(h.is_turn(2).unwrap(), true);
        assert!(h.is_turn(3).is_err());
    }

    #[test]
    fn turn_kinds() {
        assert_eq!(classify_turn((0, 1), (0, 1)), Turn::Straight);
        assert_eq!(classify_turn((0, 1), (1, 0)), Turn::Side);
        assert_eq!(classify_turn((0, 1), (0, -1)), Turn::Back);
    }

    #[test]
    fn acceleration_comparison() {
        // t1 - t0 = 2/5 L versus t3 - t2 = 1/5 L.
        let l = q(1, 9);
        let (t0, t1, t2, t3) = (Rational::ZERO, q(2, 5) * l, q(4, 5) * l, l);
        assert!(t1 - t0 > t3 - t2);
    }
}
