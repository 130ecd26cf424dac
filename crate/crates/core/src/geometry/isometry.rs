//! The dihedral group of the unit square.
//!
//! Every element is stored as an optional coordinate swap followed by
//! optional per-axis flips `c ↦ 1 − c`. That form makes composition,
//! inversion and the induced action on integer grids (cells and vertices of a
//! `k × k` subdivision) one-liners.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Point, Rational};

/// One of the eight symmetries of `[0,1]²`.
///
/// Rotations are counter-clockwise about `(1/2, 1/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Isometry {
    /// Identity.
    E,
    /// Rotation by 90°.
    R1,
    /// Rotation by 180°.
    R2,
    /// Rotation by 270°.
    R3,
    /// Reflection across `y = 1/2`.
    Mx,
    /// Reflection across `x = 1/2`.
    My,
    /// Reflection across the main diagonal `y = x`.
    Md,
    /// Reflection across the anti-diagonal `y = 1 − x`.
    Ma,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown isometry code `{0}` (valid codes: e, r1, r2, r3, mx, my, md, ma)")]
pub struct UnknownIsometry(pub String);

impl Isometry {
    pub const ALL: [Isometry; 8] = [
        Isometry::E,
        Isometry::R1,
        Isometry::R2,
        Isometry::R3,
        Isometry::Mx,
        Isometry::My,
        Isometry::Md,
        Isometry::Ma,
    ];

    pub const fn code(self) -> &'static str {
        match self {
            Isometry::E => "e",
            Isometry::R1 => "r1",
            Isometry::R2 => "r2",
            Isometry::R3 => "r3",
            Isometry::Mx => "mx",
            Isometry::My => "my",
            Isometry::Md => "md",
            Isometry::Ma => "ma",
        }
    }

    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Isometry {
        Isometry::ALL[i]
    }

    /// `(swap, flip_x, flip_y)`: first optionally swap coordinates, then flip
    /// the selected axes.
    const fn parts(self) -> (bool, bool, bool) {
        match self {
            Isometry::E => (false, false, false),
            Isometry::R1 => (true, true, false),
            Isometry::R2 => (false, true, true),
            Isometry::R3 => (true, false, true),
            Isometry::Mx => (false, false, true),
            Isometry::My => (false, true, false),
            Isometry::Md => (true, false, false),
            Isometry::Ma => (true, true, true),
        }
    }

    /// True for the four orientation-preserving elements.
    pub fn is_rotation(self) -> bool {
        matches!(self, Isometry::E | Isometry::R1 | Isometry::R2 | Isometry::R3)
    }

    /// Image of a point; `p` may lie outside the square.
    pub fn apply(self, p: Point) -> Point {
        self.apply_in(p, Rational::ONE)
    }

    /// Action on the square `[0, side]²` (same symmetry, scaled).
    pub fn apply_in(self, p: Point, side: Rational) -> Point {
        let (swap, fx, fy) = self.parts();
        let (a, b) = if swap { (p.y, p.x) } else { (p.x, p.y) };
        Point::new(if fx { side - a } else { a }, if fy { side - b } else { b })
    }

    /// Action on integer coordinates of `[0, side]²`; with `side = k − 1` it
    /// permutes the cells of a `k × k` grid, with `side = k` its vertices.
    pub fn apply_int(self, (x, y): (i64, i64), side: i64) -> (i64, i64) {
        let (swap, fx, fy) = self.parts();
        let (a, b) = if swap { (y, x) } else { (x, y) };
        (if fx { side - a } else { a }, if fy { side - b } else { b })
    }

    /// Linear part applied to a displacement vector.
    pub fn apply_vector(self, (x, y): (i64, i64)) -> (i64, i64) {
        let (swap, fx, fy) = self.parts();
        let (a, b) = if swap { (y, x) } else { (x, y) };
        (if fx { -a } else { a }, if fy { -b } else { b })
    }

    /// Linear part applied to a rational displacement.
    pub fn apply_vector_q(self, v: (Rational, Rational)) -> (Rational, Rational) {
        let (swap, fx, fy) = self.parts();
        let (a, b) = if swap { (v.1, v.0) } else { (v.0, v.1) };
        (if fx { -a } else { a }, if fy { -b } else { b })
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: Isometry) -> Isometry {
        COMPOSE[self.index()][other.index()]
    }

    pub fn inverse(self) -> Isometry {
        INVERSE[self.index()]
    }

    /// Permutation of the vertex indices `0..4` (vertex `v` is `(v & 1, v >> 1)`).
    pub fn vertex_permutation(self) -> [u8; 4] {
        let mut out = [0u8; 4];
        for (v, slot) in out.iter_mut().enumerate() {
            let (x, y) = self.apply_int(vertex_coords(v as u8), 1);
            *slot = vertex_index(x, y);
        }
        out
    }
}

/// Coordinates of unit-square vertex `v`.
pub const fn vertex_coords(v: u8) -> (i64, i64) {
    ((v & 1) as i64, (v >> 1) as i64)
}

pub const fn vertex_index(x: i64, y: i64) -> u8 {
    (x as u8) | ((y as u8) << 1)
}

const fn compose_parts(a: (bool, bool, bool), b: (bool, bool, bool)) -> (bool, bool, bool) {
    // b: (x,y) -> swap_b -> flips_b ; then a: swap_a -> flips_a.
    // Moving a's swap past b's flips exchanges which axis b flipped.
    let (sa, ax, ay) = a;
    let (sb, bx, by) = b;
    let (bx, by) = if sa { (by, bx) } else { (bx, by) };
    (sa ^ sb, ax ^ bx, ay ^ by)
}

const fn build_compose() -> [[Isometry; 8]; 8] {
    let mut table = [[Isometry::E; 8]; 8];
    let mut i = 0;
    while i < 8 {
        let mut j = 0;
        while j < 8 {
            let p = compose_parts(Isometry::ALL[i].parts(), Isometry::ALL[j].parts());
            let mut k = 0;
            while k < 8 {
                let q = Isometry::ALL[k].parts();
                if q.0 == p.0 && q.1 == p.1 && q.2 == p.2 {
                    table[i][j] = Isometry::ALL[k];
                }
                k += 1;
            }
            j += 1;
        }
        i += 1;
    }
    table
}

const COMPOSE: [[Isometry; 8]; 8] = build_compose();

const fn build_inverse() -> [Isometry; 8] {
    let mut inv = [Isometry::E; 8];
    let mut i = 0;
    while i < 8 {
        let mut j = 0;
        while j < 8 {
            if matches!(COMPOSE[i][j], Isometry::E) {
                inv[i] = Isometry::ALL[j];
            }
            j += 1;
        }
        i += 1;
    }
    inv
}

const INVERSE: [Isometry; 8] = build_inverse();

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Isometry {
    type Err = UnknownIsometry;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Isometry::ALL
            .iter()
            .copied()
            .find(|g| g.code() == s)
            .ok_or_else(|| UnknownIsometry(s.to_string()))
    }
}

impl Serialize for Isometry {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for Isometry {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn corners() -> Vec<Point> {
        (0..4u8)
            .map(|v| {
                let (x, y) = vertex_coords(v);
                Point::from_ints(x, y)
            })
            .collect()
    }

    #[test]
    fn apply_examples() {
        let p = Point::new(q(1, 3), q(1, 4));
        assert_eq!(Isometry::E.apply(p), p);
        assert_eq!(Isometry::R1.apply(Point::from_ints(1, 0)), Point::from_ints(1, 1));
        assert_eq!(Isometry::Md.apply(Point::from_ints(1, 0)), Point::from_ints(0, 1));
        assert_eq!(Isometry::Ma.apply(Point::from_ints(0, 0)), Point::from_ints(1, 1));
        assert_eq!(Isometry::Mx.apply(Point::new(q(1, 4), q(1, 4))), Point::new(q(1, 4), q(3, 4)));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(Isometry::E.compose(Isometry::R1), Isometry::R1);
        assert_eq!(Isometry::R1.compose(Isometry::R3), Isometry::E);
        // Pointwise check on the vertices rather than trusting the table.
        for p in corners() {
            assert_eq!(Isometry::R2.apply(p), Isometry::Mx.apply(Isometry::My.apply(p)));
        }
        assert_eq!(Isometry::Mx.compose(Isometry::My), Isometry::R2);
        assert_eq!(Isometry::R1.compose(Isometry::R1), Isometry::R2);
    }

    #[test]
    fn rotations_rotate_counter_clockwise() {
        // (1,0) -> (1,1) -> (0,1) -> (0,0)
        let mut p = Point::from_ints(1, 0);
        let expect = [(1, 1), (0, 1), (0, 0), (1, 0)];
        for (x, y) in expect {
            p = Isometry::R1.apply(p);
            assert_eq!(p, Point::from_ints(x, y));
        }
        assert_eq!(Isometry::R3.apply(Point::from_ints(1, 0)), Point::from_ints(0, 0));
    }

    #[test]
    fn group_laws() {
        for a in Isometry::ALL {
            assert_eq!(Isometry::E.compose(a), a);
            assert_eq!(a.compose(Isometry::E), a);
            assert_eq!(a.compose(a.inverse()), Isometry::E);
            assert_eq!(a.inverse().compose(a), Isometry::E);
            for b in Isometry::ALL {
                for c in Isometry::ALL {
                    assert_eq!(a.compose(b).compose(c), a.compose(b.compose(c)));
                }
            }
        }
    }

    #[test]
    fn action_is_faithful_on_vertices() {
        let mut perms: Vec<[u8; 4]> = Isometry::ALL.iter().map(|g| g.vertex_permutation()).collect();
        perms.sort();
        perms.dedup();
        assert_eq!(perms.len(), 8);
    }

    #[test]
    fn integer_action_matches_rational_action() {
        for g in Isometry::ALL {
            for cell in [(0, 0), (2, 1), (1, 2)] {
                let side = 3i64;
                let center = Point::new(
                    q(2 * cell.0 as i128 + 1, 2 * side as i128),
                    q(2 * cell.1 as i128 + 1, 2 * side as i128),
                );
                let (cx, cy) = g.apply_int(cell, side - 1);
                let expect = Point::new(
                    q(2 * cx as i128 + 1, 2 * side as i128),
                    q(2 * cy as i128 + 1, 2 * side as i128),
                );
                assert_eq!(g.apply(center), expect, "{g}");
            }
        }
    }

    #[test]
    fn codes_round_trip() {
        for g in Isometry::ALL {
            assert_eq!(g.code().parse::<Isometry>().unwrap(), g);
        }
        let err = "rot".parse::<Isometry>().unwrap_err();
        assert!(err.to_string().contains("e, r1, r2, r3, mx, my, md, ma"));
    }

    proptest! {
        #[test]
        fn compose_agrees_pointwise(a in 0usize..8, b in 0usize..8, xn in -5i128..10, yn in -5i128..10) {
            let (a, b) = (Isometry::from_index(a), Isometry::from_index(b));
            let p = Point::new(q(xn, 7), q(yn, 5));
            prop_assert_eq!(a.compose(b).apply(p), a.apply(b.apply(p)));
        }
    }
}
