use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rational;

/// A point of the plane with exact rational coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

/// Serialized as `["x", "y"]`.
impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.x, self.y).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (x, y) = <(Rational, Rational)>::deserialize(deserializer)?;
        Ok(Point { x, y })
    }
}

impl Point {
    pub const ORIGIN: Point = Point { x: Rational::ZERO, y: Rational::ZERO };

    pub const fn new(x: Rational, y: Rational) -> Point {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Point {
        Point::new(Rational::from(x), Rational::from(y))
    }

    pub fn scale(self, s: Rational) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    /// Integer coordinates scaled by `1 / unit`, when both are integral
    /// multiples of it.
    pub fn to_grid(self, unit: i128) -> Option<(i64, i64)> {
        let x = self.x * Rational::from_int(unit);
        let y = self.y * Rational::from_int(unit);
        (x.is_integer() && y.is_integer()).then(|| (x.numer() as i64, y.numer() as i64))
    }
}

/// Exact `(p.x − q.x)² + (p.y − q.y)²`.
pub fn squared_distance(p: Point, q: Point) -> Rational {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    dx * dx + dy * dy
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}
