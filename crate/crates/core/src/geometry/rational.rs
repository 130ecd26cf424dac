use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational number in lowest terms with a positive denominator.
///
/// Backed by `i128`. Every arithmetic operator is overflow-checked and panics
/// with a descriptive message rather than wrapping; comparisons never overflow
/// (they fall back to big integers when the cross products do not fit).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer in rational literal `{0}`")]
    BadInteger(String),
    #[error("zero denominator in rational literal `{0}`")]
    ZeroDenominator(String),
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Builds `num / den`, reducing to lowest terms.
    ///
    /// Panics if `den == 0`.
    pub fn new(num: i128, den: i128) -> Rational {
        assert!(den != 0, "rational with zero denominator");
        let g = num.gcd(&den);
        let (mut n, mut d) = if g == 0 { (0, 1) } else { (num / g, den / g) };
        if d < 0 {
            n = n.checked_neg().expect("rational overflow");
            d = d.checked_neg().expect("rational overflow");
        }
        Rational { num: n, den: d }
    }

    pub const fn from_int(n: i128) -> Rational {
        Rational { num: n, den: 1 }
    }

    pub const fn numer(&self) -> i128 {
        self.num
    }

    pub const fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn abs(self) -> Rational {
        if self.num < 0 {
            -self
        } else {
            self
        }
    }

    pub fn recip(self) -> Rational {
        assert!(self.num != 0, "reciprocal of zero");
        Rational::new(self.den, self.num)
    }

    /// Largest integer not exceeding `self`.
    pub fn floor(self) -> i128 {
        Integer::div_floor(&self.num, &self.den)
    }

    /// Smallest integer not below `self`.
    pub fn ceil(self) -> i128 {
        Integer::div_ceil(&self.num, &self.den)
    }

    pub fn pow(self, exp: u32) -> Rational {
        let mut acc = Rational::ONE;
        for _ in 0..exp {
            acc = acc * self;
        }
        acc
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn checked_add(self, rhs: Rational) -> Option<Rational> {
        let g = self.den.gcd(&rhs.den);
        let l = (self.den / g).checked_mul(rhs.den)?;
        let a = self.num.checked_mul(l / self.den)?;
        let b = rhs.num.checked_mul(l / rhs.den)?;
        Some(Rational::new(a.checked_add(b)?, l))
    }

    pub fn checked_mul(self, rhs: Rational) -> Option<Rational> {
        // Cross-reduce first to keep intermediates small.
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let (g1, g2) = (g1.max(1), g2.max(1));
        let n = (self.num / g1).checked_mul(rhs.num / g2)?;
        let d = (self.den / g2).checked_mul(rhs.den / g1)?;
        Some(Rational::new(n, d))
    }

    pub fn checked_div(self, rhs: Rational) -> Option<Rational> {
        if rhs.num == 0 {
            return None;
        }
        self.checked_mul(Rational::new(rhs.den, rhs.num))
    }

    fn big_cmp(&self, other: &Rational) -> Ordering {
        let l = BigInt::from(self.num) * BigInt::from(other.den);
        let r = BigInt::from(other.num) * BigInt::from(self.den);
        l.cmp(&r)
    }
}

/// Compares `a / b` with `c / d` for positive `b`, `d` without overflow.
pub fn cmp_fractions(a: i128, b: i128, c: i128, d: i128) -> Ordering {
    debug_assert!(b > 0 && d > 0);
    match (a.checked_mul(d), c.checked_mul(b)) {
        (Some(l), Some(r)) => l.cmp(&r),
        _ => (BigInt::from(a) * BigInt::from(d)).cmp(&(BigInt::from(c) * BigInt::from(b))),
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl From<i128> for Rational {
    fn from(n: i128) -> Self {
        Rational::from_int(n)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n as i128)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_int(n as i128)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        match (self.num.checked_mul(other.den), other.num.checked_mul(self.den)) {
            (Some(l), Some(r)) => l.cmp(&r),
            _ => self.big_cmp(other),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        self.checked_add(rhs).expect("rational overflow in addition")
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        self.checked_add(-rhs).expect("rational overflow in subtraction")
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        self.checked_mul(rhs).expect("rational overflow in multiplication")
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "rational division by zero");
        self.checked_div(rhs).expect("rational overflow in division")
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: self.num.checked_neg().expect("rational overflow in negation"),
            den: self.den,
        }
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = *self + rhs;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self = *self - rhs;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Rational {
    /// Always `num/den`, including integers (`3/1`), so output stays uniform.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `n`, `n/d`, and plain decimals such as `0.001`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let int = |t: &str| {
            t.trim()
                .parse::<i128>()
                .map_err(|_| ParseRationalError::BadInteger(s.to_string()))
        };
        if let Some((n, d)) = s.split_once('/') {
            let (n, d) = (int(n)?, int(d)?);
            if d == 0 {
                return Err(ParseRationalError::ZeroDenominator(s.to_string()));
            }
            return Ok(Rational::new(n, d));
        }
        if let Some((whole, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 30 {
                return Err(ParseRationalError::BadInteger(s.to_string()));
            }
            let negative = whole.trim_start().starts_with('-');
            let w = if whole.is_empty() || whole == "-" { 0 } else { int(whole)? };
            let scale = 10i128.pow(frac.len() as u32);
            let f = int(frac)?;
            let mag = w.abs() * scale + f;
            return Ok(Rational::new(if negative { -mag } else { mag }, scale));
        }
        Ok(Rational::from_int(int(s)?))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn normalizes_sign_and_terms() {
        assert_eq!(r(2, -4), r(-1, 2));
        assert_eq!(r(0, -7), Rational::ZERO);
        assert_eq!(r(6, 3).denom(), 1);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("1/1000".parse::<Rational>().unwrap(), r(1, 1000));
        assert_eq!("0.001".parse::<Rational>().unwrap(), r(1, 1000));
        assert_eq!("-2.5".parse::<Rational>().unwrap(), r(-5, 2));
        assert_eq!("17".parse::<Rational>().unwrap(), r(17, 1));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x/2".parse::<Rational>().is_err());
        assert_eq!(r(17, 3).to_string(), "17/3");
        assert_eq!(Rational::from_int(6).to_string(), "6/1");
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(r(-1, 2).floor(), -1);
        assert_eq!(r(-1, 2).ceil(), 0);
        assert_eq!(r(7, 2).floor(), 3);
        assert_eq!(r(4, 2).ceil(), 2);
    }

    #[test]
    fn comparison_survives_large_cross_products() {
        let big = i128::MAX / 3;
        let a = r(big, big - 1);
        let b = r(big - 1, big - 2);
        assert!(a < b);
        assert_eq!(cmp_fractions(big, 7, big - 1, 7), Ordering::Greater);
    }

    proptest! {
        #[test]
        fn field_laws(a in -1000i128..1000, b in 1i128..1000, c in -1000i128..1000, d in 1i128..1000) {
            let x = r(a, b);
            let y = r(c, d);
            prop_assert_eq!(x + y - y, x);
            if !y.is_zero() {
                prop_assert_eq!(x * y / y, x);
            }
            prop_assert_eq!(x < y, a * d < c * b);
            prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
        }
    }
}
