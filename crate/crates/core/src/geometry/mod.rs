//! Exact plane geometry: rationals, points, the symmetry group of the square,
//! and the similarity maps that place a sub-curve inside a cell.

mod isometry;
mod point;
mod rational;

pub use isometry::{vertex_coords, vertex_index, Isometry, UnknownIsometry};
pub use point::{squared_distance, Point};
pub use rational::{cmp_fractions, ParseRationalError, Rational};

/// Similarity `p ↦ offset + scale · iso(p)`, where `iso` acts on `[0,1]²`.
///
/// With `scale = k⁻ⁿ` this maps the unit square onto one order-`n` cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Similarity {
    pub scale: Rational,
    pub iso: Isometry,
    pub offset: Point,
}

impl Similarity {
    pub const IDENTITY: Similarity =
        Similarity { scale: Rational::ONE, iso: Isometry::E, offset: Point::ORIGIN };

    pub fn apply(&self, p: Point) -> Point {
        self.offset + self.iso.apply(p).scale(self.scale)
    }

    /// `self ∘ inner`.
    pub fn then_inner(&self, inner: &Similarity) -> Similarity {
        // The composite is again of the form offset' + s·(iso∘iso_i)(p); pin
        // offset' by evaluating both sides at the origin.
        let offset = self.apply(inner.apply(Point::ORIGIN));
        let iso = self.iso.compose(inner.iso);
        let scale = self.scale * inner.scale;
        let corr = iso.apply(Point::ORIGIN).scale(scale);
        Similarity { scale, iso, offset: offset - corr }
    }

    /// Unique fixed point of a contraction (`scale < 1`).
    pub fn fixed_point(&self) -> Point {
        // p = offset + s·(L p + c) with iso(p) = L p + c.
        let c = self.iso.apply(Point::ORIGIN);
        let col_x = self.iso.apply_vector_q((Rational::ONE, Rational::ZERO));
        let col_y = self.iso.apply_vector_q((Rational::ZERO, Rational::ONE));
        let s = self.scale;
        let a = [
            [Rational::ONE - s * col_x.0, -(s * col_y.0)],
            [-(s * col_x.1), Rational::ONE - s * col_y.1],
        ];
        let b = [self.offset.x + s * c.x, self.offset.y + s * c.y];
        let sol = solve_linear(
            a.iter().map(|r| r.to_vec()).collect(),
            b.to_vec(),
        )
        .expect("contraction has a unique fixed point");
        Point::new(sol[0], sol[1])
    }
}

/// Gaussian elimination over the rationals. Returns `None` for a singular
/// system.
pub fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for j in col..n {
            a[col][j] = a[col][j] * inv;
        }
        b[col] = b[col] * inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in col..n {
                    let v = a[col][j];
                    a[r][j] -= f * v;
                }
                let v = b[col];
                b[r] -= f * v;
            }
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn similarity_composition_is_pointwise() {
        let outer = Similarity { scale: q(1, 2), iso: Isometry::Md, offset: Point::ORIGIN };
        let inner = Similarity { scale: q(1, 2), iso: Isometry::Ma, offset: Point::new(q(1, 2), Rational::ZERO) };
        let both = outer.then_inner(&inner);
        for p in [Point::ORIGIN, Point::from_ints(1, 0), Point::new(q(1, 3), q(2, 7))] {
            assert_eq!(both.apply(p), outer.apply(inner.apply(p)));
        }
    }

    #[test]
    fn fixed_point_of_half_scale() {
        let s = Similarity { scale: q(1, 2), iso: Isometry::E, offset: Point::ORIGIN };
        assert_eq!(s.fixed_point(), Point::ORIGIN);
        let t = Similarity { scale: q(1, 2), iso: Isometry::Ma, offset: Point::new(q(1, 2), Rational::ZERO) };
        let p = t.fixed_point();
        assert_eq!(t.apply(p), p);
        assert_eq!(p, Point::from_ints(1, 0));
    }

    #[test]
    fn solves_small_system() {
        let a = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(3, 1)]];
        let x = solve_linear(a, vec![q(3, 1), q(5, 1)]).unwrap();
        assert_eq!(x, vec![q(4, 5), q(7, 5)]);
        let singular = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]];
        assert!(solve_linear(singular, vec![q(1, 1), q(1, 1)]).is_none());
    }
}
