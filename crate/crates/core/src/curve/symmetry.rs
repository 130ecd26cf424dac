//! Isometric copies of a curve and the canonical representative of its
//! symmetry class.

use super::{CellIndex, FractalCurve, FractionSpec};

use crate::geometry::Isometry;

impl FractalCurve {
    /// The same curve traversed backwards: `t ↦ f(1 − t)`.
    ///
    /// Only the fraction order changes. Each `reversed` flag is relative to
    /// the base curve, which is itself reversed, so the flags carry over.
    pub fn reversed(&self) -> FractalCurve {
        let fractions = self.fractions().iter().rev().copied().collect();
        FractalCurve { k: self.k(), fractions }
    }

    /// The image `h ∘ f` of the curve under a symmetry of the square.
    ///
    /// Fraction `i` becomes `h A_i h⁻¹`: its cell moves with `h` and its
    /// symmetry is conjugated.
    pub fn conjugated(&self, h: Isometry) -> FractalCurve {
        let side = self.k() as i64 - 1;
        let inv = h.inverse();
        let fractions = self
            .fractions()
            .iter()
            .map(|f| {
                let (c, r) = h.apply_int(f.cell.as_i64(), side);
                FractionSpec {
                    cell: CellIndex::new(c as u32, r as u32),
                    iso: h.compose(f.iso).compose(inv),
                    reversed: f.reversed,
                }
            })
            .collect();
        FractalCurve { k: self.k(), fractions }
    }

    /// All 16 plane/time variants (with repetitions for symmetric curves).
    pub fn variants(&self) -> impl Iterator<Item = FractalCurve> + '_ {
        let rev = self.reversed();
        Isometry::ALL
            .into_iter()
            .flat_map(move |h| [self.conjugated(h), rev.conjugated(h)])
    }

    /// Smallest description among the variants; two curves are isometric iff
    /// their canonical forms are equal.
    pub fn canonical(&self) -> FractalCurve {
        self.variants().min().expect("sixteen variants")
    }

    pub fn is_canonical(&self) -> bool {
        self.variants().all(|v| *self <= v)
    }

    /// Number of distinct curves in the symmetry class (at most 16).
    pub fn orbit_size(&self) -> usize {
        let mut all: Vec<FractalCurve> = self.variants().collect();
        all.sort();
        all.dedup();
        all.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    #[test]
    fn variants_stay_valid() {
        for c in [FractalCurve::hilbert(), FractalCurve::peano()] {
            for v in c.variants() {
                assert!(v.validate().is_valid(), "{v}");
            }
        }
    }

    #[test]
    fn reversal_mirrors_corner_moments() {
        for c in [FractalCurve::hilbert(), FractalCurve::peano()] {
            let v = c.clone().into_valid().unwrap();
            let r = c.reversed().into_valid().unwrap();
            let fwd = v.corner_moments();
            let back = r.corner_moments();
            for (a, b) in fwd.iter().zip(back.iter().rev()) {
                assert_eq!(a.vertex, b.vertex);
                assert_eq!(a.time, crate::geometry::Rational::ONE - b.time);
            }
        }
    }

    #[test]
    fn reversal_swaps_endpoints() {
        let h = FractalCurve::hilbert();
        let (e, x) = h.entry_exit();
        assert_eq!(h.reversed().entry_exit(), (x, e));
        assert_eq!(h.reversed().reversed(), h);
    }

    #[test]
    fn conjugation_moves_endpoints() {
        let h = FractalCurve::hilbert();
        let (e, x) = h.entry_exit();
        for g in Isometry::ALL {
            let (e2, x2) = h.conjugated(g).entry_exit();
            assert_eq!((e2, x2), (g.apply(e), g.apply(x)));
        }
        assert_eq!(h.conjugated(Isometry::R1).entry_exit().0, Point::from_ints(1, 0));
    }

    #[test]
    fn canonical_form_is_class_invariant_and_idempotent() {
        let h = FractalCurve::hilbert();
        let c = h.canonical();
        assert_eq!(c.canonical(), c);
        assert!(c.is_canonical());
        for v in h.variants() {
            assert_eq!(v.canonical(), c);
        }
        // Hilbert's reversal is its mirror image, and the description is
        // literally the same after conjugating by my.
        assert_eq!(h.reversed(), h.conjugated(Isometry::My));
        assert_eq!(h.orbit_size(), 8);
    }
}
