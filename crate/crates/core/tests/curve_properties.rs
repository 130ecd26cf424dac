use std::collections::HashSet;
use std::sync::OnceLock;

use proptest::prelude::*;

use peano::curve::{Adjacency, FractalCurve, FractionPath, ValidCurve};
use peano::eval::{evaluate, evaluate_exact, scan_order, EvalError, DEFAULT_SCAN_SIDE_CAP};
use peano::geometry::{vertex_coords, Point, Rational};
use peano::search::{enumerate_curves, EnumerationSpec};

/// Every k=2 class, plus a spread of k=3 classes.
fn pool() -> &'static [ValidCurve] {
    static POOL: OnceLock<Vec<ValidCurve>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut v: Vec<FractalCurve> = enumerate_curves(&EnumerationSpec::new(2)).collect();
        v.extend(enumerate_curves(&EnumerationSpec::new(3)).step_by(4001));
        v.push(FractalCurve::peano());
        v.into_iter().map(|c| c.into_valid().unwrap()).collect()
    })
}

fn curve_and_path() -> impl Strategy<Value = (usize, Vec<u32>)> {
    (0..pool().len(), proptest::collection::vec(0u32..9, 0..4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn corner_passages_hit_the_frame_corners((i, digits) in curve_and_path()) {
        let c = &pool()[i];
        let g = c.genus();
        let path = FractionPath::from(digits.into_iter().map(|d| d % g).collect::<Vec<_>>());
        let frame = c.fraction_frame(&path).unwrap();
        let corners = c.frame_corner_points(&frame);
        for (v, p) in c.frame_vertex_order(&frame).into_iter().zip(corners) {
            let t = c.frame_vertex_time(&frame, v);
            prop_assert_eq!(evaluate_exact(c, t).unwrap(), p);
        }
    }

    #[test]
    fn enclosure_contains_exact_point(i in 0..pool().len(), num in 0i128..=1000, den in 1i128..=1000, depth in 0u32..6) {
        let c = &pool()[i];
        let t = Rational::new(num.min(den), den);
        let e = evaluate(c, t, depth).unwrap();
        match evaluate_exact(c, t) {
            Ok(p) => prop_assert!(e.contains(p)),
            // Long orbit cycles can leave 128-bit range; that must be reported, not panic.
            Err(EvalError::Overflow(u)) => prop_assert_eq!(u, t),
            Err(other) => prop_assert!(false, "{}", other),
        }
    }

    #[test]
    fn symmetric_copies_share_a_canonical_form(i in 0..pool().len()) {
        let c = pool()[i].curve();
        let canon = c.canonical();
        for v in c.variants() {
            prop_assert!(v.validate().is_valid());
            prop_assert_eq!(v.canonical(), canon.clone());
        }
        prop_assert_eq!(c.reversed().reversed(), c.clone());
    }

    #[test]
    fn reversal_mirrors_time(i in 0..pool().len(), num in 0i128..=64) {
        let c = &pool()[i];
        let t = Rational::new(num, 64);
        prop_assert_eq!(evaluate_exact(&c.reversed(), Rational::ONE - t).unwrap(), evaluate_exact(c, t).unwrap());
    }
}

#[test]
fn corner_moments_round_trip() {
    for c in pool() {
        for v in 0..4u8 {
            let (x, y) = vertex_coords(v);
            assert_eq!(evaluate_exact(c, c.corner_time(v)).unwrap(), Point::from_ints(x, y), "{}", c.curve());
        }
    }
}

#[test]
fn scan_order_is_a_bijection_of_touching_cells() {
    for c in pool().iter().step_by(3) {
        let side_only = c.curve().validate().all_side_adjacent();
        let max_depth = if c.k() == 2 { 5 } else { 4 };
        for depth in 0..=max_depth {
            let order = scan_order(c, depth, DEFAULT_SCAN_SIDE_CAP).unwrap();
            let side = (c.k() as u64).pow(depth);
            assert_eq!(order.len() as u64, side * side);
            let distinct: HashSet<_> = order.cells.iter().collect();
            assert_eq!(distinct.len(), order.len());
            assert!(order.cells.iter().all(|p| (p.col as u64) < side && (p.row as u64) < side));
            for w in order.cells.windows(2) {
                let a = Adjacency::of_cells(w[0], w[1]);
                assert_ne!(a, Adjacency::Disjoint, "{} depth {depth}", c.curve());
                if side_only {
                    assert_eq!(a, Adjacency::Side);
                }
            }
        }
    }
}
