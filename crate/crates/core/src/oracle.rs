//! Brute-force lower bound: the exact ratio over all pairs of a finite set
//! of structured sample times.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::ValidCurve;
use crate::eval::evaluate_exact;
use crate::geometry::{cmp_fractions, Rational};

/// Default cap on the number of sample times.
pub const DEFAULT_MAX_POINTS: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub depth: u32,
    pub points: usize,
    pub lower_bound: Rational,
    pub witness: (Rational, Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("depth {depth} needs about {points} sample times, above the cap {cap}")]
    TooManyPoints { depth: u32, points: u128, cap: usize },
}

/// Sample times: every corner passage of every fraction of order at most
/// `depth`, as integers in units of `1 / (Q gⁿ)`. Period endpoints are among
/// them (entry and exit passages).
fn sample_times(curve: &ValidCurve, depth: u32) -> Vec<i128> {
    let (q, num) = curve.corner_numerators();
    let g = curve.genus() as i128;
    let mut times = Vec::new();
    for m in 0..=depth {
        let scale = g.pow(depth - m);
        for f in curve.frames_of_order(m) {
            for n in num {
                let local = if f.reversed { q - n } else { n };
                times.push((f.index as i128 * q + local) * scale);
            }
        }
    }
    times.sort_unstable();
    times.dedup();
    times
}

pub fn brute_force_lower_bound(curve: &ValidCurve, depth: u32, max_points: usize) -> Result<OracleResult, OracleError> {
    let g = curve.genus() as u128;
    let estimate = g.checked_pow(depth).map_or(u128::MAX, |p| p.saturating_mul(3).saturating_add(1));
    if estimate > max_points as u128 {
        return Err(OracleError::TooManyPoints { depth, points: estimate, cap: max_points });
    }
    let (q, _) = curve.corner_numerators();
    let unit = q * (g as i128).pow(depth);
    let side = (curve.k() as i128).pow(depth);
    let times = sample_times(curve, depth);
    let pts: Vec<(i64, i64)> = times
        .par_iter()
        .map(|&t| {
            let p = evaluate_exact(curve, Rational::new(t, unit)).expect("sample time in [0, 1]");
            p.to_grid(side).expect("corner passages sit on the order-n grid")
        })
        .collect();

    // Ratio d² · Q / ΔT in the units above; candidates are (num, den, i, j).
    let best = (0..times.len())
        .into_par_iter()
        .filter_map(|i| {
            let mut row: Option<(i128, i128, usize, usize)> = None;
            for j in i + 1..times.len() {
                let dx = (pts[j].0 - pts[i].0) as i128;
                let dy = (pts[j].1 - pts[i].1) as i128;
                let cand = ((dx * dx + dy * dy) * q, times[j] - times[i], i, j);
                if row.map_or(true, |r| cmp_fractions(cand.0, cand.1, r.0, r.1) == Ordering::Greater) {
                    row = Some(cand);
                }
            }
            row
        })
        .reduce_with(|a, b| match cmp_fractions(a.0, a.1, b.0, b.1) {
            Ordering::Less => b,
            Ordering::Greater => a,
            // Times are sorted, so index order is time order.
            Ordering::Equal => if (a.2, a.3) <= (b.2, b.3) { a } else { b },
        });
    let (lower_bound, witness) = match best {
        Some((n, d, i, j)) => (Rational::new(n, d), (Rational::new(times[i], unit), Rational::new(times[j], unit))),
        None => (Rational::ZERO, (Rational::ZERO, Rational::ONE)),
    };
    Ok(OracleResult { depth, points: times.len(), lower_bound, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::FractalCurve;
    use crate::dilation::{dilation, Limits};

    #[test]
    fn hilbert_oracle_values() {
        let h = FractalCurve::hilbert().into_valid().unwrap();
        let r0 = brute_force_lower_bound(&h, 0, DEFAULT_MAX_POINTS).unwrap();
        assert_eq!(r0.points, 4);
        let mut prev = r0.lower_bound;
        for d in 1..=4 {
            let r = brute_force_lower_bound(&h, d, DEFAULT_MAX_POINTS).unwrap();
            assert!(r.lower_bound >= prev);
            prev = r.lower_bound;
        }
        assert!(prev >= Rational::new(59, 10) && prev <= Rational::from_int(6), "{prev}");
    }

    #[test]
    fn oracle_below_certified_upper() {
        let tol = Rational::new(1, 1000);
        for c in [FractalCurve::hilbert(), FractalCurve::peano()] {
            let v = c.into_valid().unwrap();
            let up = dilation(&v, tol, &Limits::default()).unwrap().upper;
            let o = brute_force_lower_bound(&v, 2, DEFAULT_MAX_POINTS).unwrap();
            assert!(o.lower_bound <= up + tol);
        }
    }

    #[test]
    fn point_cap() {
        let h = FractalCurve::hilbert().into_valid().unwrap();
        assert!(matches!(brute_force_lower_bound(&h, 8, 1000), Err(OracleError::TooManyPoints { .. })));
    }
}
