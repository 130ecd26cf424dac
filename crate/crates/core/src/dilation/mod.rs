//! Certified bounds on the largest ratio `|f(t) − f(t′)|² / |t − t′|`.
//!
//! Two independent routes are offered. [`dilation`] searches all pairs of
//! times, dropping repeated junction classes. [`dilation_via_junctions`]
//! takes the maximum over junction classes of a thresholded ratio, a
//! finite search for each class.

mod bnb;
mod junction;

use serde::Serialize;

pub use junction::{junction_classes, JunctionClass, JunctionKey};

use bnb::{Kernel, Separation};
use crate::curve::{CurveError, Frame, FractionPath, ValidCurve};
use crate::geometry::Rational;

/// Bracket `[lower, upper]` around the ratio's supremum.
///
/// `lower` is attained exactly at `witness` (`t < t′`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DilationEstimate {
    pub lower: Rational,
    pub upper: Rational,
    pub witness: (Rational, Rational),
    pub stats: BnbStats,
}

impl DilationEstimate {
    pub fn width(&self) -> Rational {
        self.upper - self.lower
    }

    pub fn contains(&self, x: Rational) -> bool {
        self.lower <= x && x <= self.upper
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BnbStats {
    /// Nodes expanded.
    pub nodes: u64,
    pub max_depth: u32,
    /// Children discarded because their bound could not beat the best sample.
    pub pruned: u64,
    /// Touching pairs dropped as repeats of a known junction class.
    pub duplicates: u64,
}

/// Resource limits for one search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub max_nodes: u64,
    pub max_depth: u32,
    /// Approximate byte cap on the open queue.
    pub max_mem: Option<usize>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_nodes: 20_000_000, max_depth: 60, max_mem: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "limit", rename_all = "snake_case")]
pub enum Cap {
    Nodes(u64),
    Depth(u32),
    Memory(usize),
}

impl std::fmt::Display for Cap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cap::Nodes(n) => write!(f, "node cap {n}"),
            Cap::Depth(d) => write!(f, "depth cap {d}"),
            Cap::Memory(m) => write!(f, "memory cap {m} bytes"),
        }
    }
}

fn show(r: &Option<Rational>) -> String {
    r.map_or_else(|| "none".to_string(), |r| r.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DilationError {
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(Rational),
    #[error("{cap} exceeded (best so far: lower {}, upper {})", show(lower), show(upper))]
    CapExceeded { cap: Cap, lower: Option<Rational>, upper: Option<Rational> },
    #[error("no admissible time pair")]
    NoPairs,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Which separation threshold defines a junction's ratio: pairs `x < y` in
/// the two periods of total length `L` count when `y − x ≥ L / (2g)` (genus)
/// or `y − x ≥ L / (2k)` (base).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JunctionThreshold {
    #[default]
    Genus,
    Base,
}

impl JunctionThreshold {
    fn separation(self) -> Separation {
        match self {
            JunctionThreshold::Genus => Separation::OverGenus,
            JunctionThreshold::Base => Separation::OverBase,
        }
    }
}

/// Deepest fraction order whose integer coordinates and times stay far from
/// `i128` overflow.
fn depth_ceiling(curve: &ValidCurve) -> u32 {
    let k = curve.k() as f64;
    let (q, _) = curve.corner_numerators();
    let by_side = (40.0 / k.log2()).floor() as u32;
    let by_time = ((100.0 - (q as f64).log2()) / (2.0 * k.log2())).floor() as u32;
    by_side.min(by_time).saturating_sub(1)
}

fn effective(curve: &ValidCurve, limits: &Limits) -> Limits {
    Limits { max_depth: limits.max_depth.min(depth_ceiling(curve)), ..*limits }
}

fn check_tol(tol: Rational) -> Result<(), DilationError> {
    if tol <= Rational::ZERO {
        return Err(DilationError::BadTolerance(tol));
    }
    Ok(())
}

/// Upper bound on the ratio over `t ∈ period(a)`, `t′ ∈ period(b)`; `None`
/// when the periods touch or coincide (the bound is infinite there).
pub fn node_upper_bound(curve: &ValidCurve, a: &FractionPath, b: &FractionPath) -> Result<Option<Rational>, CurveError> {
    let (fa, fb) = (curve.fraction_frame(a)?, curve.fraction_frame(b)?);
    if fa.depth != fb.depth {
        return Err(CurveError::OrderMismatch(a.order(), b.order()));
    }
    let (fa, fb) = if fa.index <= fb.index { (fa, fb) } else { (fb, fa) };
    let kernel = Kernel::new(curve, Separation::Any);
    Ok(kernel.bound(&fa, &fb).and_then(|b| b.to_rational()))
}

/// Bracket of width at most `tol` around the curve's largest ratio.
pub fn dilation(curve: &ValidCurve, tol: Rational, limits: &Limits) -> Result<DilationEstimate, DilationError> {
    check_tol(tol)?;
    let kernel = Kernel::new(curve, Separation::Any);
    let (est, _) = bnb::run(&kernel, &[(Frame::ROOT, Frame::ROOT)], tol, &effective(curve, limits))?;
    Ok(est)
}

/// Ratio of one junction class: pairs inside its two periods separated by
/// at least the threshold. Witness times are global, via the class's
/// representative.
pub fn junction_ratio(
    curve: &ValidCurve,
    class: &JunctionClass,
    tol: Rational,
    threshold: JunctionThreshold,
    limits: &Limits,
) -> Result<DilationEstimate, DilationError> {
    check_tol(tol)?;
    let (ra, rb) = class.representative;
    let a = Frame { depth: 0, origin: (0, 0), iso: ra.iso, reversed: ra.reversed, index: 0 };
    let b = Frame {
        depth: 0,
        origin: (rb.origin.0 - ra.origin.0, rb.origin.1 - ra.origin.1),
        iso: rb.iso,
        reversed: rb.reversed,
        index: 1,
    };
    let kernel = Kernel::new(curve, threshold.separation());
    let (mut est, _) = bnb::run(&kernel, &[(a, a), (a, b), (b, b)], tol, &effective(curve, limits))?;
    let len = Rational::new(1, (curve.genus() as i128).pow(ra.depth));
    let start = Rational::from_int(ra.index as i128);
    est.witness = ((start + est.witness.0) * len, (start + est.witness.1) * len);
    Ok(est)
}

/// Ratio of the whole curve restricted to pairs at least one first-order
/// period apart (under the genus threshold). Together with the junction
/// classes this covers every pair of times.
pub fn root_ratio(
    curve: &ValidCurve,
    tol: Rational,
    threshold: JunctionThreshold,
    limits: &Limits,
) -> Result<DilationEstimate, DilationError> {
    check_tol(tol)?;
    let kernel = Kernel::new(curve, threshold.separation());
    let (est, _) = bnb::run(&kernel, &[(Frame::ROOT, Frame::ROOT)], tol, &effective(curve, limits))?;
    Ok(est)
}

/// The curve's ratio as the maximum of the junction ratios.
pub fn dilation_via_junctions(
    curve: &ValidCurve,
    tol: Rational,
    threshold: JunctionThreshold,
    limits: &Limits,
) -> Result<DilationEstimate, DilationError> {
    let mut best = root_ratio(curve, tol, threshold, limits)?;
    let mut stats = best.stats;
    for class in junction_classes(curve) {
        let est = junction_ratio(curve, &class, tol, threshold, limits)?;
        stats.nodes += est.stats.nodes;
        stats.pruned += est.stats.pruned;
        stats.max_depth = stats.max_depth.max(est.stats.max_depth);
        let better = est.lower > best.lower || (est.lower == best.lower && est.witness < best.witness);
        let upper = best.upper.max(est.upper);
        if better {
            best = est;
        }
        best.upper = upper;
    }
    best.stats = stats;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::FractalCurve;
    use crate::eval::evaluate_exact;
    use crate::geometry::squared_distance;

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn hilbert() -> ValidCurve {
        FractalCurve::hilbert().into_valid().unwrap()
    }

    fn check_witness(c: &ValidCurve, e: &DilationEstimate) {
        let (t, t2) = e.witness;
        assert!(t < t2);
        let d = squared_distance(evaluate_exact(c, t).unwrap(), evaluate_exact(c, t2).unwrap());
        assert_eq!(d / (t2 - t), e.lower);
    }

    #[test]
    fn node_bounds() {
        let h = hilbert();
        assert_eq!(node_upper_bound(&h, &FractionPath::root(), &FractionPath::root()).unwrap(), None);
        let p = |v: Vec<u32>| FractionPath::from(v);
        assert_eq!(node_upper_bound(&h, &p(vec![0]), &p(vec![1])).unwrap(), None);
        // Cells (0,0) and (1,1): max corner distance² = 8 quarter-units², gap 1/4.
        assert_eq!(node_upper_bound(&h, &p(vec![0]), &p(vec![2])).unwrap(), Some(q(8, 1)));
        assert_eq!(node_upper_bound(&h, &p(vec![3]), &p(vec![0])).unwrap(), Some(q(5, 2)));
    }

    #[test]
    fn hilbert_dilation_is_six() {
        let h = hilbert();
        let e = dilation(&h, q(1, 1000), &Limits::default()).unwrap();
        assert!(e.contains(Rational::from_int(6)), "{e:?}");
        assert!(e.width() <= q(1, 1000));
        check_witness(&h, &e);
    }

    #[test]
    fn hilbert_via_junctions_agrees() {
        let h = hilbert();
        let e = dilation_via_junctions(&h, q(1, 1000), JunctionThreshold::Genus, &Limits::default()).unwrap();
        assert!(e.contains(Rational::from_int(6)), "{e:?}");
        check_witness(&h, &e);
    }

    #[test]
    fn deterministic_across_pools() {
        let h = FractalCurve::peano().into_valid().unwrap();
        let run = |n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap()
                .install(|| dilation(&h, q(1, 100), &Limits::default()).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn caps_report_progress() {
        let h = hilbert();
        let limits = Limits { max_nodes: 10, ..Limits::default() };
        match dilation(&h, q(1, 1000), &limits) {
            Err(DilationError::CapExceeded { cap: Cap::Nodes(10), lower: Some(l), .. }) => assert!(l > Rational::ZERO),
            other => panic!("{other:?}"),
        }
        assert!(matches!(dilation(&h, Rational::ZERO, &limits), Err(DilationError::BadTolerance(_))));
    }
}
