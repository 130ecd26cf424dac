//! Best-first branch-and-bound over pairs of same-order fractions.
//!
//! Every quantity is an integer in node-relative units: lengths in units of
//! the node's side `k^{−r}`, times in units of `g^{−(r+1)}/Q` where `Q` is
//! the common denominator of the corner times. Because `g = k²`, the ratio
//! `|Δp|² / Δt` of a node at depth `r` is `d² · gQ / ΔT`, with no depth
//! dependence. The extra factor `g` in the time unit makes the junction
//! thresholds integral at every depth.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use num_bigint::BigInt;
use rayon::prelude::*;

use super::junction::{junction_key, JunctionKey};
use super::{BnbStats, Cap, DilationError, DilationEstimate, Limits};
use crate::curve::{Frame, ValidCurve};
use crate::geometry::{cmp_fractions, Rational};

/// Nodes taken from the queue per round; fixed so results never depend on
/// the worker count.
const BATCH: usize = 512;

/// Minimum time separation for the pairs that count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Separation {
    /// Any `t < t′`. Touching pairs are deduplicated by junction class.
    Any,
    /// `t′ − t ≥ period / g`.
    OverGenus,
    /// `t′ − t ≥ period / k`.
    OverBase,
}

/// `num / den`, with `den == 0` standing for +∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Bound {
    pub num: i128,
    pub den: i128,
}

impl Bound {
    pub const INFINITE: Bound = Bound { num: 1, den: 0 };

    pub fn is_finite(&self) -> bool {
        self.den != 0
    }

    pub fn to_rational(self) -> Option<Rational> {
        self.is_finite().then(|| Rational::new(self.num, self.den))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_finite(), other.is_finite()) {
            (false, false) => Ordering::Equal,
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (true, true) => cmp_fractions(self.num, self.den, other.num, other.den),
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Node {
    pub a: Frame,
    pub b: Frame,
    pub bound: Bound,
}

impl Ord for Node {
    /// Larger bound first; then shallower; then earlier in time.
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .cmp(&other.bound)
            .then_with(|| other.a.depth.cmp(&self.a.depth))
            .then_with(|| (other.a.index, other.b.index).cmp(&(self.a.index, self.b.index)))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A sampled pair of corner passages: ratio `num / den` at node-relative
/// times `ta < tb` (units `g^{−(depth+1)}/Q`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Sample {
    pub num: i128,
    pub den: i128,
    pub depth: u32,
    pub ta: i128,
    pub tb: i128,
}

impl Sample {
    fn time_unit(&self, g: i128, q: i128) -> i128 {
        g.pow(self.depth + 1) * q
    }

    /// Higher ratio wins; equal ratios prefer the lexicographically smaller
    /// time pair.
    fn better_than(&self, other: &Sample, g: i128, q: i128) -> bool {
        match cmp_fractions(self.num, self.den, other.num, other.den) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => {
                let (su, ou) = (self.time_unit(g, q), other.time_unit(g, q));
                let mine = (Rational::new(self.ta, su), Rational::new(self.tb, su));
                let theirs = (Rational::new(other.ta, ou), Rational::new(other.tb, ou));
                mine < theirs
            }
        }
    }

    pub fn times(&self, g: i128, q: i128) -> (Rational, Rational) {
        let u = self.time_unit(g, q);
        (Rational::new(self.ta, u), Rational::new(self.tb, u))
    }
}

pub(crate) struct Kernel<'a> {
    curve: &'a ValidCurve,
    g: i128,
    q: i128,
    /// `g · Q`: one period in time units.
    gq: i128,
    num: [i128; 4],
    sep: Separation,
}

impl<'a> Kernel<'a> {
    pub fn new(curve: &'a ValidCurve, sep: Separation) -> Kernel<'a> {
        let (q, num) = curve.corner_numerators();
        let g = curve.genus() as i128;
        Kernel { curve, g, q, gq: g * q, num, sep }
    }

    /// Required separation at depth `r` in time units, if any.
    fn threshold(&self, r: u32) -> Option<i128> {
        match self.sep {
            Separation::Any => None,
            Separation::OverGenus => Some(self.g.pow(r) * self.q),
            Separation::OverBase => {
                let k = self.curve.k() as i128;
                Some(k.pow(2 * r + 1) * self.q)
            }
        }
    }

    fn vertex_time(&self, f: &Frame, v: u8) -> i128 {
        let local = if f.reversed { self.q - self.num[v as usize] } else { self.num[v as usize] };
        f.index as i128 * self.gq + local * self.g
    }

    /// Upper bound for a pair of frames, or `None` when no pair inside can
    /// reach the required separation.
    pub fn bound(&self, a: &Frame, b: &Frame) -> Option<Bound> {
        let r = a.depth;
        let steps = (b.index - a.index) as i128;
        let dx = (b.origin.0 - a.origin.0).unsigned_abs() as i128 + 1;
        let dy = (b.origin.1 - a.origin.1).unsigned_abs() as i128 + 1;
        let num = (dx * dx + dy * dy) * self.gq;
        let gap = (steps - 1).max(0) * self.gq;
        match self.threshold(r) {
            None if gap == 0 => Some(Bound::INFINITE),
            None => Some(Bound { num, den: gap }),
            Some(delta) => {
                if (steps + 1) * self.gq < delta {
                    None
                } else {
                    Some(Bound { num, den: gap.max(delta) })
                }
            }
        }
    }

    /// Best ratio over the sixteen corner-passage pairs of the node.
    pub fn sample(&self, a: &Frame, b: &Frame) -> Option<Sample> {
        let delta = self.threshold(a.depth).unwrap_or(1);
        let mut best: Option<Sample> = None;
        for va in 0..4u8 {
            let ta = self.vertex_time(a, va);
            let pa = a.vertex(va);
            for vb in 0..4u8 {
                let tb = self.vertex_time(b, vb);
                if tb - ta < delta {
                    continue;
                }
                let pb = b.vertex(vb);
                let (dx, dy) = ((pb.0 - pa.0) as i128, (pb.1 - pa.1) as i128);
                let s = Sample { num: (dx * dx + dy * dy) * self.gq, den: tb - ta, depth: a.depth, ta, tb };
                if best.map_or(true, |cur| s.better_than(&cur, self.g, self.q)) {
                    best = Some(s);
                }
            }
        }
        best
    }

    fn children(&self, node: &Node) -> Vec<(Frame, Frame)> {
        let g = self.g as usize;
        let c = self.curve.curve();
        if node.a == node.b {
            let kids: Vec<Frame> = (0..g).map(|j| node.a.child(c, j)).collect();
            let mut out = Vec::with_capacity(g * (g + 1) / 2);
            for i in 0..g {
                for j in i..g {
                    out.push((kids[i], kids[j]));
                }
            }
            out
        } else {
            let ka: Vec<Frame> = (0..g).map(|j| node.a.child(c, j)).collect();
            let kb: Vec<Frame> = (0..g).map(|j| node.b.child(c, j)).collect();
            ka.iter().flat_map(|x| kb.iter().map(move |y| (*x, *y))).collect()
        }
    }
}

struct Expanded {
    nodes: Vec<(Node, Option<JunctionKey>)>,
    best: Option<Sample>,
}

/// Runs the search from the given depth-0 pairs until the largest open
/// bound is within `tol` of the best sample.
pub(crate) fn run(
    kernel: &Kernel<'_>,
    init: &[(Frame, Frame)],
    tol: Rational,
    limits: &Limits,
) -> Result<(DilationEstimate, Sample), DilationError> {
    let (g, q) = (kernel.g, kernel.q);
    let dedup = kernel.sep == Separation::Any;
    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut seen: HashSet<JunctionKey> = HashSet::new();
    let mut best: Option<Sample> = None;
    let mut stats = BnbStats::default();

    for (a, b) in init {
        if let Some(s) = kernel.sample(a, b) {
            if best.map_or(true, |cur| s.better_than(&cur, g, q)) {
                best = Some(s);
            }
        }
        if let Some(bound) = kernel.bound(a, b) {
            heap.push(Node { a: *a, b: *b, bound });
        }
    }

    loop {
        let done = match heap.peek() {
            None => true,
            Some(top) => best.is_some_and(|s| within_tol(top.bound, &s, tol)),
        };
        if done {
            break;
        }
        let mut batch = Vec::with_capacity(BATCH);
        while batch.len() < BATCH {
            match heap.peek() {
                Some(top) if !best.is_some_and(|s| within_tol(top.bound, &s, tol)) => {
                    batch.push(heap.pop().expect("peeked"));
                }
                _ => break,
            }
        }
        stats.nodes += batch.len() as u64;
        let depth = batch.iter().map(|n| n.a.depth + 1).max().unwrap_or(0);
        stats.max_depth = stats.max_depth.max(depth);
        let over = if stats.nodes > limits.max_nodes {
            Some(Cap::Nodes(limits.max_nodes))
        } else if depth > limits.max_depth {
            Some(Cap::Depth(limits.max_depth))
        } else if limits.max_mem.is_some_and(|m| heap.len() * std::mem::size_of::<Node>() > m) {
            Some(Cap::Memory(limits.max_mem.unwrap_or(0)))
        } else {
            None
        };
        if let Some(cap) = over {
            let top = batch.first().map(|n| n.bound).unwrap_or(Bound::INFINITE);
            return Err(DilationError::CapExceeded {
                cap,
                lower: best.map(|s| Rational::new(s.num, s.den)),
                upper: top.to_rational(),
            });
        }

        let expanded: Vec<Expanded> = batch
            .par_iter()
            .map(|node| {
                let mut out = Expanded { nodes: Vec::new(), best: None };
                for (a, b) in kernel.children(node) {
                    if dedup && a == b {
                        continue;
                    }
                    let Some(bound) = kernel.bound(&a, &b) else { continue };
                    if let Some(s) = kernel.sample(&a, &b) {
                        if out.best.map_or(true, |cur| s.better_than(&cur, g, q)) {
                            out.best = Some(s);
                        }
                    }
                    let key = (dedup && b.index == a.index + 1).then(|| junction_key(&a, &b));
                    out.nodes.push((Node { a, b, bound }, key));
                }
                out
            })
            .collect();

        for e in &expanded {
            if let Some(s) = e.best {
                if best.map_or(true, |cur| s.better_than(&cur, g, q)) {
                    best = Some(s);
                }
            }
        }
        for e in expanded {
            for (node, key) in e.nodes {
                if let Some(key) = key {
                    if !seen.insert(key) {
                        stats.duplicates += 1;
                        continue;
                    }
                }
                if best.is_some_and(|s| node.bound.is_finite() && cmp_fractions(node.bound.num, node.bound.den, s.num, s.den) != Ordering::Greater) {
                    stats.pruned += 1;
                    continue;
                }
                heap.push(node);
            }
        }
    }

    let best = best.ok_or(DilationError::NoPairs)?;
    let lower = Rational::new(best.num, best.den);
    let upper = match heap.peek() {
        Some(top) if top.bound > Bound { num: best.num, den: best.den } => {
            top.bound.to_rational().expect("finite once within tolerance")
        }
        _ => lower,
    };
    let (t, t2) = best.times(g, q);
    Ok((DilationEstimate { lower, upper, witness: (t, t2), stats }, best))
}

/// `bound ≤ sample + tol`, exactly.
fn within_tol(bound: Bound, s: &Sample, tol: Rational) -> bool {
    if !bound.is_finite() {
        return false;
    }
    let (bn, bd) = (BigInt::from(bound.num), BigInt::from(bound.den));
    let (sn, sd) = (BigInt::from(s.num), BigInt::from(s.den));
    let (tn, td) = (BigInt::from(tol.numer()), BigInt::from(tol.denom()));
    &bn * &sd * &td <= (&sn * &td + &tn * &sd) * &bd
}
