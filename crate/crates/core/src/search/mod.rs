//! Enumeration of all curves with a given divisor and the search for the
//! smallest ratio among them.

mod conditions;
mod enumerate;

use rayon::prelude::*;
use serde::Serialize;

pub use conditions::{five_necessary_conditions, Condition, ConditionReport, Verdict};
pub use enumerate::{enumerate_curves, run_task, tasks, EnumerationSpec, Task};

use crate::curve::FractalCurve;
use crate::dilation::{dilation, DilationError, DilationEstimate, Limits};
use crate::geometry::Rational;
use crate::oracle::{brute_force_lower_bound, DEFAULT_MAX_POINTS};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOptions {
    pub tol: Rational,
    /// Skip the full bracket when a cheap lower bound already exceeds the
    /// best upper bound so far.
    pub prune: bool,
    /// Depth of the oracle used as the cheap lower bound.
    pub prune_depth: u32,
    pub limits: Limits,
    /// Stop after this many curves (the outcome is then marked incomplete).
    pub max_curves: Option<u64>,
}

impl SearchOptions {
    pub fn new(tol: Rational) -> SearchOptions {
        SearchOptions { tol, prune: true, prune_depth: 1, limits: Limits::default(), max_curves: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub enumerated: u64,
    /// Skipped because the cheap lower bound beat the incumbent.
    pub pruned: u64,
    pub fully_evaluated: u64,
    /// Curves whose necessary conditions already certify a ratio of at
    /// least five.
    pub certified_five: u64,
}

/// One curve that went through the full bracket.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveRecord {
    pub curve: FractalCurve,
    pub estimate: DilationEstimate,
    pub conditions: ConditionReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    /// The curve with the smallest upper bound (ties: smallest description).
    pub best: CurveRecord,
    /// Every evaluated curve whose bracket reaches down to `best.upper`.
    pub minimizers: Vec<CurveRecord>,
    /// Smallest lower bound among all fully evaluated curves.
    pub min_lower: Rational,
    pub stats: SearchStats,
    /// False when `max_curves` stopped the search early.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("no curve matches the enumeration spec")]
    Empty,
    #[error("bracketing {curve}: {source}")]
    Dilation { curve: FractalCurve, source: DilationError },
}

/// Curves handled per round. The incumbent is frozen within a round, so
/// which curves get pruned does not depend on scheduling.
const ROUND: usize = 256;

enum Outcome {
    Pruned { certified: bool },
    Evaluated(Box<CurveRecord>),
}

fn better(a: &CurveRecord, b: &CurveRecord) -> bool {
    (a.estimate.upper, &a.curve) < (b.estimate.upper, &b.curve)
}

/// Smallest certified upper bound over the enumerated curves.
///
/// Curves are handled in rounds of fixed size. After each round `on_round`
/// receives the running statistics, the records evaluated in that round (in
/// enumeration order) and the incumbent.
pub fn find_min_dilation(
    spec: &EnumerationSpec,
    opts: &SearchOptions,
    mut on_round: impl FnMut(&SearchStats, &[CurveRecord], Option<&CurveRecord>),
) -> Result<SearchOutcome, SearchError> {
    let mut state = State::default();
    let mut pending: Vec<FractalCurve> = Vec::new();
    let mut complete = true;

    'outer: for task in tasks(spec, 3) {
        let mut found = Vec::new();
        run_task(spec, &task, &mut |c| found.push(c));
        for c in found {
            if opts.max_curves.is_some_and(|m| state.stats.enumerated + pending.len() as u64 >= m) {
                complete = false;
                break 'outer;
            }
            pending.push(c);
            if pending.len() == ROUND {
                state.round(&pending, opts, &mut on_round)?;
                pending.clear();
            }
        }
    }
    if !pending.is_empty() || state.stats.enumerated == 0 {
        state.round(&pending, opts, &mut on_round)?;
    }

    let best = state.best.ok_or(SearchError::Empty)?;
    let mut minimizers: Vec<CurveRecord> =
        state.kept.into_iter().filter(|r| r.estimate.lower <= best.estimate.upper).collect();
    minimizers.sort_by(|a, b| (a.estimate.upper, &a.curve).cmp(&(b.estimate.upper, &b.curve)));
    let min_lower = state.min_lower.unwrap_or(best.estimate.lower);
    Ok(SearchOutcome { best, minimizers, min_lower, stats: state.stats, complete })
}

#[derive(Default)]
struct State {
    stats: SearchStats,
    best: Option<CurveRecord>,
    /// Records whose lower bound does not exceed the incumbent's upper bound.
    kept: Vec<CurveRecord>,
    min_lower: Option<Rational>,
}

impl State {
    fn round(
        &mut self,
        pending: &[FractalCurve],
        opts: &SearchOptions,
        on_round: &mut impl FnMut(&SearchStats, &[CurveRecord], Option<&CurveRecord>),
    ) -> Result<(), SearchError> {
        let bar = self.best.as_ref().map(|b| b.estimate.upper);
        let results: Vec<Result<Outcome, SearchError>> =
            pending.par_iter().map(|curve| assess(curve, bar, opts)).collect();
        let mut fresh = Vec::new();
        for r in results {
            self.stats.enumerated += 1;
            match r? {
                Outcome::Pruned { certified } => {
                    self.stats.pruned += 1;
                    self.stats.certified_five += certified as u64;
                }
                Outcome::Evaluated(rec) => {
                    self.stats.fully_evaluated += 1;
                    self.stats.certified_five += rec.conditions.certifies_five() as u64;
                    self.min_lower = Some(self.min_lower.map_or(rec.estimate.lower, |m| m.min(rec.estimate.lower)));
                    if self.best.as_ref().map_or(true, |b| better(&rec, b)) {
                        self.best = Some((*rec).clone());
                    }
                    fresh.push(*rec);
                }
            }
        }
        let upper = self.best.as_ref().map(|b| b.estimate.upper);
        self.kept.retain(|r| Some(r.estimate.lower) <= upper);
        self.kept.extend(fresh.iter().filter(|r| Some(r.estimate.lower) <= upper).cloned());
        on_round(&self.stats, &fresh, self.best.as_ref());
        Ok(())
    }
}

fn assess(curve: &FractalCurve, bar: Option<Rational>, opts: &SearchOptions) -> Result<Outcome, SearchError> {
    let valid = curve.clone().into_valid().expect("enumerated curves are valid");
    let conditions = five_necessary_conditions(&valid);
    let certified = conditions.certifies_five();
    if let (true, Some(bar)) = (opts.prune, bar) {
        if certified && bar < Rational::from_int(5) {
            return Ok(Outcome::Pruned { certified });
        }
        let cheap = brute_force_lower_bound(&valid, opts.prune_depth, DEFAULT_MAX_POINTS)
            .map(|o| o.lower_bound)
            .unwrap_or(Rational::ZERO);
        if cheap > bar {
            return Ok(Outcome::Pruned { certified });
        }
    }
    let estimate = dilation(&valid, opts.tol, &opts.limits)
        .map_err(|source| SearchError::Dilation { curve: curve.clone(), source })?;
    Ok(Outcome::Evaluated(Box::new(CurveRecord { curve: curve.clone(), estimate, conditions })))
}
