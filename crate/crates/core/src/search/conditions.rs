//! Combinatorial conditions every curve with ratio below five must meet.
//!
//! Each condition is checked on the sequence of first-order fractions and
//! on the sequence of second-order fractions (the same curve read with
//! genus `g²`), for the curve and for its time reversal; all of these are
//! again curves with ratio below five when the original is. A violation
//! therefore certifies a ratio of at least five without any numeric search.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curve::{classify_turn, Acceleration, CurveClass, Frame, Shape, Turn, ValidCurve};
use crate::geometry::{vertex_coords, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// The second vertex passed shares a side with the entry, the third
    /// with the exit.
    InnerVerticesBesideEnds,
    /// Neighbouring fractions of one order meet along a side.
    SideContacts,
    /// One-sided: at a turn the first fraction decelerates and the second
    /// accelerates.
    TurnsDecelerateThenAccelerate,
    /// One-sided: no two turns in a row.
    NoConsecutiveTurns,
    /// One-sided: before a side turn, the fraction preceding the turn pair
    /// decelerates as well.
    SideTurnAfterDeceleration,
    /// Gaps between consecutive corner passages lie strictly between 1/5
    /// and 3/5.
    CornerGapsInRange,
    /// One-sided: no side turn right after three equal displacements.
    NoSideTurnAfterThreeStraight,
    /// One-sided: no back turn right after four equal displacements whose
    /// first fraction accelerates.
    NoBackTurnAfterFourStraight,
    /// Diagonal: the first three and last three fractions touch the
    /// boundary.
    EndsOnBoundary,
    /// Diagonal: a fraction's exit direction is perpendicular to the next
    /// fraction's entry direction, or both run along their common side.
    PerpendicularHandoff,
    /// Diagonal: the first internal corner is reached, and the last one
    /// left, within 2/5 of the period.
    QuickCorners,
    /// Diagonal: with a vertical entry direction, the first and third
    /// fractions are both Z-shaped, or the first decelerates, the third
    /// accelerates and their shapes differ (N for Z when horizontal).
    EntryShapes,
    /// Diagonal: four fractions stacked vertically end with a Z-shaped
    /// accelerating one (N-shaped when stacked horizontally).
    LongRunsEndAccelerating,
}

impl Condition {
    pub const ALL: [Condition; 13] = [
        Condition::InnerVerticesBesideEnds,
        Condition::SideContacts,
        Condition::TurnsDecelerateThenAccelerate,
        Condition::NoConsecutiveTurns,
        Condition::SideTurnAfterDeceleration,
        Condition::CornerGapsInRange,
        Condition::NoSideTurnAfterThreeStraight,
        Condition::NoBackTurnAfterFourStraight,
        Condition::EndsOnBoundary,
        Condition::PerpendicularHandoff,
        Condition::QuickCorners,
        Condition::EntryShapes,
        Condition::LongRunsEndAccelerating,
    ];

    /// `None` when the condition concerns both classes.
    pub fn class(self) -> Option<CurveClass> {
        use Condition::*;
        match self {
            InnerVerticesBesideEnds | SideContacts | CornerGapsInRange => None,
            TurnsDecelerateThenAccelerate
            | NoConsecutiveTurns
            | SideTurnAfterDeceleration
            | NoSideTurnAfterThreeStraight
            | NoBackTurnAfterFourStraight => Some(CurveClass::OneSided),
            EndsOnBoundary | PerpendicularHandoff | QuickCorners | EntryShapes | LongRunsEndAccelerating => {
                Some(CurveClass::Diagonal)
            }
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

impl std::str::FromStr for Condition {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Condition::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| format!("unknown condition `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "evidence", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub class: CurveClass,
    pub verdicts: Vec<(Condition, Verdict)>,
}

impl ConditionReport {
    pub fn violated(&self, c: Condition) -> bool {
        self.verdicts.iter().any(|(x, v)| *x == c && matches!(v, Verdict::Violated(_)))
    }

    /// True when some violation certifies a ratio of at least five.
    pub fn certifies_five(&self) -> bool {
        self.verdicts.iter().any(|(_, v)| matches!(v, Verdict::Violated(_)))
    }
}

/// One reading of the curve as a sequence of same-order fractions.
struct View<'a> {
    label: String,
    curve: &'a ValidCurve,
    side: i64,
    frames: Vec<Frame>,
    disp: Vec<(i64, i64)>,
    acc: Vec<Acceleration>,
    shape: Vec<Shape>,
}

impl<'a> View<'a> {
    fn new(curve: &'a ValidCurve, order: u32, reversed: bool) -> View<'a> {
        let frames = curve.frames_of_order(order);
        let disp = frames.iter().map(|f| curve.frame_displacement_int(f)).collect();
        let acc = frames.iter().map(|f| curve.frame_acceleration(f)).collect();
        let shape = frames.iter().map(|f| curve.frame_shape(f).expect("valid curves have axis-aligned steps")).collect();
        let label = format!("order {order}{}", if reversed { ", reversed" } else { "" });
        View { label, curve, side: (curve.k() as i64).pow(order), frames, disp, acc, shape }
    }

    fn len(&self) -> usize {
        self.frames.len()
    }

    fn turn(&self, i: usize) -> Turn {
        classify_turn(self.disp[i], self.disp[i + 1])
    }

    fn step(&self, i: usize) -> (i64, i64) {
        let (a, b) = (self.frames[i].origin, self.frames[i + 1].origin);
        (b.0 - a.0, b.1 - a.1)
    }

    /// Direction between two sub-fractions of fraction `i`, in units of the
    /// next order.
    fn sub_step(&self, i: usize, from: usize, to: usize) -> (i64, i64) {
        let c = self.curve.curve();
        let (a, b) = (self.frames[i].child(c, from), self.frames[i].child(c, to));
        (b.origin.0 - a.origin.0, b.origin.1 - a.origin.1)
    }

    fn on_boundary(&self, i: usize) -> bool {
        let (x, y) = self.frames[i].origin;
        x == 0 || y == 0 || x == self.side - 1 || y == self.side - 1
    }

    fn fail(&self, msg: String) -> Verdict {
        Verdict::Violated(format!("{}: {msg}", self.label))
    }
}

fn dist2(a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - b.0).pow(2) + (a.1 - b.1).pow(2)
}

fn first_failure(views: &[View<'_>], check: impl Fn(&View<'_>) -> Option<String>) -> Verdict {
    for v in views {
        if let Some(msg) = check(v) {
            return v.fail(msg);
        }
    }
    Verdict::Holds
}

fn side_contacts(v: &View<'_>) -> Option<String> {
    (0..v.len() - 1)
        .find(|&i| {
            let (dx, dy) = v.step(i);
            dx.abs() + dy.abs() != 1
        })
        .map(|i| format!("fractions {i} and {} meet only at a vertex", i + 1))
}

fn turns_decelerate_then_accelerate(v: &View<'_>) -> Option<String> {
    (0..v.len() - 1)
        .find(|&i| {
            v.turn(i) != Turn::Straight
                && !(v.acc[i] == Acceleration::Decelerating && v.acc[i + 1] == Acceleration::Accelerating)
        })
        .map(|i| format!("turn at {i}-{} with accelerations {:?}, {:?}", i + 1, v.acc[i], v.acc[i + 1]))
}

fn no_consecutive_turns(v: &View<'_>) -> Option<String> {
    (0..v.len().saturating_sub(2))
        .find(|&i| v.turn(i) != Turn::Straight && v.turn(i + 1) != Turn::Straight)
        .map(|i| format!("turns at {i}-{} and {}-{}", i + 1, i + 1, i + 2))
}

fn side_turn_after_deceleration(v: &View<'_>) -> Option<String> {
    (1..v.len() - 1)
        .find(|&j| {
            v.turn(j) == Turn::Side
                && !(v.acc[j - 1] == Acceleration::Decelerating && v.acc[j] == Acceleration::Decelerating)
        })
        .map(|j| format!("side turn at {j}-{} after accelerations {:?}, {:?}", j + 1, v.acc[j - 1], v.acc[j]))
}

fn no_side_turn_after_three(v: &View<'_>) -> Option<String> {
    (0..v.len().saturating_sub(3))
        .find(|&i| v.disp[i] == v.disp[i + 1] && v.disp[i + 1] == v.disp[i + 2] && v.turn(i + 2) == Turn::Side)
        .map(|i| format!("fractions {i}..{} straight, then a side turn", i + 2))
}

fn no_back_turn_after_four(v: &View<'_>) -> Option<String> {
    (0..v.len().saturating_sub(4))
        .find(|&i| {
            (i..i + 3).all(|j| v.disp[j] == v.disp[j + 1])
                && v.turn(i + 3) == Turn::Back
                && v.acc[i] == Acceleration::Accelerating
        })
        .map(|i| format!("fractions {i}..{} straight from an accelerating one, then a back turn", i + 3))
}

fn ends_on_boundary(v: &View<'_>) -> Option<String> {
    let n = v.len();
    (0..3.min(n)).chain(n.saturating_sub(3)..n).find(|&i| !v.on_boundary(i)).map(|i| format!("fraction {i} is interior"))
}

fn perpendicular_handoff(v: &View<'_>) -> Option<String> {
    let g = v.curve.genus() as usize;
    (0..v.len() - 1)
        .find(|&i| {
            let out = v.sub_step(i, g - 2, g - 1);
            let inn = v.sub_step(i + 1, 0, 1);
            if out.0 * inn.0 + out.1 * inn.1 == 0 {
                return false;
            }
            let (dx, dy) = v.step(i);
            if dx.abs() + dy.abs() != 1 {
                return true;
            }
            let along = (-dy, dx);
            let parallel = |d: (i64, i64)| d.0 * along.1 - d.1 * along.0 == 0;
            !(parallel(out) && parallel(inn))
        })
        .map(|i| format!("exit of {i} and entry of {} neither perpendicular nor along the common side", i + 1))
}

fn entry_shapes(v: &View<'_>) -> Option<String> {
    if v.len() < 3 {
        return None;
    }
    let (dx, dy) = v.step(0);
    let same = match (dx, dy) {
        (0, _) => Shape::Z,
        (_, 0) => Shape::N,
        _ => return None,
    };
    let ok = (v.shape[0] == same && v.shape[2] == same)
        || (v.acc[0] == Acceleration::Decelerating && v.acc[2] == Acceleration::Accelerating && v.shape[0] != v.shape[2]);
    (!ok).then(|| {
        format!(
            "entry step ({dx},{dy}); fractions 0 and 2 are {:?}/{:?}, {:?}/{:?}",
            v.shape[0], v.acc[0], v.shape[2], v.acc[2]
        )
    })
}

fn long_runs(v: &View<'_>) -> Option<String> {
    (0..v.len().saturating_sub(3))
        .find(|&i| {
            let s = v.step(i);
            let need = match s {
                (0, 1) | (0, -1) => Shape::Z,
                (1, 0) | (-1, 0) => Shape::N,
                _ => return false,
            };
            (i + 1..i + 3).all(|j| v.step(j) == s)
                && !(v.shape[i + 3] == need && v.acc[i + 3] == Acceleration::Accelerating)
        })
        .map(|i| format!("run {i}..{} ends with a {:?}/{:?} fraction", i + 3, v.shape[i + 3], v.acc[i + 3]))
}

fn inner_vertices(curve: &ValidCurve) -> Verdict {
    let [a, b, c, d] = curve.vertex_order().map(vertex_coords);
    if dist2(a, b) != 1 {
        Verdict::Violated(format!("second vertex {b:?} is diagonal to the entry {a:?}"))
    } else if dist2(c, d) != 1 {
        Verdict::Violated(format!("third vertex {c:?} is diagonal to the exit {d:?}"))
    } else {
        Verdict::Holds
    }
}

fn corner_gaps(curve: &ValidCurve) -> Verdict {
    let m = curve.corner_moments();
    let (lo, hi) = (Rational::new(1, 5), Rational::new(3, 5));
    for w in m.windows(2) {
        let gap = w[1].time - w[0].time;
        if gap <= lo || gap >= hi {
            return Verdict::Violated(format!("corner gap {gap} between {} and {}", w[0].time, w[1].time));
        }
    }
    Verdict::Holds
}

fn quick_corners(curve: &ValidCurve) -> Verdict {
    let m = curve.corner_moments();
    let bound = Rational::new(2, 5);
    if m[1].time >= bound {
        Verdict::Violated(format!("first internal corner at {}", m[1].time))
    } else if Rational::ONE - m[2].time >= bound {
        Verdict::Violated(format!("last internal corner at {}", m[2].time))
    } else {
        Verdict::Holds
    }
}

/// Verdict for every condition. Conditions for the other class of curves
/// hold vacuously.
pub fn five_necessary_conditions(curve: &ValidCurve) -> ConditionReport {
    let rev = curve.reversed();
    let views: Vec<View<'_>> = [1, 2]
        .into_iter()
        .flat_map(|m| [View::new(curve, m, false), View::new(&rev, m, true)])
        .collect();
    let class = curve.class();
    let verdicts = Condition::ALL
        .into_iter()
        .map(|c| {
            if c.class().is_some_and(|k| k != class) {
                return (c, Verdict::Holds);
            }
            use Condition::*;
            let v = match c {
                InnerVerticesBesideEnds => inner_vertices(curve),
                SideContacts => first_failure(&views, side_contacts),
                TurnsDecelerateThenAccelerate => first_failure(&views, turns_decelerate_then_accelerate),
                NoConsecutiveTurns => first_failure(&views, no_consecutive_turns),
                SideTurnAfterDeceleration => first_failure(&views, side_turn_after_deceleration),
                CornerGapsInRange => corner_gaps(curve),
                NoSideTurnAfterThreeStraight => first_failure(&views, no_side_turn_after_three),
                NoBackTurnAfterFourStraight => first_failure(&views, no_back_turn_after_four),
                EndsOnBoundary => first_failure(&views, ends_on_boundary),
                PerpendicularHandoff => first_failure(&views, perpendicular_handoff),
                QuickCorners => quick_corners(curve),
                EntryShapes => first_failure(&views, entry_shapes),
                LongRunsEndAccelerating => first_failure(&views, long_runs),
            };
            (c, v)
        })
        .collect();
    ConditionReport { class, verdicts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::FractalCurve;

    #[test]
    fn hilbert_report() {
        let h = FractalCurve::hilbert().into_valid().unwrap();
        let r = five_necessary_conditions(&h);
        assert_eq!(r.class, CurveClass::OneSided);
        assert!(!r.violated(Condition::SideContacts));
        assert!(!r.violated(Condition::InnerVerticesBesideEnds));
        // Hilbert turns at 0-1 and 2-3 with neutral fractions.
        assert!(r.violated(Condition::TurnsDecelerateThenAccelerate));
        assert!(r.certifies_five());
    }

    #[test]
    fn vertex_contact_is_flagged() {
        // Every valid k=2 curve is side-adjacent; vertex contacts need k=3.
        let spec = crate::search::EnumerationSpec::new(3);
        let mut seen = 0;
        for c in crate::search::enumerate_curves(&spec).take(2000) {
            let v = c.into_valid().unwrap();
            let touching = v.curve().validate().all_side_adjacent();
            let r = five_necessary_conditions(&v);
            if !touching {
                seen += 1;
                assert!(r.violated(Condition::SideContacts));
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn names_round_trip() {
        for c in Condition::ALL {
            assert_eq!(c.to_string().parse::<Condition>().unwrap(), c);
        }
    }
}
