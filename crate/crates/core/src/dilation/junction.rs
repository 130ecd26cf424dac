//! Junctions: pairs of adjacent same-order fractions, up to similarity.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::curve::{Frame, ValidCurve};
use crate::geometry::Isometry;

/// Similarity-invariant description of a junction `(a, b)`.
///
/// The offset is the step from `a`'s cell to `b`'s cell (both of side 1);
/// the isometries and flags are those of the two fractions. Two junctions
/// have the same key iff one is carried onto the other by a similarity of
/// the plane, possibly combined with time reversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct JunctionKey {
    pub offset: (i64, i64),
    pub iso_a: Isometry,
    pub rev_a: bool,
    pub iso_b: Isometry,
    pub rev_b: bool,
}

impl JunctionKey {
    fn of(a: &Frame, b: &Frame) -> JunctionKey {
        JunctionKey {
            offset: (b.origin.0 - a.origin.0, b.origin.1 - a.origin.1),
            iso_a: a.iso,
            rev_a: a.reversed,
            iso_b: b.iso,
            rev_b: b.reversed,
        }
    }

    fn moved(&self, h: Isometry) -> JunctionKey {
        JunctionKey {
            offset: h.apply_vector(self.offset),
            iso_a: h.compose(self.iso_a),
            rev_a: self.rev_a,
            iso_b: h.compose(self.iso_b),
            rev_b: self.rev_b,
        }
    }

    fn backwards(&self) -> JunctionKey {
        JunctionKey {
            offset: (-self.offset.0, -self.offset.1),
            iso_a: self.iso_b,
            rev_a: !self.rev_b,
            iso_b: self.iso_a,
            rev_b: !self.rev_a,
        }
    }

    /// Smallest of the sixteen equivalent descriptions.
    pub fn canonical(&self) -> JunctionKey {
        let back = self.backwards();
        Isometry::ALL
            .into_iter()
            .flat_map(|h| [self.moved(h), back.moved(h)])
            .min()
            .expect("nonempty")
    }

    /// True when the two cells share a side.
    pub fn side_adjacent(&self) -> bool {
        self.offset.0.abs() + self.offset.1.abs() == 1
    }
}

impl fmt::Display for JunctionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = |b: bool| if b { "'" } else { "" };
        write!(
            f,
            "{}{} -> {}{} @ ({},{})",
            self.iso_a,
            r(self.rev_a),
            self.iso_b,
            r(self.rev_b),
            self.offset.0,
            self.offset.1
        )
    }
}

pub(crate) fn junction_key(a: &Frame, b: &Frame) -> JunctionKey {
    JunctionKey::of(a, b).canonical()
}

/// One similarity class of junctions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JunctionClass {
    pub key: JunctionKey,
    /// Concrete junctions met by the closure that fall in this class.
    pub multiplicity: u64,
    /// First concrete junction found in the class.
    pub representative: (Frame, Frame),
}

/// All junction classes, in order of discovery.
///
/// Seeds are the `g − 1` first-order junctions. The junction straddling the
/// boundary of a junction `(a, b)` is (last child of `a`, first child of
/// `b`); its class depends only on the class of `(a, b)`, so new classes are
/// subdivided until none appear.
pub fn junction_classes(curve: &ValidCurve) -> Vec<JunctionClass> {
    let g = curve.genus() as usize;
    let c = curve.curve();
    let mut classes: Vec<JunctionClass> = Vec::new();
    let mut index: BTreeMap<JunctionKey, usize> = BTreeMap::new();
    let mut queue: VecDeque<(Frame, Frame)> =
        (0..g - 1).map(|i| (Frame::ROOT.child(c, i), Frame::ROOT.child(c, i + 1))).collect();
    while let Some((a, b)) = queue.pop_front() {
        let key = junction_key(&a, &b);
        match index.get(&key) {
            Some(&i) => classes[i].multiplicity += 1,
            None => {
                index.insert(key, classes.len());
                classes.push(JunctionClass { key, multiplicity: 1, representative: (a, b) });
                queue.push_back((a.child(c, g - 1), b.child(c, 0)));
            }
        }
    }
    classes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::FractalCurve;

    #[test]
    fn first_order_junctions_are_seeded() {
        for c in [FractalCurve::hilbert(), FractalCurve::peano()] {
            let v = c.into_valid().unwrap();
            let classes = junction_classes(&v);
            let g = v.genus() as usize;
            for i in 0..g - 1 {
                let a = Frame::ROOT.child(v.curve(), i);
                let b = Frame::ROOT.child(v.curve(), i + 1);
                let key = junction_key(&a, &b);
                assert!(classes.iter().any(|cl| cl.key == key));
            }
            for cl in &classes {
                assert_eq!(cl.key.canonical(), cl.key);
                let (a, b) = cl.representative;
                assert_eq!(junction_key(&a, &b), cl.key);
            }
        }
    }

    #[test]
    fn hilbert_class_count() {
        let v = FractalCurve::hilbert().into_valid().unwrap();
        let classes = junction_classes(&v);
        assert!(classes.iter().all(|c| c.key.side_adjacent()));
        // Three first-order classes plus one that first appears at order two.
        assert_eq!(classes.len(), 4);
        assert_eq!(classes[3].representative.0.depth, 2);
    }

    #[test]
    fn class_count_survives_curve_symmetries() {
        for c in [FractalCurve::hilbert(), FractalCurve::peano()] {
            let v = c.into_valid().unwrap();
            let n = junction_classes(&v).len();
            for g in Isometry::ALL {
                assert_eq!(junction_classes(&v.conjugated(g)).len(), n);
                assert_eq!(junction_classes(&v.conjugated(g).reversed()).len(), n);
            }
        }
    }
}
