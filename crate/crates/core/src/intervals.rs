//! Finite unions of rational intervals with exact endpoint kinds.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{param, Error, Result};
use crate::rational::Rational;

/// A nonempty interval. A degenerate interval (`lo == hi`) is always closed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
    lo_closed: bool,
    hi_closed: bool,
}

impl Interval {
    /// Returns `None` when the described set is empty.
    pub fn new(lo: Rational, lo_closed: bool, hi: Rational, hi_closed: bool) -> Option<Self> {
        match lo.cmp(&hi) {
            Ordering::Less => Some(Interval {
                lo,
                hi,
                lo_closed,
                hi_closed,
            }),
            Ordering::Equal if lo_closed && hi_closed => Some(Interval {
                lo,
                hi,
                lo_closed,
                hi_closed,
            }),
            _ => None,
        }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Option<Self> {
        Self::new(lo, true, hi, true)
    }

    pub fn open(lo: Rational, hi: Rational) -> Option<Self> {
        Self::new(lo, false, hi, false)
    }

    pub fn point(x: Rational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = match x.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        let below = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, lo_closed, hi, hi_closed)
    }

    /// Pieces of `self` lying outside `other` (at most two).
    fn minus(&self, other: &Interval) -> Vec<Interval> {
        let mut out = Vec::with_capacity(2);
        // part below other.lo; includes other.lo itself iff other excludes it
        let hi = self.hi.clone().min(other.lo.clone());
        let hi_closed = if hi == other.lo && hi == self.hi {
            self.hi_closed && !other.lo_closed
        } else if hi == other.lo {
            !other.lo_closed
        } else {
            self.hi_closed
        };
        if let Some(p) = Interval::new(self.lo.clone(), self.lo_closed, hi, hi_closed) {
            out.push(p);
        }
        let lo = self.lo.clone().max(other.hi.clone());
        let lo_closed = if lo == other.hi && lo == self.lo {
            self.lo_closed && !other.hi_closed
        } else if lo == other.hi {
            !other.hi_closed
        } else {
            self.lo_closed
        };
        if let Some(p) = Interval::new(lo, lo_closed, self.hi.clone(), self.hi_closed) {
            out.push(p);
        }
        out
    }

    fn map_affine(&self, num: &Rational, shift: &Rational) -> Interval {
        Interval {
            lo: &self.lo * num + shift,
            hi: &self.hi * num + shift,
            lo_closed: self.lo_closed,
            hi_closed: self.hi_closed,
        }
    }

    /// Orders by left endpoint, a closed left endpoint first.
    fn cmp_lo(&self, other: &Interval) -> Ordering {
        self.lo
            .cmp(&other.lo)
            .then(other.lo_closed.cmp(&self.lo_closed))
    }

    /// Whether `next` (starting no earlier than `self`) joins `self` into one interval.
    fn joins_following(&self, next: &Interval) -> bool {
        match next.lo.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => next.lo_closed || self.hi_closed,
            Ordering::Greater => false,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", self.lo);
        }
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{},{}{r}", self.lo, self.hi)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A canonical finite union of intervals: sorted, pairwise disjoint, and
/// with no two parts sharing a point.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn from_parts(parts: impl IntoIterator<Item = Interval>) -> Self {
        let mut parts: Vec<Interval> = parts.into_iter().collect();
        parts.sort_by(Interval::cmp_lo);
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            if let Some(last) = merged.last_mut() {
                if last.joins_following(&p) {
                    match p.hi.cmp(&last.hi) {
                        Ordering::Greater => {
                            last.hi = p.hi;
                            last.hi_closed = p.hi_closed;
                        }
                        Ordering::Equal => last.hi_closed |= p.hi_closed,
                        Ordering::Less => {}
                    }
                    continue;
                }
            }
            merged.push(p);
        }
        IntervalSet { parts: merged }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Self::from_parts(Interval::closed(lo, hi))
    }

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Self::from_parts(Interval::open(lo, hi))
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let i = self.parts.partition_point(|p| p.hi < *x);
        self.parts[i..].iter().take(2).any(|p| p.contains(x))
    }

    /// Lebesgue measure; endpoint kinds are irrelevant.
    pub fn measure(&self) -> Rational {
        self.parts.iter().map(Interval::length).sum()
    }

    pub fn longest_part(&self) -> Rational {
        self.parts
            .iter()
            .map(Interval::length)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Left endpoints of the parts (the set A⁻ for a closed set).
    pub fn lefts(&self) -> Vec<Rational> {
        self.parts.iter().map(|p| p.lo.clone()).collect()
    }

    /// Right endpoints of the parts (the set A⁺ for a closed set).
    pub fn rights(&self) -> Vec<Rational> {
        self.parts.iter().map(|p| p.hi.clone()).collect()
    }

    pub fn min(&self) -> Option<&Rational> {
        self.parts.first().map(|p| &p.lo)
    }

    pub fn max(&self) -> Option<&Rational> {
        self.parts.last().map(|p| &p.hi)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        Self::from_parts(self.parts.iter().chain(&other.parts).cloned())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.parts, &other.parts);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            if let Some(p) = a[i].intersect(&b[j]) {
                out.push(p);
            }
            // advance whichever part ends first
            let a_first = match a[i].hi.cmp(&b[j].hi) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => !a[i].hi_closed || b[j].hi_closed,
            };
            if a_first {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_parts(out)
    }

    pub fn subtract(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for part in &self.parts {
            let mut pieces = vec![part.clone()];
            let start = other.parts.partition_point(|b| b.hi < part.lo);
            for b in &other.parts[start..] {
                if b.lo > part.hi {
                    break;
                }
                pieces = pieces.iter().flat_map(|p| p.minus(b)).collect();
                if pieces.is_empty() {
                    break;
                }
            }
            out.extend(pieces);
        }
        Self::from_parts(out)
    }

    /// Image under `x ↦ x·num + shift`; `num` must be positive.
    pub fn scale_translate(&self, num: &Rational, shift: &Rational) -> Result<IntervalSet> {
        if !num.is_positive() {
            return Err(param("nonpositive scale"));
        }
        Ok(IntervalSet {
            parts: self
                .parts
                .iter()
                .map(|p| p.map_affine(num, shift))
                .collect(),
        })
    }

    /// Image under `x ↦ x/den`; `den` must be positive.
    pub fn divide_by(&self, den: &Rational) -> Result<IntervalSet> {
        self.scale_translate(
            &den.recip().map_err(|_| param("nonpositive scale"))?,
            &Rational::zero(),
        )
    }

    pub fn closure(&self) -> IntervalSet {
        Self::from_parts(self.parts.iter().map(|p| Interval {
            lo: p.lo.clone(),
            hi: p.hi.clone(),
            lo_closed: true,
            hi_closed: true,
        }))
    }

    /// The half-open view `∪ (a, b]` over the parts `[a, b]`; degenerate parts vanish.
    pub fn half_open_view(&self) -> IntervalSet {
        Self::from_parts(
            self.parts
                .iter()
                .filter_map(|p| Interval::new(p.lo.clone(), false, p.hi.clone(), true)),
        )
    }

    pub fn is_closed(&self) -> bool {
        self.parts.iter().all(|p| p.lo_closed && p.hi_closed)
    }
}

/// `Clos(k ∩ ∪_m (m+δ, m+1−δ]/z)` over all `m ≥ 0` with `(m+δ)/z ≤ upper`.
pub fn closure_of_halfopen_trim(
    k: &IntervalSet,
    z: &Rational,
    delta: &Rational,
    upper: &Rational,
) -> Result<IntervalSet> {
    if *z <= 1 {
        return Err(param("z must exceed 1"));
    }
    check_delta(delta)?;
    if let Some(top) = k.max() {
        if top > upper {
            return Err(param("interval set exceeds the stated upper bound"));
        }
    }
    let mut pieces = Vec::new();
    for part in k.parts() {
        // (m+δ, m+1−δ]/z meets [a, b] iff m+δ < b·z and m+1−δ ≥ a·z; the
        // closure of the intersection is [max(a, lo), min(b, hi)]
        let (a, b) = (part.lo(), part.hi());
        let mut m = first_meeting_index(part, z, delta);
        loop {
            let mq = Rational::from(m.clone());
            let lo = (&mq + delta) / z;
            if lo >= *b || lo > *upper {
                break;
            }
            let hi = (&mq + 1 - delta) / z;
            pieces.extend(Interval::closed(lo.max(a.clone()), hi.min(b.clone())));
            m += 1;
        }
    }
    Ok(IntervalSet::from_parts(pieces))
}

/// Whether `k ∩ (∪_m (m+δ, m+1−δ]/z)` is nonempty, without building it.
pub fn meets_halfopen_kwais(k: &IntervalSet, z: &Rational, delta: &Rational) -> bool {
    k.parts()
        .iter()
        .any(|part| Rational::from(first_meeting_index(part, z, delta)) + delta < part.hi() * z)
}

/// Least `m ≥ 0` whose window `(m+δ, m+1−δ]/z` reaches the left end of `part`.
fn first_meeting_index(part: &Interval, z: &Rational, delta: &Rational) -> BigInt {
    let reach = part.lo() * z - 1 + delta;
    let mut m = reach.ceil();
    if !part.lo_closed() && Rational::from(m.clone()) == reach {
        m += 1;
    }
    m.max(BigInt::from(0))
}

pub(crate) fn check_delta(delta: &Rational) -> Result<()> {
    if !delta.is_positive() || *delta >= Rational::frac(1, 2) {
        return Err(param(format!("delta {delta} outside (0, 1/2)")));
    }
    Ok(())
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for IntervalSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "∅" {
            return Ok(IntervalSet::empty());
        }
        let bad = |msg: &str| Error::Parse(format!("interval set {s:?}: {msg}"));
        let mut parts = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest.chars().next().unwrap();
            let close_at = rest
                .find([']', ')', '}'])
                .ok_or_else(|| bad("unterminated part"))?;
            let close = rest[close_at..].chars().next().unwrap();
            let body = &rest[1..close_at];
            let part = match (open, close) {
                ('{', '}') => Interval::point(body.parse()?),
                ('[' | '(', ']' | ')') => {
                    let (a, b) = body.split_once(',').ok_or_else(|| bad("missing comma"))?;
                    Interval::new(a.parse()?, open == '[', b.parse()?, close == ']')
                        .ok_or_else(|| bad("empty part"))?
                }
                _ => return Err(bad("mismatched brackets")),
            };
            parts.push(part);
            rest = rest[close_at + 1..].trim_start();
        }
        Ok(IntervalSet::from_parts(parts))
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn set(s: &str) -> IntervalSet {
        s.parse().unwrap()
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(
            set("[1/4,3/4]").intersect(&set("[1/4,3/4]")),
            set("[1/4,3/4]")
        );
        assert!(set("[1/4,3/4]").intersect(&set("(3/4,5/4)")).is_empty());
        assert_eq!(
            set("[0,1] [2,3]").intersect(&set("[1/2,5/2]")),
            set("[1/2,1] [2,5/2]")
        );
    }

    #[test]
    fn subtract_examples() {
        assert_eq!(
            set("[1/4,3/4]").subtract(&set("(3/8,5/8)")),
            set("[1/4,3/8] [5/8,3/4]")
        );
        assert_eq!(
            set("[1/4,3/4]").subtract(&set("(-1/4,1/4) (3/4,5/4)")),
            set("[1/4,3/4]")
        );
        let r = set("[0,1]").subtract(&set("(0,1)"));
        assert_eq!(r.to_string(), "{0} {1}");
        assert_eq!(
            set("[0,2]").subtract(&set("{1}")).to_string(),
            "[0,1) (1,2]"
        );
    }

    #[test]
    fn canonical_merging() {
        assert_eq!(set("[0,1] [1,2]").to_string(), "[0,2]");
        assert_eq!(set("[0,1) [1,2]").to_string(), "[0,2]");
        assert_eq!(set("(0,1) (1,2)").to_string(), "(0,1) (1,2)");
        assert_eq!(set("[0,3] (1,2) {5}").to_string(), "[0,3] {5}");
        assert_eq!(set("[0,1) (1,2]").closure().to_string(), "[0,2]");
    }

    #[test]
    fn scale_translate_examples() {
        assert_eq!(
            set("[1,2]").scale_translate(&q(1, 2), &q(0, 1)).unwrap(),
            set("[1/2,1]")
        );
        assert_eq!(
            set("[5/4,7/4]")
                .scale_translate(&q(1, 2), &q(0, 1))
                .unwrap(),
            set("[5/8,7/8]")
        );
        let c = set("(1,4/3)").scale_translate(&q(1, 2), &q(1, 3)).unwrap();
        assert_eq!(c, set("(5/6,1)"));
        assert!(set("[1,2]").scale_translate(&q(0, 1), &q(0, 1)).is_err());
    }

    #[test]
    fn halfopen_trim_examples() {
        let r = closure_of_halfopen_trim(&set("[1/4,3/4]"), &q(3, 2), &q(1, 4), &q(1, 1)).unwrap();
        assert_eq!(r, set("[1/4,1/2]"));
        let r = closure_of_halfopen_trim(&IntervalSet::empty(), &q(3, 2), &q(1, 4), &q(1, 1));
        assert!(r.unwrap().is_empty());
        assert!(closure_of_halfopen_trim(&set("[0,1]"), &q(1, 1), &q(1, 4), &q(1, 1)).is_err());
    }

    #[test]
    fn halfopen_trim_keeps_degenerate_point_inside_a_window() {
        // 3/4 · 4/3 = 1 ∈ (1/4, 3/4]? no; 3/4 · 5/4 = 15/16 ∈ (5/4, 7/4]? no; 3/4·2 = 3/2 ∈ (5/4, 7/4] yes
        let k = set("{3/4}");
        let delta = q(1, 4);
        assert!(closure_of_halfopen_trim(&k, &q(4, 3), &delta, &q(3, 4))
            .unwrap()
            .is_empty());
        assert_eq!(
            closure_of_halfopen_trim(&k, &q(2, 1), &delta, &q(3, 4)).unwrap(),
            k
        );
        // the left end of a half-open window is excluded: 3/4 · 5/3 = 5/4
        assert!(closure_of_halfopen_trim(&k, &q(5, 3), &delta, &q(3, 4))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["[1,2", "[2,1]", "(1,1)", "[1;2]", "{1,2}", "[1,2}"] {
            assert!(s.parse::<IntervalSet>().is_err(), "{s}");
        }
    }
}
