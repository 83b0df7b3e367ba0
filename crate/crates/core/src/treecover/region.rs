//! Compact regions of ordered speed tuples cut out by polynomial inequalities.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::intervals::{Interval, IntervalSet};
use crate::rational::Rational;

/// Polynomial in `z1, …, zd`, keyed by exponent vectors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Polynomial {
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Polynomial {
    pub fn eval(&self, z: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(exps, c)| {
                let mut v = c.clone();
                for (i, &e) in exps.iter().enumerate() {
                    for _ in 0..e {
                        v = v * &z[i];
                    }
                }
                v
            })
            .sum()
    }

    /// A lower bound on the polynomial over the box `lo ≤ z ≤ hi`, `lo ≥ 0`.
    pub fn lower_bound(&self, lo: &[Rational], hi: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(exps, c)| {
                let corner = if c.is_positive() { lo } else { hi };
                let mut v = c.clone();
                for (i, &e) in exps.iter().enumerate() {
                    for _ in 0..e {
                        v = v * &corner[i];
                    }
                }
                v
            })
            .sum()
    }

    /// `(a, b)` with `p = a + b·z_var` once the other coordinates are fixed;
    /// `None` when `z_var` appears with degree above one.
    pub fn affine_in(&self, var: usize, z: &[Rational]) -> Option<(Rational, Rational)> {
        let (mut a, mut b) = (Rational::zero(), Rational::zero());
        for (exps, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in exps.iter().enumerate() {
                if i != var {
                    for _ in 0..e {
                        v = v * &z[i];
                    }
                }
            }
            match exps.get(var).copied().unwrap_or(0) {
                0 => a += v,
                1 => b += v,
                _ => return None,
            }
        }
        Some((a, b))
    }

    /// Number of variables the exponent vectors mention.
    pub fn arity(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().rposition(|&x| x > 0).map_or(0, |p| p + 1))
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, mut exps: Vec<u32>, c: Rational) {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        let slot = self.terms.entry(exps).or_insert_with(Rational::zero);
        *slot += c;
    }

    fn minus(mut self, other: &Polynomial) -> Polynomial {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), -c);
        }
        self.terms.retain(|_, c| !c.is_zero());
        self
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (exps, c)) in self.terms.iter().rev().enumerate() {
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            match n {
                0 if c.is_negative() => write!(f, "-")?,
                0 => {}
                _ => write!(f, " {sign} ")?,
            }
            let vars: Vec<String> = exps
                .iter()
                .enumerate()
                .flat_map(|(i, &e)| (0..e).map(move |_| format!("z{}", i + 1)))
                .collect();
            match (vars.is_empty(), mag == Rational::one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{}", vars.join("*"))?,
                (false, false) => write!(f, "{mag}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

fn parse_term(text: &str) -> Result<(Vec<u32>, Rational)> {
    let mut exps = Vec::new();
    let mut coeff = Rational::one();
    for factor in text.split('*').map(str::trim) {
        let (base, power) = match factor.split_once('^') {
            Some((b, p)) => (
                b.trim(),
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad power in {factor:?}")))?,
            ),
            None => (factor, 1),
        };
        if let Some(idx) = base.strip_prefix('z') {
            let i: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad variable {base:?}")))?;
            if i == 0 {
                return Err(Error::Parse("variables are numbered from z1".into()));
            }
            if exps.len() < i {
                exps.resize(i, 0);
            }
            exps[i - 1] += power;
        } else {
            let c: Rational = base.parse()?;
            for _ in 0..power {
                coeff = coeff * &c;
            }
        }
    }
    Ok((exps, coeff))
}

impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut poly = Polynomial::default();
        let mut rest = s.trim();
        if rest.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut negative = false;
        if let Some(r) = rest.strip_prefix('-') {
            negative = true;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        loop {
            let cut = rest.find(['+', '-']).unwrap_or(rest.len());
            let (exps, c) = parse_term(&rest[..cut])?;
            poly.add_term(exps, if negative { -c } else { c });
            if cut == rest.len() {
                break;
            }
            negative = rest.as_bytes()[cut] == b'-';
            rest = &rest[cut + 1..];
        }
        poly.terms.retain(|_, c| !c.is_zero());
        Ok(poly)
    }
}

/// `lhs ≤ rhs`, stored as `lhs − rhs ≤ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyConstraint {
    pub poly: Polynomial,
    text: String,
}

impl PolyConstraint {
    pub fn holds(&self, z: &[Rational]) -> bool {
        !self.poly.eval(z).is_positive()
    }
}

impl fmt::Display for PolyConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl FromStr for PolyConstraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (lhs, rhs) = s
            .split_once("<=")
            .ok_or_else(|| Error::Parse(format!("expected `<=` in {s:?}")))?;
        let poly = lhs.parse::<Polynomial>()?.minus(&rhs.parse()?);
        Ok(PolyConstraint {
            poly,
            text: format!("{} <= {}", lhs.trim(), rhs.trim()),
        })
    }
}

/// Propagates `lo ≤ z1 ≤ … ≤ zd ≤ hi`; `false` when a range becomes empty.
fn order_bounds(lo: &mut [Rational], hi: &mut [Rational]) -> bool {
    for p in 1..lo.len() {
        if lo[p] < lo[p - 1] {
            lo[p] = lo[p - 1].clone();
        }
    }
    for p in (0..hi.len() - 1).rev() {
        if hi[p] > hi[p + 1] {
            hi[p] = hi[p + 1].clone();
        }
    }
    lo.iter().zip(hi.iter()).all(|(l, h)| l <= h)
}

enum Narrowing {
    Empty,
    Shrunk,
    Unchanged,
}

/// Every corner of the box, free coordinates only.
fn corners(lo: &[Rational], hi: &[Rational], skip: Option<usize>) -> Vec<Vec<Rational>> {
    let free: Vec<usize> = (0..lo.len())
        .filter(|&i| Some(i) != skip && lo[i] != hi[i])
        .collect();
    (0..1usize << free.len())
        .map(|mask| {
            let mut z = lo.to_vec();
            for (bit, &i) in free.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    z[i] = hi[i].clone();
                }
            }
            z
        })
        .collect()
}

/// Narrows the box with `p ≤ 0` for a polynomial affine in each coordinate.
///
/// The minimum of such a polynomial over a box is attained at a corner, and
/// so are the extremes of the coefficients `a`, `b` in `p = a + b·z_v`; these
/// bound `z_v` from above when `b > 0` and from below when `b < 0`.
/// Returns `None` when the polynomial is not affine in some coordinate.
fn tighten(poly: &Polynomial, lo: &mut [Rational], hi: &mut [Rational]) -> Option<Narrowing> {
    let n = lo.len();
    let mut changed = false;
    for v in 0..n {
        if lo[v] == hi[v] {
            continue;
        }
        let mut coeffs = Vec::new();
        for z in corners(lo, hi, Some(v)) {
            coeffs.push(poly.affine_in(v, &z)?);
        }
        let min_a = coeffs
            .iter()
            .map(|(a, _)| a)
            .min()
            .expect("one corner")
            .clone();
        let min_b = coeffs
            .iter()
            .map(|(_, b)| b)
            .min()
            .expect("one corner")
            .clone();
        let max_b = coeffs
            .iter()
            .map(|(_, b)| b)
            .max()
            .expect("one corner")
            .clone();
        if min_b.is_positive() {
            // z_v ≤ −a/b for some corner-bounded a, b
            let top = -&min_a;
            let bound = if top.is_negative() {
                &top / &max_b
            } else {
                &top / &min_b
            };
            if bound < hi[v] {
                hi[v] = bound;
                changed = true;
            }
        } else if max_b.is_negative() {
            let bound = if min_a.is_negative() {
                &min_a / &(-&max_b)
            } else {
                &min_a / &(-&min_b)
            };
            if bound > lo[v] {
                lo[v] = bound;
                changed = true;
            }
        }
        if lo[v] > hi[v] {
            return Some(Narrowing::Empty);
        }
    }
    let feasible = corners(lo, hi, None)
        .iter()
        .any(|z| !poly.eval(z).is_positive());
    Some(match (feasible, changed) {
        (false, _) => Narrowing::Empty,
        (true, true) => Narrowing::Shrunk,
        (true, false) => Narrowing::Unchanged,
    })
}

impl Serialize for PolyConstraint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for PolyConstraint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Ordered tuples `1 ≤ z1 ≤ … ≤ zd ≤ C` satisfying every constraint and
/// lying outside the optional open cube `(1, b)^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompactRegion {
    pub dim: usize,
    pub box_hi: Rational,
    pub constraints: Vec<PolyConstraint>,
    pub excluded_open_cube: Option<Rational>,
    /// Upper bounds on the sorted coordinates, implied by the constraints.
    pub sorted_upper: Vec<Rational>,
}

impl CompactRegion {
    /// `𝒮^d ∩ [1, C]^d`.
    pub fn cube(dim: usize, box_hi: Rational) -> Result<Self> {
        if dim == 0 || box_hi <= 1 {
            return Err(param("need a positive dimension and a box bound above 1"));
        }
        Ok(CompactRegion {
            dim,
            sorted_upper: vec![box_hi.clone(); dim],
            box_hi,
            constraints: Vec::new(),
            excluded_open_cube: None,
        })
    }

    /// The four-dimensional region
    /// `5z1 ≤ 47, 2z2 ≤ 5z1, z2z3 + z1z3 ≤ 8z1z2, z3z4 + z2z4 ≤ 10z2z3`.
    ///
    /// On ordered tuples these give `z1 ≤ 47/5`, `z2 ≤ 47/2`,
    /// `z3 ≤ 8z1z2/(z1+z2) ≤ 376/7` and `z4 ≤ 10z2z3/(z2+z3) ≤ 176720/1081`,
    /// each right side being increasing in its arguments.
    pub fn four_dim_compact_part() -> Self {
        let constraints = [
            "5*z1 <= 47",
            "2*z2 <= 5*z1",
            "z2*z3 + z1*z3 <= 8*z1*z2",
            "z3*z4 + z2*z4 <= 10*z2*z3",
        ]
        .iter()
        .map(|c| c.parse().expect("valid constraint"))
        .collect();
        let box_hi = Rational::frac(176720, 1081);
        CompactRegion {
            dim: 4,
            sorted_upper: vec![
                Rational::frac(47, 5),
                Rational::frac(47, 2),
                Rational::frac(376, 7),
                box_hi.clone(),
            ],
            box_hi,
            constraints,
            excluded_open_cube: None,
        }
    }

    pub fn with_constraint(mut self, c: PolyConstraint) -> Result<Self> {
        if c.poly.arity() > self.dim {
            return Err(param(format!(
                "constraint {c} mentions more than {} variables",
                self.dim
            )));
        }
        self.constraints.push(c);
        Ok(self)
    }

    /// Removes the open cube `(1, b)^d`.
    pub fn excluding_open_cube(mut self, b: Rational) -> Self {
        self.excluded_open_cube = Some(b);
        self
    }

    /// Membership of an ordered tuple.
    pub fn contains_sorted(&self, z: &[Rational]) -> bool {
        z.len() == self.dim
            && z[0] >= 1
            && z.windows(2).all(|w| w[0] <= w[1])
            && z[self.dim - 1] <= self.box_hi
            && z.iter().zip(&self.sorted_upper).all(|(x, u)| x <= u)
            && self.constraints.iter().all(|c| c.holds(z))
            && !self
                .excluded_open_cube
                .as_ref()
                .is_some_and(|b| z.iter().all(|x| *x > 1 && x < b))
    }

    /// Membership in the symmetrization: some permutation of `z` is in the region.
    pub fn contains_any_order(&self, z: &[Rational]) -> bool {
        let mut sorted = z.to_vec();
        sorted.sort();
        self.contains_sorted(&sorted)
    }

    /// Whether the values in `partial` might be coordinates of a point of the
    /// symmetrization. `false` is a proof that they cannot. With one value
    /// missing the answer is exact; otherwise, for every way of placing them
    /// among the sorted positions, some bound or some constraint fails on the
    /// box left for the unknown coordinates.
    pub fn admits_partial(&self, partial: &[Rational]) -> bool {
        let j = partial.len();
        if j > self.dim {
            return false;
        }
        if j + 1 == self.dim {
            if let Some(set) = self.completion_set(partial) {
                return !set.is_empty();
            }
        }
        let mut known = partial.to_vec();
        known.sort();
        let mut slots = Vec::with_capacity(j);
        self.place(&known, 0, &mut slots)
    }

    /// Tries every increasing assignment of `known` to sorted positions.
    fn place(&self, known: &[Rational], from: usize, slots: &mut Vec<usize>) -> bool {
        let r = slots.len();
        if r == known.len() {
            return self.box_admits(known, slots);
        }
        let last_start = self.dim - (known.len() - r);
        for p in from..=last_start {
            if known[r] > self.sorted_upper[p] {
                continue;
            }
            slots.push(p);
            let ok = self.place(known, p + 1, slots);
            slots.pop();
            if ok {
                return true;
            }
        }
        false
    }

    fn box_admits(&self, known: &[Rational], slots: &[usize]) -> bool {
        self.tightened_box(known, slots).is_some()
    }

    /// The box left for the sorted coordinates once `known` sits at `slots`,
    /// narrowed by the ordering and the constraints; `None` when it is empty.
    fn tightened_box(
        &self,
        known: &[Rational],
        slots: &[usize],
    ) -> Option<(Vec<Rational>, Vec<Rational>)> {
        if known.first().is_some_and(|x| *x < 1) {
            return None;
        }
        let mut lo = vec![Rational::one(); self.dim];
        let mut hi = self.sorted_upper.clone();
        for (x, &p) in known.iter().zip(slots) {
            lo[p] = x.clone();
            hi[p] = x.clone();
        }
        for _ in 0..3 {
            if !order_bounds(&mut lo, &mut hi) {
                return None;
            }
            let mut changed = false;
            for c in &self.constraints {
                match tighten(&c.poly, &mut lo, &mut hi) {
                    Some(Narrowing::Empty) => return None,
                    Some(Narrowing::Shrunk) => changed = true,
                    Some(Narrowing::Unchanged) => {}
                    None => {
                        if c.poly.lower_bound(&lo, &hi).is_positive() {
                            return None;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        order_bounds(&mut lo, &mut hi).then_some((lo, hi))
    }

    /// A superset of the values a further coordinate can take when the
    /// values in `partial` are coordinates of a point of the symmetrization.
    /// Exact when one value is missing and the constraints allow it.
    pub fn next_coordinate_hull(&self, partial: &[Rational]) -> IntervalSet {
        if partial.len() >= self.dim {
            return IntervalSet::empty();
        }
        if partial.len() + 1 == self.dim {
            if let Some(set) = self.completion_set(partial) {
                return set;
            }
        }
        let mut known = partial.to_vec();
        known.sort();
        let mut parts = Vec::new();
        self.for_each_placement(&known, 0, &mut Vec::new(), &mut |slots| {
            if let Some((lo, hi)) = self.tightened_box(&known, slots) {
                for p in (0..self.dim).filter(|p| !slots.contains(p)) {
                    parts.extend(Interval::closed(lo[p].clone(), hi[p].clone()));
                }
            }
        });
        IntervalSet::from_parts(parts)
    }

    fn for_each_placement(
        &self,
        known: &[Rational],
        from: usize,
        slots: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        let r = slots.len();
        if r == known.len() {
            f(slots);
            return;
        }
        for p in from..=self.dim - (known.len() - r) {
            if known[r] <= self.sorted_upper[p] {
                slots.push(p);
                self.for_each_placement(known, p + 1, slots, f);
                slots.pop();
            }
        }
    }

    /// The values `x` for which `known` together with `x`, sorted, lies in the
    /// region, given `d − 1` known values. `None` when some constraint is not
    /// affine in a single coordinate.
    pub fn completion_set(&self, known: &[Rational]) -> Option<IntervalSet> {
        if known.len() + 1 != self.dim {
            return None;
        }
        let mut sorted = known.to_vec();
        sorted.sort();
        let mut parts = Vec::new();
        let mut z: Vec<Rational> = Vec::with_capacity(self.dim);
        'position: for p in 0..self.dim {
            z.clear();
            z.extend(sorted[..p].iter().cloned());
            z.push(Rational::zero());
            z.extend(sorted[p..].iter().cloned());
            for (i, x) in z.iter().enumerate() {
                if i != p && (*x < 1 || *x > self.sorted_upper[i]) {
                    continue 'position;
                }
            }
            let mut lo = if p == 0 {
                Rational::one()
            } else {
                z[p - 1].clone()
            };
            let mut hi = if p + 1 == self.dim {
                self.box_hi.clone()
            } else {
                z[p + 1].clone()
            };
            hi = hi
                .min(self.sorted_upper[p].clone())
                .min(self.box_hi.clone());
            for c in &self.constraints {
                let (a, b) = c.poly.affine_in(p, &z)?;
                if b.is_positive() {
                    hi = hi.min(-&a / &b);
                } else if b.is_negative() {
                    lo = lo.max(-&a / &b);
                } else if a.is_positive() {
                    continue 'position;
                }
            }
            parts.extend(Interval::closed(lo, hi));
        }
        let mut set = IntervalSet::from_parts(parts);
        if let Some(b) = &self.excluded_open_cube {
            if sorted.iter().all(|x| *x > 1 && x < b) {
                set = set.subtract(&IntervalSet::open(Rational::one(), b.clone()));
            }
        }
        Some(set)
    }

    pub fn describe(&self) -> Vec<String> {
        let mut out = vec![format!(
            "1 <= z1 <= ... <= z{} <= {}",
            self.dim, self.box_hi
        )];
        out.extend(self.constraints.iter().map(|c| c.to_string()));
        if let Some(b) = &self.excluded_open_cube {
            out.push(format!("not in (1,{b})^{}", self.dim));
        }
        out
    }
}
