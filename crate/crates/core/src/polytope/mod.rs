//! Exact feasibility of mixed strict/non-strict linear inequality systems by
//! Fourier–Motzkin elimination, with witnesses and Farkas-style certificates.
//! An exact simplex gives the same answers on systems too large to eliminate.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

mod simplex;

pub use simplex::feasible_simplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
        })
    }
}

/// An affine expression `Σ cᵥ·v + c₀`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinExpr {
    pub coeffs: BTreeMap<String, Rational>,
    pub constant: Rational,
}

impl LinExpr {
    pub fn var(name: &str) -> Self {
        Self::term(Rational::one(), name)
    }

    pub fn term(c: Rational, name: &str) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(name.to_string(), c);
        }
        LinExpr {
            coeffs,
            constant: Rational::zero(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn scale(mut self, c: &Rational) -> Self {
        if c.is_zero() {
            return LinExpr::default();
        }
        for v in self.coeffs.values_mut() {
            *v = &*v * c;
        }
        self.constant = &self.constant * c;
        self
    }

    pub fn lt(self, rhs: LinExpr) -> LinIneq {
        LinIneq::from_expr(self - rhs, Relation::Lt)
    }

    pub fn le(self, rhs: LinExpr) -> LinIneq {
        LinIneq::from_expr(self - rhs, Relation::Le)
    }

    pub fn gt(self, rhs: LinExpr) -> LinIneq {
        rhs.lt(self)
    }

    pub fn ge(self, rhs: LinExpr) -> LinIneq {
        rhs.le(self)
    }
}

impl Add for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: LinExpr) -> LinExpr {
        for (k, v) in rhs.coeffs {
            let e = self.coeffs.entry(k).or_insert_with(Rational::zero);
            *e += v;
        }
        self.coeffs.retain(|_, v| !v.is_zero());
        self.constant += rhs.constant;
        self
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self.scale(&Rational::from(-1))
    }
}

impl Sub for LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: LinExpr) -> LinExpr {
        self + (-rhs)
    }
}

impl Mul<&Rational> for LinExpr {
    type Output = LinExpr;
    fn mul(self, rhs: &Rational) -> LinExpr {
        self.scale(rhs)
    }
}

impl From<Rational> for LinExpr {
    fn from(c: Rational) -> Self {
        LinExpr::constant(c)
    }
}

/// `Σ coeffs[v]·v + constant REL 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinIneq {
    pub coeffs: BTreeMap<String, Rational>,
    pub constant: Rational,
    pub relation: Relation,
}

impl LinIneq {
    pub fn from_expr(e: LinExpr, relation: Relation) -> Self {
        let mut coeffs = e.coeffs;
        coeffs.retain(|_, v| !v.is_zero());
        LinIneq {
            coeffs,
            constant: e.constant,
            relation,
        }
    }

    pub fn is_strict(&self) -> bool {
        self.relation == Relation::Lt
    }

    /// Value of the left-hand side; missing variables count as zero.
    pub fn lhs_at(&self, point: &BTreeMap<String, Rational>) -> Rational {
        let mut s = self.constant.clone();
        for (v, c) in &self.coeffs {
            if let Some(x) = point.get(v) {
                s += c * x;
            }
        }
        s
    }

    pub fn holds_at(&self, point: &BTreeMap<String, Rational>) -> bool {
        let s = self.lhs_at(point);
        match self.relation {
            Relation::Lt => s.is_negative(),
            Relation::Le => !s.is_positive(),
        }
    }

    /// The complementary inequality (`a·x + c ≥ 0` becomes `−a·x − c ≤ 0`).
    pub fn negated(&self) -> LinIneq {
        let coeffs = self.coeffs.iter().map(|(k, v)| (k.clone(), -v)).collect();
        let relation = match self.relation {
            Relation::Lt => Relation::Le,
            Relation::Le => Relation::Lt,
        };
        LinIneq {
            coeffs,
            constant: -&self.constant,
            relation,
        }
    }

    /// Primitive integer form: coefficients (by variable), constant, strictness.
    pub fn primitive(&self) -> (BTreeMap<String, BigInt>, BigInt, Relation) {
        let mut lcm = BigInt::one();
        for c in self.coeffs.values().chain(std::iter::once(&self.constant)) {
            lcm = lcm.lcm(c.denom());
        }
        let scaled =
            |c: &Rational| (c.as_big() * BigRational::from_integer(lcm.clone())).to_integer();
        let mut coeffs: BTreeMap<String, BigInt> = self
            .coeffs
            .iter()
            .map(|(k, v)| (k.clone(), scaled(v)))
            .collect();
        let mut constant = scaled(&self.constant);
        let mut g = constant.abs();
        for c in coeffs.values() {
            g = g.gcd(c);
        }
        if !g.is_zero() && !g.is_one() {
            for c in coeffs.values_mut() {
                *c /= &g;
            }
            constant /= &g;
        }
        (coeffs, constant, self.relation)
    }
}

impl fmt::Display for LinIneq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (v, c) in &self.coeffs {
            if c.is_negative() {
                write!(f, " - {}*{}", c.abs(), v)?;
            } else {
                write!(f, " + {c}*{v}")?;
            }
        }
        write!(f, " {} 0", self.relation)
    }
}

impl FromStr for LinIneq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("inequality {s:?}: {msg}"));
        let ops: [(&str, bool, Relation); 6] = [
            ("<=", false, Relation::Le),
            ("≤", false, Relation::Le),
            (">=", true, Relation::Le),
            ("≥", true, Relation::Le),
            ("<", false, Relation::Lt),
            (">", true, Relation::Lt),
        ];
        let (pos, op, flip, rel) = ops
            .iter()
            .filter_map(|(op, flip, rel)| s.find(op).map(|p| (p, *op, *flip, *rel)))
            .min_by_key(|(p, op, _, _)| (*p, usize::MAX - op.len()))
            .ok_or_else(|| bad("missing relation"))?;
        let lhs = parse_expr(&s[..pos])?;
        let rhs = parse_expr(&s[pos + op.len()..])?;
        if ["<", ">", "≤", "≥", "="]
            .iter()
            .any(|o| s[pos + op.len()..].contains(o))
        {
            return Err(bad("more than one relation"));
        }
        let e = if flip { rhs - lhs } else { lhs - rhs };
        Ok(LinIneq::from_expr(e, rel))
    }
}

fn is_identifier(t: &str) -> bool {
    let mut chars = t.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Parses `term (± term)*` with terms `q`, `v` or `q*v`.
pub fn parse_expr(s: &str) -> Result<LinExpr> {
    let bad = |msg: &str| Error::Parse(format!("expression {s:?}: {msg}"));
    let mut out = LinExpr::default();
    let mut rest = s.trim();
    if rest.is_empty() {
        return Err(bad("empty"));
    }
    while !rest.is_empty() {
        let mut sign = Rational::one();
        loop {
            if let Some(r) = rest.strip_prefix('+') {
                rest = r.trim_start();
            } else if let Some(r) = rest.strip_prefix('-') {
                sign = -sign;
                rest = r.trim_start();
            } else {
                break;
            }
        }
        // a term ends at the next top-level + or - that is not part of a ratio
        let end = rest
            .char_indices()
            .skip(1)
            .find(|&(i, c)| (c == '+' || c == '-') && !rest[..i].trim_end().ends_with(['*', '/']))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        let term = rest[..end].trim();
        rest = rest[end..].trim_start();
        if term.is_empty() {
            return Err(bad("dangling operator"));
        }
        let (coef, var) = match term.split_once('*') {
            Some((c, v)) => (c.trim().parse::<Rational>()?, Some(v.trim())),
            None if is_identifier(term) => (Rational::one(), Some(term)),
            None => (term.parse::<Rational>()?, None),
        };
        let coef = coef * &sign;
        match var {
            Some(v) if is_identifier(v) => out = out + LinExpr::term(coef, v),
            Some(v) => return Err(bad(&format!("bad variable {v:?}"))),
            None => out = out + LinExpr::constant(coef),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinSystem {
    pub variables: Vec<String>,
    pub rows: Vec<LinIneq>,
}

impl LinSystem {
    pub fn new<S: Into<String>>(variables: impl IntoIterator<Item = S>) -> Self {
        LinSystem {
            variables: variables.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: LinIneq) -> Result<()> {
        if let Some(v) = row.coeffs.keys().find(|v| !self.variables.contains(v)) {
            return Err(Error::Structure(format!("undeclared variable {v:?}")));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Declares unknown variables on the fly.
    pub fn push_declaring(&mut self, row: LinIneq) {
        for v in row.coeffs.keys() {
            if !self.variables.contains(v) {
                self.variables.push(v.clone());
            }
        }
        self.rows.push(row);
    }

    pub fn with_row(&self, row: LinIneq) -> Result<LinSystem> {
        let mut s = self.clone();
        s.push(row)?;
        Ok(s)
    }

    /// The same rows, all made strict.
    pub fn strictified(&self) -> LinSystem {
        let rows = self
            .rows
            .iter()
            .map(|r| LinIneq {
                relation: Relation::Lt,
                ..r.clone()
            })
            .collect();
        LinSystem {
            variables: self.variables.clone(),
            rows,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("vars: {}\n", self.variables.join(", "));
        for r in &self.rows {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }
}

impl FromStr for LinSystem {
    type Err = Error;

    /// One inequality per line; `#` starts a comment; an optional
    /// `vars: a, b, c` line fixes the variable order.
    fn from_str(s: &str) -> Result<Self> {
        let mut sys = LinSystem::default();
        let mut declared = false;
        for line in s.lines() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(vars) = line.strip_prefix("vars:") {
                if declared || !sys.rows.is_empty() {
                    return Err(Error::Parse("vars: must come first and only once".into()));
                }
                for v in vars
                    .split([',', ' '])
                    .map(str::trim)
                    .filter(|v| !v.is_empty())
                {
                    if !is_identifier(v) {
                        return Err(Error::Parse(format!("bad variable {v:?}")));
                    }
                    sys.variables.push(v.to_string());
                }
                declared = true;
                continue;
            }
            let row: LinIneq = line.parse()?;
            if declared {
                sys.push(row)?;
            } else {
                sys.push_declaring(row);
            }
        }
        Ok(sys)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Feasible,
    Infeasible,
}

/// Nonnegative multipliers on the original rows whose combination has zero
/// variable part and a contradictory constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub multipliers: Vec<(usize, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<String, Rational>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }
}

/// A dense integer row `a·x + c REL 0` with `gcd(a) = 1` unless `a = 0`,
/// remembering which original rows (with which weights) it sums.
#[derive(Clone, Debug)]
struct Row {
    a: Vec<BigInt>,
    c: BigRational,
    strict: bool,
    history: Vec<(usize, BigRational)>,
}

impl Row {
    fn from_ineq(idx: usize, ineq: &LinIneq, vars: &HashMap<&str, usize>, n: usize) -> Row {
        let mut lcm = BigInt::one();
        for c in ineq.coeffs.values() {
            lcm = lcm.lcm(c.denom());
        }
        let mut a = vec![BigInt::zero(); n];
        for (v, c) in &ineq.coeffs {
            a[vars[v.as_str()]] =
                (c.as_big() * BigRational::from_integer(lcm.clone())).to_integer();
        }
        let scale = BigRational::from_integer(lcm);
        let mut row = Row {
            a,
            c: ineq.constant.as_big() * &scale,
            strict: ineq.is_strict(),
            history: vec![(idx, scale)],
        };
        row.normalize();
        row
    }

    fn normalize(&mut self) {
        let g = self.a.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if !g.is_zero() && !g.is_one() {
            for x in &mut self.a {
                *x /= &g;
            }
            let gq = BigRational::from_integer(g);
            self.c /= &gq;
            for (_, m) in &mut self.history {
                *m /= &gq;
            }
        }
    }

    fn is_trivial(&self) -> bool {
        self.a.iter().all(Zero::is_zero)
    }

    /// Whether a variable-free row is violated.
    fn contradicts(&self) -> bool {
        if self.strict {
            !self.c.is_negative()
        } else {
            self.c.is_positive()
        }
    }

    /// `β·p + α·q` with `α = p.a[v] > 0`, `β = −q.a[v] > 0`.
    fn combine(p: &Row, q: &Row, v: usize) -> Row {
        let alpha = &p.a[v];
        let beta = -&q.a[v];
        let a =
            p.a.iter()
                .zip(&q.a)
                .map(|(x, y)| &beta * x + alpha * y)
                .collect();
        let (al, be) = (
            BigRational::from_integer(alpha.clone()),
            BigRational::from_integer(beta),
        );
        let c = &be * &p.c + &al * &q.c;
        let mut history: Vec<(usize, BigRational)> =
            Vec::with_capacity(p.history.len() + q.history.len());
        let (mut i, mut j) = (0, 0);
        while i < p.history.len() || j < q.history.len() {
            let take_p =
                j == q.history.len() || (i < p.history.len() && p.history[i].0 < q.history[j].0);
            let take_q =
                i == p.history.len() || (j < q.history.len() && q.history[j].0 < p.history[i].0);
            if take_p {
                history.push((p.history[i].0, &be * &p.history[i].1));
                i += 1;
            } else if take_q {
                history.push((q.history[j].0, &al * &q.history[j].1));
                j += 1;
            } else {
                history.push((
                    p.history[i].0,
                    &be * &p.history[i].1 + &al * &q.history[j].1,
                ));
                i += 1;
                j += 1;
            }
        }
        let mut row = Row {
            a,
            c,
            strict: p.strict || q.strict,
            history,
        };
        row.normalize();
        row
    }

    /// Whether `self` implies `other` for rows with identical `a`.
    fn at_least_as_tight(&self, other: &Row) -> bool {
        self.c > other.c || (self.c == other.c && (self.strict || !other.strict))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EliminationOrder<'a> {
    /// Next variable minimizes `#positive × #negative` rows.
    Greedy,
    /// Fixed order by variable index.
    Fixed(&'a [usize]),
}

/// Decides feasibility with a witness or a certificate.
pub fn feasible(sys: &LinSystem) -> Result<FeasibilityResult> {
    feasible_with(sys, EliminationOrder::Greedy)
}

/// Like `feasible`, but also requires a nonempty interior (all rows strict).
pub fn feasible_interior(sys: &LinSystem) -> Result<FeasibilityResult> {
    feasible(&sys.strictified())
}

pub fn feasible_with(sys: &LinSystem, order: EliminationOrder<'_>) -> Result<FeasibilityResult> {
    feasible_rows(&sys.variables, &sys.rows, order)
}

/// `feasible_with` on borrowed variables and rows.
pub fn feasible_rows(
    variables: &[String],
    rows: &[LinIneq],
    order: EliminationOrder<'_>,
) -> Result<FeasibilityResult> {
    match eliminate(variables, rows, order, true) {
        Ok(r) => Ok(r),
        // support pruning removed a needed row; redo the plain elimination
        Err(Error::Internal(_)) => eliminate(variables, rows, order, false),
        Err(e) => Err(e),
    }
}

fn eliminate(
    variables: &[String],
    ineqs: &[LinIneq],
    order: EliminationOrder<'_>,
    support_pruning: bool,
) -> Result<FeasibilityResult> {
    let n = variables.len();
    let index: HashMap<&str, usize> = variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    for r in ineqs {
        if let Some(v) = r.coeffs.keys().find(|v| !index.contains_key(v.as_str())) {
            return Err(Error::Structure(format!("undeclared variable {v:?}")));
        }
    }
    let mut rows = Vec::with_capacity(ineqs.len());
    for (i, ineq) in ineqs.iter().enumerate() {
        let row = Row::from_ineq(i, ineq, &index, n);
        if row.is_trivial() {
            if row.contradicts() {
                return Ok(infeasible(&row));
            }
            continue;
        }
        rows.push(row);
    }
    rows = dedupe(rows);

    let mut remaining: Vec<usize> = (0..n).collect();
    let mut stages: Vec<(usize, Vec<Row>)> = Vec::with_capacity(n);
    let mut eliminated = 0usize;
    while !remaining.is_empty() {
        let v = match order {
            EliminationOrder::Greedy => *remaining
                .iter()
                .min_by_key(|&&v| {
                    let pos = rows.iter().filter(|r| r.a[v].is_positive()).count();
                    let neg = rows.iter().filter(|r| r.a[v].is_negative()).count();
                    (pos * neg, v)
                })
                .unwrap(),
            EliminationOrder::Fixed(ord) => *ord
                .get(eliminated)
                .filter(|v| remaining.contains(v))
                .ok_or_else(|| {
                    Error::Structure(
                        "elimination order is not a permutation of the variables".into(),
                    )
                })?,
        };
        remaining.retain(|&x| x != v);
        eliminated += 1;
        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), Vec::new());
        for r in &rows {
            if r.a[v].is_positive() {
                pos.push(r);
            } else if r.a[v].is_negative() {
                neg.push(r);
            } else {
                next.push(r.clone());
            }
        }
        for p in &pos {
            for q in &neg {
                let combined = Row::combine(p, q, v);
                if support_pruning && combined.history.len() > eliminated + 1 {
                    continue;
                }
                if combined.is_trivial() {
                    if combined.contradicts() {
                        return Ok(infeasible(&combined));
                    }
                    continue;
                }
                next.push(combined);
            }
        }
        stages.push((v, std::mem::replace(&mut rows, dedupe(next))));
    }
    let witness = back_substitute(&stages, n)?;
    let point: BTreeMap<String, Rational> = variables
        .iter()
        .cloned()
        .zip(witness.into_iter().map(Rational::from_big))
        .collect();
    if !ineqs.iter().all(|r| r.holds_at(&point)) {
        return Err(Error::Internal("witness violates a row".into()));
    }
    Ok(FeasibilityResult {
        verdict: Verdict::Feasible,
        witness: Some(point),
        certificate: None,
    })
}

fn infeasible(row: &Row) -> FeasibilityResult {
    let multipliers = row
        .history
        .iter()
        .filter(|(_, m)| !m.is_zero())
        .map(|(i, m)| (*i, Rational::from_big(m.clone())))
        .collect();
    FeasibilityResult {
        verdict: Verdict::Infeasible,
        witness: None,
        certificate: Some(Certificate { multipliers }),
    }
}

/// Keeps the tightest row per coefficient vector.
fn dedupe(rows: Vec<Row>) -> Vec<Row> {
    let mut best: HashMap<Vec<BigInt>, usize> = HashMap::with_capacity(rows.len());
    let mut out: Vec<Row> = Vec::with_capacity(rows.len());
    for r in rows {
        match best.get(&r.a) {
            Some(&i) => {
                if r.at_least_as_tight(&out[i]) && !out[i].at_least_as_tight(&r) {
                    out[i] = r;
                }
            }
            None => {
                best.insert(r.a.clone(), out.len());
                out.push(r);
            }
        }
    }
    out
}

fn back_substitute(stages: &[(usize, Vec<Row>)], n: usize) -> Result<Vec<BigRational>> {
    let mut x: Vec<Option<BigRational>> = vec![None; n];
    for (v, rows) in stages.iter().rev() {
        let v = *v;
        let mut lower: Option<(BigRational, bool)> = None;
        let mut upper: Option<(BigRational, bool)> = None;
        for r in rows {
            if r.a[v].is_zero() {
                continue;
            }
            // a_v·x_v + rest + c REL 0
            let mut rest = r.c.clone();
            for (j, aj) in r.a.iter().enumerate() {
                if j != v && !aj.is_zero() {
                    let xj = x[j]
                        .as_ref()
                        .ok_or_else(|| Error::Internal("unassigned variable".into()))?;
                    rest += BigRational::from_integer(aj.clone()) * xj;
                }
            }
            let bound = -rest / BigRational::from_integer(r.a[v].clone());
            if r.a[v].is_positive() {
                let tighter = match &upper {
                    None => true,
                    Some((u, s)) => bound < *u || (bound == *u && r.strict && !s),
                };
                if tighter {
                    upper = Some((bound, r.strict));
                }
            } else {
                let tighter = match &lower {
                    None => true,
                    Some((l, s)) => bound > *l || (bound == *l && r.strict && !s),
                };
                if tighter {
                    lower = Some((bound, r.strict));
                }
            }
        }
        let value = match (lower, upper) {
            (None, None) => BigRational::zero(),
            (Some((l, _)), None) => l + BigRational::one(),
            (None, Some((u, _))) => u - BigRational::one(),
            (Some((l, ls)), Some((u, us))) => {
                if l < u {
                    (l + u) / BigRational::from_integer(2.into())
                } else if l == u && !ls && !us {
                    l
                } else {
                    return Err(Error::Internal(
                        "empty range during back-substitution".into(),
                    ));
                }
            }
        };
        x[v] = Some(value);
    }
    Ok(x.into_iter()
        .map(|v| v.unwrap_or_else(BigRational::zero))
        .collect())
}

/// Rechecks a result from scratch: the witness satisfies every row, or the
/// certificate's nonnegative combination is contradictory.
pub fn verify_certificate(
    sys: &LinSystem,
    res: &FeasibilityResult,
) -> std::result::Result<(), String> {
    verify_rows(&sys.variables, &sys.rows, res)
}

/// `verify_certificate` on borrowed variables and rows.
pub fn verify_rows(
    variables: &[String],
    rows: &[LinIneq],
    res: &FeasibilityResult,
) -> std::result::Result<(), String> {
    match res.verdict {
        Verdict::Feasible => {
            let w = res
                .witness
                .as_ref()
                .ok_or("feasible verdict without witness")?;
            if let Some(v) = variables.iter().find(|v| !w.contains_key(*v)) {
                return Err(format!("witness misses variable {v}"));
            }
            match rows.iter().position(|r| !r.holds_at(w)) {
                Some(i) => Err(format!("row {i} ({}) fails at the witness", rows[i])),
                None => Ok(()),
            }
        }
        Verdict::Infeasible => {
            let cert = res
                .certificate
                .as_ref()
                .ok_or("infeasible verdict without certificate")?;
            let mut coeffs: BTreeMap<&str, Rational> = BTreeMap::new();
            let mut constant = Rational::zero();
            let mut strict = false;
            let mut any_positive = false;
            for (i, m) in &cert.multipliers {
                let row = rows
                    .get(*i)
                    .ok_or_else(|| format!("row index {i} out of range"))?;
                if m.is_negative() {
                    return Err(format!("negative multiplier on row {i}"));
                }
                if m.is_zero() {
                    continue;
                }
                any_positive = true;
                for (v, c) in &row.coeffs {
                    *coeffs.entry(v.as_str()).or_insert_with(Rational::zero) += c * m;
                }
                constant += &row.constant * m;
                strict |= row.is_strict();
            }
            if !any_positive {
                return Err("empty combination".into());
            }
            if let Some((v, _)) = coeffs.iter().find(|(_, c)| !c.is_zero()) {
                return Err(format!("combination leaves variable {v}"));
            }
            let contradictory = if strict {
                !constant.is_negative()
            } else {
                constant.is_positive()
            };
            if contradictory {
                Ok(())
            } else {
                Err(format!(
                    "combination gives {constant} {} 0, which holds",
                    if strict { "<" } else { "<=" }
                ))
            }
        }
    }
}
