//! Exact simplex on the homogenized system.
//!
//! `a·x + c REL 0` becomes `a·x + c·u + [strict]·t ≤ 0` with `t ≤ u` and
//! `t ≤ 1`; the system is feasible iff the largest `t` is positive. The
//! origin is a feasible basis, so no first phase is needed, and the final
//! reduced costs give the multipliers of an infeasibility certificate.
//!
//! The dictionary is kept fraction-free: entries are integers over a common
//! denominator and every update divides exactly. Arithmetic runs in `i128`
//! and restarts in `BigInt` on overflow.

use std::collections::{BTreeMap, HashMap};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

use super::{Certificate, FeasibilityResult, LinIneq, Verdict};
use crate::error::{Error, Result};
use crate::rational::Rational;

trait Ring: Clone + Ord + Sized {
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn zero() -> Self;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    fn div_exact(&self, o: &Self) -> Self;
    fn sign(&self) -> i8;
}

impl Ring for i128 {
    fn from_big(b: &BigInt) -> Option<Self> {
        i128::try_from(b).ok()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn zero() -> Self {
        0
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn sign(&self) -> i8 {
        self.signum() as i8
    }
}

impl Ring for BigInt {
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn sign(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
}

/// Dictionary `basic_i = (b_i − Σ_j t_ij·nonbasic_j) / den`,
/// objective `(v + Σ_j d_j·nonbasic_j) / den`.
struct Tableau<T> {
    t: Vec<Vec<T>>,
    b: Vec<T>,
    d: Vec<T>,
    v: T,
    den: T,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
}

impl<T: Ring> Tableau<T> {
    /// `x' = (p·x − x_s·y_r) / den` for every entry off the pivot row and column.
    fn pivot(&mut self, r: usize, s: usize) -> Option<()> {
        let p = self.t[r][s].clone();
        let den = self.den.clone();
        let upd = |x: &T, xs: &T, yr: &T| -> Option<T> {
            Some(p.mul(x)?.sub(&xs.mul(yr)?)?.div_exact(&den))
        };
        for i in 0..self.t.len() {
            if i == r {
                continue;
            }
            let xs = self.t[i][s].clone();
            for j in 0..self.t[i].len() {
                if j != s {
                    self.t[i][j] = upd(&self.t[i][j], &xs, &self.t[r][j])?;
                }
            }
            self.b[i] = upd(&self.b[i], &xs, &self.b[r])?;
            self.t[i][s] = xs.neg()?;
        }
        let ds = self.d[s].clone();
        for j in 0..self.d.len() {
            if j != s {
                self.d[j] = upd(&self.d[j], &ds, &self.t[r][j])?;
            }
        }
        self.v = p
            .mul(&self.v)?
            .sub(&ds.neg()?.mul(&self.b[r])?)?
            .div_exact(&den);
        self.d[s] = ds.neg()?;
        self.t[r][s] = den;
        self.den = p;
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[s]);
        Some(())
    }

    /// Maximizes with Bland's rule; `None` on overflow.
    fn solve(&mut self) -> Option<Result<()>> {
        loop {
            let entering = (0..self.d.len())
                .filter(|&j| self.d[j].sign() > 0)
                .min_by_key(|&j| self.nonbasic[j]);
            let Some(s) = entering else {
                return Some(Ok(()));
            };
            let mut leave: Option<usize> = None;
            for i in 0..self.t.len() {
                if self.t[i][s].sign() <= 0 {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some(k) => {
                        // b_i / t_is against b_k / t_ks, both denominators positive
                        let lhs = self.b[i].mul(&self.t[k][s])?;
                        let rhs = self.b[k].mul(&self.t[i][s])?;
                        lhs < rhs || (lhs == rhs && self.basic[i] < self.basic[k])
                    }
                };
                if better {
                    leave = Some(i);
                }
            }
            let Some(r) = leave else {
                return Some(Err(Error::Internal("unbounded homogenized program".into())));
            };
            self.pivot(r, s)?;
        }
    }
}

/// Integer rows with per-row scale factors.
struct Program {
    rows: Vec<Vec<BigInt>>,
    scale: Vec<BigRational>,
    cols: usize,
}

enum Outcome {
    Feasible(Vec<BigRational>),
    Infeasible(Vec<(usize, BigRational)>),
}

fn run<T: Ring>(prog: &Program) -> Option<Result<Outcome>> {
    let cols = prog.cols;
    let (col_u, col_t) = (cols - 2, cols - 1);
    let mut t: Vec<Vec<T>> = Vec::with_capacity(prog.rows.len() + 2);
    for r in &prog.rows {
        t.push(r.iter().map(T::from_big).collect::<Option<_>>()?);
    }
    let unit = T::from_big(&BigInt::one())?;
    let mut cap_u = vec![T::zero(); cols];
    cap_u[col_u] = unit.neg()?;
    cap_u[col_t] = unit.clone();
    t.push(cap_u);
    let mut cap_t = vec![T::zero(); cols];
    cap_t[col_t] = unit.clone();
    t.push(cap_t);
    let m = t.len();
    let mut b = vec![T::zero(); m];
    b[m - 1] = unit.clone();
    let mut d = vec![T::zero(); cols];
    d[col_t] = unit.clone();
    let mut tab = Tableau {
        t,
        b,
        d,
        v: T::zero(),
        den: unit,
        basic: (cols..cols + m).collect(),
        nonbasic: (0..cols).collect(),
    };
    if let Err(e) = tab.solve()? {
        return Some(Err(e));
    }
    let den = BigRational::from_integer(tab.den.to_big());
    if tab.v.sign() > 0 {
        let mut value = vec![<BigRational as Zero>::zero(); cols];
        for (i, &lab) in tab.basic.iter().enumerate() {
            if lab < cols {
                value[lab] = BigRational::from_integer(tab.b[i].to_big()) / &den;
            }
        }
        return Some(Ok(Outcome::Feasible(value)));
    }
    let mut multipliers = Vec::new();
    for (j, &lab) in tab.nonbasic.iter().enumerate() {
        let k = lab.wrapping_sub(cols);
        if lab >= cols && k < prog.rows.len() && tab.d[j].sign() != 0 {
            let y = -BigRational::from_integer(tab.d[j].to_big()) / &den;
            multipliers.push((k, y * &prog.scale[k]));
        }
    }
    multipliers.sort_by_key(|(i, _)| *i);
    Some(Ok(Outcome::Infeasible(multipliers)))
}

/// Decides feasibility by linear programming; results carry the same
/// witnesses and certificates as elimination.
pub fn feasible_simplex(variables: &[String], rows: &[LinIneq]) -> Result<FeasibilityResult> {
    let n = variables.len();
    let index: HashMap<&str, usize> = variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    // columns: x⁺ (n), x⁻ (n), u, t
    let cols = 2 * n + 2;
    let mut prog = Program {
        rows: Vec::with_capacity(rows.len()),
        scale: Vec::with_capacity(rows.len()),
        cols,
    };
    for r in rows {
        let mut lcm = r.constant.denom().clone();
        for c in r.coeffs.values() {
            lcm = lcm.lcm(c.denom());
        }
        let scale = BigRational::from_integer(lcm);
        let int = |c: &Rational| (c.as_big() * &scale).to_integer();
        let mut line = vec![<BigInt as Zero>::zero(); cols];
        for (v, c) in &r.coeffs {
            let j = *index
                .get(v.as_str())
                .ok_or_else(|| Error::Structure(format!("undeclared variable {v:?}")))?;
            line[j] = int(c);
            line[n + j] = -int(c);
        }
        line[2 * n] = int(&r.constant);
        if r.is_strict() {
            line[2 * n + 1] = BigInt::one();
        }
        prog.rows.push(line);
        prog.scale.push(scale);
    }
    let outcome = match run::<i128>(&prog) {
        Some(res) => res?,
        None => run::<BigInt>(&prog).expect("big integers do not overflow")?,
    };
    match outcome {
        Outcome::Feasible(value) => {
            let u = &value[2 * n];
            let point: BTreeMap<String, Rational> = variables
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    (
                        v.clone(),
                        Rational::from_big((&value[j] - &value[n + j]) / u),
                    )
                })
                .collect();
            if !rows.iter().all(|r| r.holds_at(&point)) {
                return Err(Error::Internal("simplex witness violates a row".into()));
            }
            Ok(FeasibilityResult {
                verdict: Verdict::Feasible,
                witness: Some(point),
                certificate: None,
            })
        }
        Outcome::Infeasible(m) => Ok(FeasibilityResult {
            verdict: Verdict::Infeasible,
            witness: None,
            certificate: Some(Certificate {
                multipliers: m
                    .into_iter()
                    .map(|(i, y)| (i, Rational::from_big(y)))
                    .collect(),
            }),
        }),
    }
}
