//! Linear systems of weak chains over `ρ₂, ρ₃, ρ₄, h₂, h₃, h₄`.
//!
//! A bridge of index `i` and shift `s` is the open interval
//! `h_i + ρ_i·(s, s+2δ)`; block `r` must cover `[r+2δ, r+1]` in the
//! prescribed order.

use crate::error::Result;
use crate::polytope::{LinExpr, LinIneq, LinSystem};
use crate::rational::Rational;

use super::WeakChain;

pub const CHAIN_VARIABLES: [&str; 6] = ["rho2", "rho3", "rho4", "h2", "h3", "h4"];

fn rho(i: u8) -> LinExpr {
    LinExpr::var(["rho2", "rho3", "rho4"][(i - 2) as usize])
}

fn h(i: u8) -> LinExpr {
    LinExpr::var(["h2", "h3", "h4"][(i - 2) as usize])
}

fn konst(c: Rational) -> LinExpr {
    LinExpr::constant(c)
}

/// Left end `h_i + s·ρ_i`.
pub(crate) fn left_end(i: u8, s: i64) -> LinExpr {
    h(i) + rho(i) * &Rational::from(s)
}

/// Right end `h_i + (s+2δ)·ρ_i`.
pub(crate) fn right_end(i: u8, s: i64, delta: &Rational) -> LinExpr {
    h(i) + rho(i) * &(Rational::from(s) + delta * 2)
}

/// Rows on the bridge lengths: their order and the three lower bounds.
pub fn global_rows() -> Vec<LinIneq> {
    let c = |n: i64| konst(Rational::from(n));
    vec![
        c(0).lt(rho(4)),
        rho(4).lt(rho(3)),
        rho(3).lt(rho(2)),
        rho(2).lt(c(1)),
        (rho(2) * &Rational::from(5)).gt(c(2)),
        (rho(4) * &Rational::from(10)).gt(rho(2) + rho(3)),
        (rho(3) * &Rational::from(8)).gt(c(1) + rho(2)),
    ]
}

/// Rows that become determined once `entries.last()` joins block `r`.
pub(crate) fn entry_rows(r: usize, entries: &[(u8, i64)], delta: &Rational) -> Vec<LinIneq> {
    let cap_lo = konst(Rational::from(r as i64) + delta * 2);
    let j = entries.len() - 1;
    let (i, s) = entries[j];
    let mut rows = Vec::with_capacity(3);
    if j == 0 {
        rows.push(left_end(i, s).lt(cap_lo.clone()));
        rows.push(cap_lo.lt(right_end(i, s, delta)));
        return rows;
    }
    let (pi, ps) = entries[j - 1];
    // the previous right end falls inside this bridge
    rows.push(left_end(i, s).lt(right_end(pi, ps, delta)));
    rows.push(right_end(pi, ps, delta).lt(right_end(i, s, delta)));
    if j == 1 {
        rows.push(cap_lo.lt(left_end(i, s)));
    } else {
        let (qi, qs) = entries[j - 2];
        rows.push(right_end(qi, qs, delta).lt(left_end(i, s)));
    }
    rows
}

/// Rows that close block `r`: the last bridge covers `r+1`, the one before ends earlier.
pub(crate) fn closing_rows(r: usize, entries: &[(u8, i64)], delta: &Rational) -> Vec<LinIneq> {
    let cap_hi = konst(Rational::from(r as i64 + 1));
    let (i, s) = entries[entries.len() - 1];
    let (pi, ps) = entries[entries.len() - 2];
    vec![
        left_end(i, s).lt(cap_hi.clone()),
        cap_hi.clone().lt(right_end(i, s, delta)),
        right_end(pi, ps, delta).lt(cap_hi),
    ]
}

pub(crate) fn block_rows(r: usize, entries: &[(u8, i64)], delta: &Rational) -> Vec<LinIneq> {
    let mut rows = Vec::new();
    for j in 1..=entries.len() {
        rows.extend(entry_rows(r, &entries[..j], delta));
    }
    rows.extend(closing_rows(r, entries, delta));
    rows
}

pub(crate) fn chain_rows(c: &WeakChain) -> Vec<LinIneq> {
    let mut rows = global_rows();
    for (r, b) in c.blocks.iter().enumerate() {
        let entries: Vec<(u8, i64)> = b.entries().collect();
        rows.extend(block_rows(r, &entries, &c.delta));
    }
    rows
}

pub(crate) fn variables() -> Vec<String> {
    CHAIN_VARIABLES.iter().map(|v| v.to_string()).collect()
}

/// The strict system whose solutions realize the chain.
pub fn weak_chain_system(c: &WeakChain) -> Result<LinSystem> {
    c.validate_structure()?;
    Ok(LinSystem {
        variables: variables(),
        rows: chain_rows(c),
    })
}
