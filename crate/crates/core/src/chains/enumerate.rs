//! Branch-and-prune enumeration of admissible weak chains.
//!
//! Chains grow one bridge at a time along the block patterns; after every
//! bridge the accumulated strict system is checked, and infeasible prefixes
//! are cut. Rows only accumulate, so pruning never loses a solution.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{feasible_simplex, verify_rows, FeasibilityResult, LinExpr, LinIneq};
use crate::rational::Rational;

use super::system::{chain_rows, closing_rows, entry_rows, global_rows, variables};
use super::{block_patterns, is_block_pattern, max_jump, max_spread, Block, WeakChain};

/// Additional requirements on enumerated chains.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConstraints {
    pub delta: Rational,
    /// Extra rows over the chain variables, appended to every system.
    pub extra_rows: Vec<LinIneq>,
    /// Keep only chains that extend to an admissible chain of this length.
    pub extendable_to: Option<usize>,
}

impl Default for ChainConstraints {
    fn default() -> Self {
        ChainConstraints {
            delta: Rational::frac(1, 6),
            extra_rows: Vec::new(),
            extendable_to: None,
        }
    }
}

impl ChainConstraints {
    /// `h₂ > 2δ + 2δ·ρ₂`: the first 2-bridge starts after the first 2-bridge length past `2δ`.
    pub fn late_first_two_bridge(delta: &Rational) -> LinIneq {
        let two_delta = delta * 2;
        LinExpr::var("h2")
            .gt(LinExpr::constant(two_delta.clone()) + LinExpr::term(two_delta, "rho2"))
    }

    pub fn with_late_first_two_bridge(mut self) -> Self {
        let row = Self::late_first_two_bridge(&self.delta);
        self.extra_rows.push(row);
        self
    }

    pub fn extendable_to(mut self, len: usize) -> Self {
        self.extendable_to = Some(len);
        self
    }

    pub fn with_row(mut self, row: LinIneq) -> Self {
        self.extra_rows.push(row);
        self
    }
}

/// Counters shared by the workers of one search.
#[derive(Debug, Default)]
pub struct SearchStats {
    feasibility_checks: AtomicU64,
    witnesses_reused: AtomicU64,
    certificates_verified: AtomicU64,
}

impl SearchStats {
    pub fn feasibility_checks(&self) -> u64 {
        self.feasibility_checks.load(Ordering::Relaxed)
    }

    /// Checks settled by the parent's witness without solving.
    pub fn witnesses_reused(&self) -> u64 {
        self.witnesses_reused.load(Ordering::Relaxed)
    }

    pub fn certificates_verified(&self) -> u64 {
        self.certificates_verified.load(Ordering::Relaxed)
    }
}

/// An admissible chain with the feasibility result of its system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumeratedChain {
    pub chain: WeakChain,
    pub result: FeasibilityResult,
}

struct Ctx<'a> {
    delta: Rational,
    variables: Vec<String>,
    stats: &'a SearchStats,
}

impl<'a> Ctx<'a> {
    fn new(delta: &Rational, stats: &'a SearchStats) -> Self {
        Ctx {
            delta: delta.clone(),
            variables: variables(),
            stats,
        }
    }

    /// Decides the rows and rechecks the answer independently.
    fn check(&self, rows: &[LinIneq]) -> Result<FeasibilityResult> {
        let res = feasible_simplex(&self.variables, rows)?;
        self.stats
            .feasibility_checks
            .fetch_add(1, Ordering::Relaxed);
        self.verify(rows, res)
    }

    /// Like `check` for `rows` whose first `known` rows `current` decides
    /// as feasible; its witness is tried on the new rows first.
    fn check_after(
        &self,
        rows: &[LinIneq],
        known: usize,
        current: &FeasibilityResult,
    ) -> Result<FeasibilityResult> {
        if let Some(w) = &current.witness {
            if rows[known..].iter().all(|r| r.holds_at(w)) {
                self.stats.witnesses_reused.fetch_add(1, Ordering::Relaxed);
                return self.verify(rows, current.clone());
            }
        }
        self.check(rows)
    }

    fn verify(&self, rows: &[LinIneq], res: FeasibilityResult) -> Result<FeasibilityResult> {
        verify_rows(&self.variables, rows, &res).map_err(Error::Internal)?;
        self.stats
            .certificates_verified
            .fetch_add(1, Ordering::Relaxed);
        Ok(res)
    }
}

#[derive(Clone)]
struct Partial {
    blocks: Vec<Block>,
    rows: Vec<LinIneq>,
    result: Option<FeasibilityResult>,
}

impl Partial {
    fn into_enumerated(self, delta: &Rational) -> EnumeratedChain {
        EnumeratedChain {
            chain: WeakChain {
                blocks: self.blocks,
                delta: delta.clone(),
            },
            result: self.result.expect("checked partial"),
        }
    }
}

/// How the next block may look.
#[derive(Clone, Copy)]
enum Template<'a> {
    Free,
    /// Fixed pattern; shifts are `block.shifts` plus a per-index offset,
    /// either given or chosen at the index's first occurrence.
    Forced {
        block: &'a Block,
        offsets: Option<[i64; 5]>,
    },
}

fn root(ctx: &Ctx<'_>, c: &ChainConstraints) -> Result<Option<Partial>> {
    let mut rows = global_rows();
    rows.extend(c.extra_rows.iter().cloned());
    let res = ctx.check(&rows)?;
    Ok(res.is_feasible().then(|| Partial {
        blocks: Vec::new(),
        rows,
        result: Some(res),
    }))
}

fn from_chain(ctx: &Ctx<'_>, chain: &WeakChain, extra: &[LinIneq]) -> Result<Option<Partial>> {
    chain.validate_structure()?;
    if !chain.satisfies_shift_bounds() {
        return Ok(None);
    }
    let mut rows = chain_rows(chain);
    rows.extend(extra.iter().cloned());
    let res = ctx.check(&rows)?;
    Ok(res.is_feasible().then(|| Partial {
        blocks: chain.blocks.clone(),
        rows,
        result: Some(res),
    }))
}

/// Spread and jump bounds for a finished block following `prev`.
fn block_bounds_ok(prev: Option<&Block>, block: &Block) -> bool {
    (2..=4u8).all(|i| {
        let (Some(m), Some(mx)) = (block.min_shift(i), block.max_shift(i)) else {
            return true;
        };
        let spread_ok = mx - m <= max_spread(i);
        let jump_ok = match prev.and_then(|p| p.max_shift(i)) {
            Some(pm) => (1..=max_jump(i)).contains(&(m - pm)),
            None => true,
        };
        spread_ok && jump_ok && m >= 0
    })
}

struct Grower<'c, 'a> {
    ctx: &'c Ctx<'a>,
    base: &'c Partial,
    r: usize,
    template: Template<'c>,
    entries: Vec<(u8, i64)>,
    rows: Vec<LinIneq>,
    offsets: [Option<i64>; 5],
    out: Vec<Partial>,
}

impl Grower<'_, '_> {
    fn prev(&self) -> Option<&Block> {
        self.base.blocks.last()
    }

    fn next_indices(&self) -> Vec<u8> {
        let len = self.entries.len();
        match self.template {
            Template::Free => {
                let mut next: Vec<u8> = block_patterns()
                    .iter()
                    .filter(|p| {
                        p.len() > len && p[..len].iter().zip(&self.entries).all(|(a, b)| *a == b.0)
                    })
                    .map(|p| p[len])
                    .collect();
                next.sort_unstable();
                next.dedup();
                next
            }
            Template::Forced { block, .. } => block.indices.get(len).copied().into_iter().collect(),
        }
    }

    fn shift_candidates(&self, i: u8) -> Vec<i64> {
        let earlier: Vec<i64> = self
            .entries
            .iter()
            .filter(|e| e.0 == i)
            .map(|e| e.1)
            .collect();
        match self.template {
            Template::Free => {
                if let (Some(&first), Some(&last)) = (earlier.first(), earlier.last()) {
                    (last + 1..=first + max_spread(i)).collect()
                } else if self.r == 0 {
                    vec![0]
                } else {
                    let m = self
                        .prev()
                        .and_then(|p| p.max_shift(i))
                        .expect("every pattern uses every index");
                    (m + 1..=m + max_jump(i)).collect()
                }
            }
            Template::Forced { block, .. } => {
                let rel = block.shifts[self.entries.len()];
                match self.offsets[i as usize] {
                    Some(o) => vec![rel + o],
                    None if self.r == 0 => vec![rel],
                    None => {
                        let m = self.prev().and_then(|p| p.max_shift(i)).unwrap_or(0);
                        (m + 1..=m + max_jump(i)).collect()
                    }
                }
            }
        }
    }

    fn closable(&self) -> bool {
        let seq: Vec<u8> = self.entries.iter().map(|e| e.0).collect();
        match self.template {
            Template::Free => is_block_pattern(&seq),
            Template::Forced { block, .. } => seq == block.indices,
        }
    }

    fn grow(&mut self, current: &FeasibilityResult) -> Result<()> {
        let delta = self.ctx.delta.clone();
        if self.closable() {
            let block = Block {
                indices: self.entries.iter().map(|e| e.0).collect(),
                shifts: self.entries.iter().map(|e| e.1).collect(),
            };
            if block_bounds_ok(self.prev(), &block) {
                let n = self.rows.len();
                self.rows
                    .extend(closing_rows(self.r, &self.entries, &delta));
                let res = self.ctx.check_after(&self.rows, n, current)?;
                if res.is_feasible() {
                    let mut blocks = self.base.blocks.clone();
                    blocks.push(block);
                    self.out.push(Partial {
                        blocks,
                        rows: self.rows.clone(),
                        result: Some(res),
                    });
                }
                self.rows.truncate(n);
            }
        }
        for i in self.next_indices() {
            for s in self.shift_candidates(i) {
                let fresh_offset = matches!(self.template, Template::Forced { .. })
                    && self.offsets[i as usize].is_none();
                if fresh_offset {
                    let Template::Forced { block, .. } = self.template else {
                        unreachable!()
                    };
                    self.offsets[i as usize] = Some(s - block.shifts[self.entries.len()]);
                }
                self.entries.push((i, s));
                let n = self.rows.len();
                self.rows.extend(entry_rows(self.r, &self.entries, &delta));
                let res = self.ctx.check_after(&self.rows, n, current)?;
                if res.is_feasible() {
                    self.grow(&res)?;
                }
                self.rows.truncate(n);
                self.entries.pop();
                if fresh_offset {
                    self.offsets[i as usize] = None;
                }
            }
        }
        Ok(())
    }
}

/// All admissible one-block extensions of `base`.
fn extend(ctx: &Ctx<'_>, base: &Partial, template: Template<'_>) -> Result<Vec<Partial>> {
    let offsets = match template {
        Template::Forced {
            offsets: Some(o), ..
        } => o.map(Some),
        _ => [None; 5],
    };
    let mut g = Grower {
        ctx,
        base,
        r: base.blocks.len(),
        template,
        entries: Vec::new(),
        rows: base.rows.clone(),
        offsets,
        out: Vec::new(),
    };
    g.grow(base.result.as_ref().expect("checked partial"))?;
    Ok(g.out)
}

fn extend_all<'t>(
    ctx: &Ctx<'_>,
    frontier: Vec<Partial>,
    template: impl Fn(&Partial) -> Template<'t> + Sync,
) -> Result<Vec<Partial>> {
    let grown: Vec<Vec<Partial>> = frontier
        .par_iter()
        .map(|p| extend(ctx, p, template(p)))
        .collect::<Result<_>>()?;
    Ok(grown.into_iter().flatten().collect())
}

fn exists_extension(ctx: &Ctx<'_>, p: &Partial, target: usize) -> Result<bool> {
    if p.blocks.len() >= target {
        return Ok(true);
    }
    let children = extend(ctx, p, Template::Free)?;
    let hit = children
        .par_iter()
        .map(|c| exists_extension(ctx, c, target))
        .find_any(|r| !matches!(r, Ok(false)));
    hit.unwrap_or(Ok(false))
}

fn finish(ctx: &Ctx<'_>, mut v: Vec<Partial>) -> Vec<EnumeratedChain> {
    v.sort_by(|a, b| {
        a.blocks
            .iter()
            .map(|x| &x.indices)
            .cmp(b.blocks.iter().map(|x| &x.indices))
            .then_with(|| {
                a.blocks
                    .iter()
                    .map(|x| &x.shifts)
                    .cmp(b.blocks.iter().map(|x| &x.shifts))
            })
    });
    v.dedup_by(|a, b| a.blocks == b.blocks);
    v.into_iter()
        .map(|p| p.into_enumerated(&ctx.delta))
        .collect()
}

/// All admissible weak chains of `len` blocks, canonically sorted.
pub fn enumerate_weak_chains(
    len: usize,
    constraints: &ChainConstraints,
    stats: &SearchStats,
) -> Result<Vec<EnumeratedChain>> {
    if len == 0 {
        return Err(Error::Parameter("chain length must be positive".into()));
    }
    let ctx = Ctx::new(&constraints.delta, stats);
    let Some(start) = root(&ctx, constraints)? else {
        return Ok(Vec::new());
    };
    let mut frontier = vec![start];
    for _ in 0..len {
        frontier = extend_all(&ctx, frontier, |_| Template::Free)?;
    }
    if let Some(target) = constraints.extendable_to {
        let keep: Vec<bool> = frontier
            .par_iter()
            .map(|p| exists_extension(&ctx, p, target))
            .collect::<Result<_>>()?;
        frontier = frontier
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(p, _)| p)
            .collect();
    }
    Ok(finish(&ctx, frontier))
}

/// All admissible chains of `len` blocks that start with `prefix`.
pub fn extensions(
    prefix: &WeakChain,
    len: usize,
    constraints: &ChainConstraints,
    stats: &SearchStats,
) -> Result<Vec<EnumeratedChain>> {
    let ctx = Ctx::new(&prefix.delta, stats);
    let Some(start) = from_chain(&ctx, prefix, &constraints.extra_rows)? else {
        return Ok(Vec::new());
    };
    let mut frontier = vec![start];
    for _ in prefix.len()..len {
        frontier = extend_all(&ctx, frontier, |_| Template::Free)?;
    }
    Ok(finish(&ctx, frontier))
}

/// All admissible chains of `len` blocks containing some chain of `bad`
/// as two consecutive blocks, up to renormalization of the shifts.
pub fn forbidden_subchain_search(
    bad: &[WeakChain],
    len: usize,
    constraints: &ChainConstraints,
    stats: &SearchStats,
) -> Result<Vec<EnumeratedChain>> {
    let ctx = Ctx::new(&constraints.delta, stats);
    let mut found = Vec::new();
    for b in bad {
        if b.len() != 2 {
            return Err(Error::Structure(
                "forbidden subchains must have two blocks".into(),
            ));
        }
        b.validate_structure()?;
        let b = b.normalized();
        for p in 0..len.saturating_sub(1) {
            let Some(start) = root(&ctx, constraints)? else {
                return Ok(Vec::new());
            };
            let mut frontier = vec![start];
            for r in 0..len {
                frontier = extend_all(&ctx, frontier, |partial: &Partial| {
                    if r == p {
                        Template::Forced {
                            block: &b.blocks[0],
                            offsets: None,
                        }
                    } else if r == p + 1 {
                        let mut offsets = [0i64; 5];
                        for i in 2..=4u8 {
                            let m = partial.blocks[p].min_shift(i).unwrap_or(0);
                            offsets[i as usize] = m - b.blocks[0].min_shift(i).unwrap_or(0);
                        }
                        Template::Forced {
                            block: &b.blocks[1],
                            offsets: Some(offsets),
                        }
                    } else {
                        Template::Free
                    }
                })?;
                if frontier.is_empty() {
                    break;
                }
            }
            found.extend(frontier);
        }
    }
    Ok(finish(&ctx, found))
}

/// Whether every admissible chain of `len` blocks starting with `prefix`
/// becomes infeasible once `negated` is appended.
pub fn implied_inequality_check(
    prefix: &WeakChain,
    negated: &LinIneq,
    len: usize,
    constraints: &ChainConstraints,
    stats: &SearchStats,
) -> Result<bool> {
    if prefix.len() > len {
        return Err(Error::Parameter(
            "prefix longer than the target length".into(),
        ));
    }
    let ctx = Ctx::new(&prefix.delta, stats);
    let mut extra = constraints.extra_rows.clone();
    extra.push(negated.clone());
    match from_chain(&ctx, prefix, &extra)? {
        None => Ok(true),
        Some(start) => Ok(!exists_extension(&ctx, &start, len)?),
    }
}
