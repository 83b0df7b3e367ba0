//! Rooted-tree verification that a compact region lies in
//! `𝒦^d(δ)/𝒦_⟦0,N−1⟧(δ)`.
//!
//! The root is `(1, 𝒦_⟦0,N−1⟧(δ))`. A node `(z, 𝔎)` has one child per
//! `z′ ∈ (𝒦⁻(δ)/𝔎⁺) ∩ (1, C]` with set `Clos(𝔎 ∩ 𝒦^>(δ)/z′)`. The region is
//! covered iff every depth-`d` node whose sorted ancestry lies in the region
//! has a nonempty set. The premise that ordered tuples outside the region are
//! covered is an input assertion and is not checked here.

mod region;

pub use region::{CompactRegion, PolyConstraint, Polynomial};

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use num::{BigInt, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::geometry::{kwai_union, membership_residual, CoveringConfig};
use crate::intervals::{closure_of_halfopen_trim, meets_halfopen_kwais, Interval, IntervalSet};
use crate::rational::Rational;

/// A node `(z, 𝔎)` with its ancestry, root excluded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverNode {
    pub depth: usize,
    pub z: Rational,
    pub kset: IntervalSet,
    pub ancestry: Vec<Rational>,
}

impl CoverNode {
    pub fn root(config: &CoveringConfig) -> Self {
        CoverNode {
            depth: 0,
            z: Rational::one(),
            kset: kwai_union(config.rounds, &config.delta),
            ancestry: Vec::new(),
        }
    }
}

/// Distinct `z′ = (m+δ)/e⁺ ∈ (1, C]`, ascending.
fn child_coordinates(
    node: &CoverNode,
    config: &CoveringConfig,
    box_hi: &Rational,
) -> BTreeSet<Rational> {
    let delta = &config.delta;
    let mut coords = BTreeSet::new();
    for e in node.kset.rights() {
        // 1 < (m+δ)/e ≤ C
        let first: BigInt = (&e - delta).floor() + 1;
        let last = (box_hi * &e - delta).floor();
        let mut m = first.max(0.into());
        while m <= last {
            coords.insert((Rational::from(m.clone()) + delta) / &e);
            m += 1;
        }
    }
    coords
}

/// The child coordinates that fall in `allowed`, found by solving for `m`
/// on each part instead of listing every coordinate.
fn coordinates_within(
    node: &CoverNode,
    config: &CoveringConfig,
    box_hi: &Rational,
    allowed: &IntervalSet,
) -> BTreeSet<Rational> {
    let delta = &config.delta;
    let range =
        IntervalSet::from_parts(Interval::new(Rational::one(), false, box_hi.clone(), true));
    let allowed = allowed.intersect(&range);
    let mut coords = BTreeSet::new();
    for e in node.kset.rights() {
        for part in allowed.parts() {
            // lo ≤ (m+δ)/e ≤ hi
            let Some((mut m, last)) = index_range(part, &e, delta) else {
                continue;
            };
            while m <= last {
                coords.insert((Rational::from(m.clone()) + delta) / &e);
                m += 1;
            }
        }
    }
    coords
}

fn make_child(node: &CoverNode, z: Rational, config: &CoveringConfig) -> Result<CoverNode> {
    let upper = node.kset.max().expect("nonempty set");
    let kset = closure_of_halfopen_trim(&node.kset, &z, &config.delta, upper)?;
    let mut ancestry = node.ancestry.clone();
    ancestry.push(z.clone());
    Ok(CoverNode {
        depth: node.depth + 1,
        z,
        kset,
        ancestry,
    })
}

/// Children sorted by `z′`, one per distinct coordinate.
pub fn children(
    node: &CoverNode,
    config: &CoveringConfig,
    box_hi: &Rational,
) -> Result<Vec<CoverNode>> {
    if node.depth >= config.d {
        return Err(param("leaves have no children"));
    }
    if node.kset.is_empty() {
        return Err(param("node with empty set has no children"));
    }
    child_coordinates(node, config, box_hi)
        .into_iter()
        .map(|z| make_child(node, z, config))
        .collect()
}

/// Counts and failures for one depth-1 subtree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtreeResult {
    pub nodes: u64,
    /// Depth-`d` nodes whose ancestry lies in the region.
    pub leaves: u64,
    /// Internal nodes whose set became empty; they have no descendants.
    pub dead_ends: u64,
    /// Most parts in the set of an internal node.
    pub max_fragmentation: usize,
    pub failing: Vec<Vec<Rational>>,
}

impl SubtreeResult {
    fn absorb(&mut self, other: &SubtreeResult) {
        self.nodes += other.nodes;
        self.leaves += other.leaves;
        self.dead_ends += other.dead_ends;
        self.max_fragmentation = self.max_fragmentation.max(other.max_fragmentation);
        self.failing.extend(other.failing.iter().cloned());
    }
}

fn walk(
    start: CoverNode,
    region: &CompactRegion,
    config: &CoveringConfig,
) -> Result<SubtreeResult> {
    let mut out = SubtreeResult::default();
    if start.depth == config.d {
        // one-dimensional trees: the subtree is a single leaf
        out.nodes = 1;
        out.leaves = 1;
        if start.kset.is_empty() {
            out.failing.push(start.ancestry);
        }
        return Ok(out);
    }
    let mut stack = vec![start];
    while let Some(node) = stack.pop() {
        out.nodes += 1;
        out.max_fragmentation = out.max_fragmentation.max(node.kset.len());
        if node.kset.is_empty() {
            out.dead_ends += 1;
            continue;
        }
        let mut ancestry = node.ancestry.clone();
        ancestry.push(Rational::zero());
        if node.depth + 1 == config.d {
            check_leaves(&node, region, config, &mut ancestry, &mut out);
            continue;
        }
        let hull = region.next_coordinate_hull(&node.ancestry);
        let mut kids = Vec::new();
        for z in coordinates_within(&node, config, &region.box_hi, &hull) {
            *ancestry.last_mut().expect("just pushed") = z.clone();
            if region.admits_partial(&ancestry) {
                kids.push(make_child(&node, z, config)?);
            }
        }
        // reversed so that the smallest coordinate is visited first
        stack.extend(kids.into_iter().rev());
    }
    Ok(out)
}

/// Checks the depth-`d` children of `node` that lie in the region.
///
/// A leaf only needs its set to be nonempty. When `z′` times the widest part
/// of the parent set exceeds `2δ`, that scaled part cannot fit in a gap
/// between consecutive windows, so the leaf passes; only smaller `z′` are
/// checked one by one. With an exact completion set the leaves in the region
/// are counted per generating pair `(m, e⁺)` instead of being listed.
fn check_leaves(
    node: &CoverNode,
    region: &CompactRegion,
    config: &CoveringConfig,
    ancestry: &mut [Rational],
    out: &mut SubtreeResult,
) {
    let delta = &config.delta;
    let Some(allowed) = region.completion_set(&node.ancestry) else {
        for z in child_coordinates(node, config, &region.box_hi) {
            *ancestry.last_mut().expect("leaf slot") = z.clone();
            if region.contains_any_order(ancestry) {
                out.nodes += 1;
                out.leaves += 1;
                if !meets_halfopen_kwais(&node.kset, &z, delta) {
                    out.failing.push(ancestry.to_vec());
                }
            }
        }
        return;
    };
    let range = IntervalSet::from_parts(Interval::new(
        Rational::one(),
        false,
        region.box_hi.clone(),
        true,
    ));
    let allowed = allowed.intersect(&range);
    let widest = node.kset.longest_part();
    let sure = widest.is_positive().then(|| delta * 2 / &widest);
    let approx = ApproxSet::new(&node.kset, delta);
    let mut failing = BTreeSet::new();
    for e in node.kset.rights() {
        let e_approx = e.to_f64();
        for part in allowed.parts() {
            let Some((first, last)) = index_range(part, &e, delta) else {
                continue;
            };
            let count = (&last - &first + 1u32)
                .to_u64()
                .expect("leaf count fits in u64");
            out.nodes += count;
            out.leaves += count;
            let cut = match &sure {
                Some(s) => last.clone().min((s * &e - delta).floor()),
                None => last.clone(),
            };
            let mut m = first;
            while m <= cut {
                let z_approx = (m.to_f64().expect("finite index") + approx.delta) / e_approx;
                if approx.surely_meets(z_approx) {
                    m += 1;
                    continue;
                }
                let z = (Rational::from(m.clone()) + delta) / &e;
                if !meets_halfopen_kwais(&node.kset, &z, delta) {
                    failing.insert(z);
                }
                m += 1;
            }
        }
    }
    for z in failing {
        *ancestry.last_mut().expect("leaf slot") = z;
        out.failing.push(ancestry.to_vec());
    }
}

/// Floating-point copy of a set for a quick leaf test.
///
/// Coordinates stay below a few hundred and denominators are small, so the
/// rounding error of each product is far below `MARGIN`. A leaf is accepted
/// only when a window meets a part with room `MARGIN` on both sides; all
/// other leaves get the exact test.
struct ApproxSet {
    parts: Vec<(f64, f64)>,
    delta: f64,
}

const MARGIN: f64 = 1e-7;

impl ApproxSet {
    fn new(set: &IntervalSet, delta: &Rational) -> Self {
        let mut parts: Vec<(f64, f64)> = set
            .parts()
            .iter()
            .map(|p| (p.lo().to_f64(), p.hi().to_f64()))
            .collect();
        // widest first: it is the likeliest to meet a window
        parts.sort_by(|x, y| (y.1 - y.0).total_cmp(&(x.1 - x.0)));
        ApproxSet {
            parts,
            delta: delta.to_f64(),
        }
    }

    fn surely_meets(&self, z: f64) -> bool {
        let d = self.delta;
        self.parts.iter().any(|&(a, b)| {
            let lo = a * z;
            let hi = b * z;
            let m = (lo - 1.0 + d + MARGIN).ceil().max(0.0);
            m + d < hi - MARGIN && m + 1.0 - d >= lo + MARGIN
        })
    }
}

/// Least and greatest `m ≥ 0` with `(m+δ)/e ∈ part`.
fn index_range(part: &Interval, e: &Rational, delta: &Rational) -> Option<(BigInt, BigInt)> {
    let low = part.lo() * e - delta;
    let mut first = low.ceil();
    if !part.lo_closed() && Rational::from(first.clone()) == low {
        first += 1;
    }
    let first = first.max(BigInt::zero());
    let high = part.hi() * e - delta;
    let mut last = high.floor();
    if !part.hi_closed() && Rational::from(last.clone()) == high {
        last -= 1;
    }
    (first <= last).then_some((first, last))
}

/// Random subset of the depth-1 subtrees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub fraction: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Default)]
pub struct CoverOptions {
    pub sampling: Option<Sampling>,
    /// Progress file holding finished depth-1 subtrees; reused when present.
    pub checkpoint: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub covered: bool,
    /// Set when `δ` differs from `1/(d+2)`, where the tree argument is not established.
    pub heuristic: bool,
    pub subtrees_total: usize,
    pub subtrees_visited: Vec<usize>,
    pub totals: SubtreeResult,
    pub sampling: Option<Sampling>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    config: CoveringConfig,
    region: Vec<String>,
    completed: BTreeMap<usize, SubtreeResult>,
}

fn load_checkpoint(
    path: &Path,
    config: &CoveringConfig,
    region: &CompactRegion,
) -> Result<BTreeMap<usize, SubtreeResult>> {
    let Ok(text) = std::fs::read_to_string(path) else {
        return Ok(BTreeMap::new());
    };
    let cp: Checkpoint =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("checkpoint: {e}")))?;
    if cp.config != *config || cp.region != region.describe() {
        return Err(param("checkpoint belongs to a different run"));
    }
    Ok(cp.completed)
}

fn save_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let text = serde_json::to_string(cp).expect("serializable");
    std::fs::write(&tmp, text)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| Error::Internal(format!("checkpoint: {e}")))
}

pub fn verify_cover(region: &CompactRegion, config: &CoveringConfig) -> Result<CoverReport> {
    verify_cover_with(region, config, &CoverOptions::default())
}

/// Depth-first traversal, fanned out over the depth-1 subtrees.
pub fn verify_cover_with(
    region: &CompactRegion,
    config: &CoveringConfig,
    opts: &CoverOptions,
) -> Result<CoverReport> {
    if region.dim != config.d {
        return Err(param(format!(
            "region has dimension {}, configuration {}",
            region.dim, config.d
        )));
    }
    let root = CoverNode::root(config);
    let first: Vec<CoverNode> = children(&root, config, &region.box_hi)?;
    let total = first.len();
    let mut chosen: Vec<usize> = (0..total).collect();
    if let Some(s) = &opts.sampling {
        if !(s.fraction > 0.0 && s.fraction <= 1.0) {
            return Err(param("sampling fraction must lie in (0, 1]"));
        }
        let take = ((total as f64) * s.fraction).ceil() as usize;
        chosen.shuffle(&mut StdRng::seed_from_u64(s.seed));
        chosen.truncate(take.max(1).min(total));
        chosen.sort_unstable();
    }
    let done = match &opts.checkpoint {
        Some(p) => load_checkpoint(p, config, region)?,
        None => BTreeMap::new(),
    };
    let progress = Mutex::new(Checkpoint {
        config: config.clone(),
        region: region.describe(),
        completed: done,
    });
    let pending: Vec<usize> = {
        let cp = progress.lock().expect("not poisoned");
        chosen
            .iter()
            .copied()
            .filter(|i| !cp.completed.contains_key(i))
            .collect()
    };
    pending.par_iter().try_for_each(|&i| -> Result<()> {
        let node = first[i].clone();
        let keep = if config.d == 1 {
            region.contains_any_order(&node.ancestry)
        } else {
            region.admits_partial(&node.ancestry)
        };
        let res = if keep {
            walk(node, region, config)?
        } else {
            SubtreeResult::default()
        };
        let mut cp = progress.lock().expect("not poisoned");
        cp.completed.insert(i, res);
        if let Some(p) = &opts.checkpoint {
            save_checkpoint(p, &cp)?;
        }
        Ok(())
    })?;
    let cp = progress.into_inner().expect("not poisoned");
    let mut totals = SubtreeResult {
        nodes: 1,
        ..Default::default()
    };
    totals.max_fragmentation = root.kset.len();
    for i in &chosen {
        totals.absorb(&cp.completed[i]);
    }
    totals.failing.sort();
    Ok(CoverReport {
        covered: totals.failing.is_empty(),
        heuristic: !config.uses_default_delta(),
        subtrees_total: total,
        subtrees_visited: chosen,
        totals,
        sampling: opts.sampling.clone(),
    })
}

/// JSON certificate for a finished run.
pub fn certificate(
    region: &CompactRegion,
    config: &CoveringConfig,
    report: &CoverReport,
    premise: &str,
    seconds: f64,
) -> serde_json::Value {
    serde_json::json!({
        "config": config,
        "region": region.describe(),
        "premise": premise,
        "heuristic": report.heuristic,
        "covered": report.covered,
        "nodes": report.totals.nodes,
        "leaves": report.totals.leaves,
        "dead_ends": report.totals.dead_ends,
        "max_fragmentation": report.totals.max_fragmentation,
        "failing_leaves": report.totals.failing,
        "subtrees_total": report.subtrees_total,
        "subtrees_visited": report.subtrees_visited.len(),
        "sampling": report.sampling,
        "wall_clock_seconds": seconds,
    })
}

/// Runs [`verify_cover_with`] and times it.
pub fn verify_cover_timed(
    region: &CompactRegion,
    config: &CoveringConfig,
    opts: &CoverOptions,
) -> Result<(CoverReport, f64)> {
    let t = Instant::now();
    let r = verify_cover_with(region, config, opts)?;
    Ok((r, t.elapsed().as_secs_f64()))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpotReport {
    pub samples: Vec<Vec<Rational>>,
    pub uncovered: Vec<Vec<Rational>>,
}

impl SpotReport {
    pub fn all_covered(&self) -> bool {
        self.uncovered.is_empty()
    }
}

/// Random ordered rational points of the region, each tested by the residual.
///
/// Points are drawn on a grid of step `1/denominator` and rejected until
/// they fall in the region; the attempt budget is `1000·samples`.
pub fn spot_check(
    region: &CompactRegion,
    config: &CoveringConfig,
    samples: usize,
    seed: u64,
) -> Result<SpotReport> {
    let mut rng = StdRng::seed_from_u64(seed);
    let denominator: i64 = 997;
    let span = ((&region.box_hi - 1) * denominator)
        .floor_i64()
        .ok_or_else(|| param("box too large"))?;
    let mut report = SpotReport::default();
    let mut attempts = 0usize;
    while report.samples.len() < samples {
        attempts += 1;
        if attempts > 1000 * samples {
            return Err(param("region too thin to sample"));
        }
        let mut z: Vec<Rational> = (0..region.dim)
            .map(|_| Rational::one() + Rational::frac(rng.gen_range(0..=span), denominator))
            .collect();
        z.sort();
        if !region.contains_sorted(&z) {
            continue;
        }
        if membership_residual(&z, config)?.is_empty() {
            report.uncovered.push(z.clone());
        }
        report.samples.push(z);
    }
    Ok(report)
}

/// Outcome of sweeping `t·z` for `t` just below 1 from a failing ancestry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeOutcome {
    Uncovered(Vec<Rational>),
    Boundary(Vec<Rational>),
}

/// Tests `(1 − k·h)·z` for `k = 1..=steps`; reports the first uncovered point,
/// else the ancestry itself as a boundary witness.
pub fn probe_failing_leaf(
    ancestry: &[Rational],
    config: &CoveringConfig,
    step: &Rational,
    steps: usize,
) -> Result<ProbeOutcome> {
    for k in 1..=steps as i64 {
        let t = Rational::one() - step * k;
        let z: Vec<Rational> = ancestry
            .iter()
            .map(|x| (x * &t).max(Rational::one()))
            .collect();
        if membership_residual(&z, config)?.is_empty() {
            return Ok(ProbeOutcome::Uncovered(z));
        }
    }
    Ok(ProbeOutcome::Boundary(ancestry.to_vec()))
}
