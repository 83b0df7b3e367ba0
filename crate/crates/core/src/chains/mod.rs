//! Chains of bridges and weak L-chains: structure, text syntax, linear
//! systems, enumeration and transfers.

mod enumerate;
mod labels;
mod system;
mod transfer;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use enumerate::{
    enumerate_weak_chains, extensions, forbidden_subchain_search, implied_inequality_check,
    ChainConstraints, EnumeratedChain, SearchStats,
};
pub use labels::{figure_edges, labeled_families, LabelFamily};
pub use system::{global_rows, weak_chain_system, CHAIN_VARIABLES};
pub use transfer::{label_graph, successors, transfer, transfer_graph, TransferGraph};

/// The interior block patterns admissible for `d = 4`.
pub const BLOCK_PATTERNS: [&str; 29] = [
    "234", "243", "2434", "324", "3234", "3243", "32434", "423", "4234", "4243", "42434", "342",
    "3423", "34234", "3424", "34243", "342434", "432", "4323", "43234", "4324", "43243", "432434",
    "4342", "43423", "434234", "43424", "434243", "4342434",
];

pub fn block_patterns() -> &'static [Vec<u8>] {
    static PATTERNS: OnceLock<Vec<Vec<u8>>> = OnceLock::new();
    PATTERNS.get_or_init(|| {
        BLOCK_PATTERNS
            .iter()
            .map(|p| p.bytes().map(|b| b - b'0').collect())
            .collect()
    })
}

pub fn is_block_pattern(indices: &[u8]) -> bool {
    block_patterns().iter().any(|p| p == indices)
}

/// Largest allowed `M_r(i) − m_r(i)`.
pub fn max_spread(index: u8) -> i64 {
    match index {
        2 => 0,
        3 => 4,
        _ => 11,
    }
}

/// Largest allowed jump `m_{r+1}(i) − M_r(i)`.
pub fn max_jump(index: u8) -> i64 {
    match index {
        2 => 4,
        3 => 9,
        _ => 29,
    }
}

/// `(i₁⋯i_ℓ | k₁⋯k_ℓ)`: the bridges of a chain, by runner index and bridge number.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainSpec {
    pub indices: Vec<usize>,
    pub ks: Vec<u64>,
}

impl ChainSpec {
    /// Checks that consecutive indices differ and that `i_j = i_{j+2}`
    /// forces `i_{j+1} < i_j` when `d ≥ 2`.
    pub fn new(indices: Vec<usize>, ks: Vec<u64>, d: usize) -> Result<Self> {
        if indices.len() != ks.len() {
            return Err(Error::Structure(
                "indices and bridge numbers differ in length".into(),
            ));
        }
        if let Some(i) = indices.iter().find(|&&i| i == 0 || i > d) {
            return Err(Error::Structure(format!("index {i} outside 1..={d}")));
        }
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Structure(format!(
                    "repeated consecutive index {}",
                    w[0]
                )));
            }
        }
        if d >= 2 {
            for w in indices.windows(3) {
                if w[0] == w[2] && w[1] > w[0] {
                    return Err(Error::Structure(format!(
                        "pattern {}{}{} nests a faster bridge inside a slower one",
                        w[0], w[1], w[2]
                    )));
                }
            }
        }
        Ok(ChainSpec { indices, ks })
    }
}

/// One unit window of a weak chain: bridge indices with their shifts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub indices: Vec<u8>,
    pub shifts: Vec<i64>,
}

impl Block {
    pub fn new(indices: Vec<u8>, shifts: Vec<i64>) -> Self {
        Block { indices, shifts }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u8, i64)> + '_ {
        self.indices
            .iter()
            .copied()
            .zip(self.shifts.iter().copied())
    }

    /// `m(i)`: the smallest shift of index `i` in this block.
    pub fn min_shift(&self, index: u8) -> Option<i64> {
        self.entries()
            .filter(|&(i, _)| i == index)
            .map(|(_, s)| s)
            .min()
    }

    /// `M(i)`: the largest shift of index `i` in this block.
    pub fn max_shift(&self, index: u8) -> Option<i64> {
        self.entries()
            .filter(|&(i, _)| i == index)
            .map(|(_, s)| s)
            .max()
    }

    fn shifted_by(&self, offset: impl Fn(u8) -> i64) -> Block {
        Block {
            indices: self.indices.clone(),
            shifts: self.entries().map(|(i, s)| s + offset(i)).collect(),
        }
    }
}

/// A weak L-chain `⟨i…‖…|s…‖…⟩` with bridge half-width `δ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeakChain {
    pub blocks: Vec<Block>,
    pub delta: Rational,
}

impl WeakChain {
    /// Uses `δ = 1/6`.
    pub fn new(blocks: Vec<Block>) -> Self {
        WeakChain {
            blocks,
            delta: Rational::frac(1, 6),
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn min_shift(&self, r: usize, index: u8) -> Option<i64> {
        self.blocks.get(r)?.min_shift(index)
    }

    pub fn max_shift(&self, r: usize, index: u8) -> Option<i64> {
        self.blocks.get(r)?.max_shift(index)
    }

    /// `J_r(i) = m_{r+1}(i) − M_r(i)`.
    pub fn jump(&self, r: usize, index: u8) -> Option<i64> {
        Some(self.min_shift(r + 1, index)? - self.max_shift(r, index)?)
    }

    /// Block lengths, index alphabet, block patterns and zero first shifts in block 0.
    pub fn validate_structure(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::Structure(
                "a weak chain needs at least one block".into(),
            ));
        }
        for (r, b) in self.blocks.iter().enumerate() {
            if b.indices.len() != b.shifts.len() {
                return Err(Error::Structure(format!(
                    "block {r}: pattern and shifts differ in length"
                )));
            }
            if b.len() < 3 {
                return Err(Error::Structure(format!(
                    "block {r} has fewer than three bridges"
                )));
            }
            if let Some(i) = b.indices.iter().find(|&&i| !(2..=4).contains(&i)) {
                return Err(Error::Structure(format!(
                    "block {r}: index {i} outside 2..=4"
                )));
            }
            if b.indices.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Structure(format!(
                    "block {r}: repeated consecutive index"
                )));
            }
            if !is_block_pattern(&b.indices) {
                let p: String = b.indices.iter().map(|i| char::from(b'0' + i)).collect();
                return Err(Error::Structure(format!(
                    "block {r}: {p} is not an allowed pattern"
                )));
            }
            if b.shifts.iter().any(|&s| s < 0) {
                return Err(Error::Structure(format!("block {r}: negative shift")));
            }
        }
        let first = &self.blocks[0];
        for (j, (i, s)) in first.entries().enumerate() {
            if s != 0 && !first.indices[..j].contains(&i) {
                return Err(Error::Structure(format!(
                    "block 0: first occurrence of index {i} must have shift 0"
                )));
            }
        }
        Ok(())
    }

    /// Per-block spreads and inter-block jumps within their bounds.
    pub fn satisfies_shift_bounds(&self) -> bool {
        let spreads_ok = self.blocks.iter().all(|b| {
            (2..=4).all(|i| match (b.min_shift(i), b.max_shift(i)) {
                (Some(m), Some(mx)) => mx - m <= max_spread(i),
                _ => true,
            })
        });
        let jumps_ok = (0..self.len().saturating_sub(1)).all(|r| {
            (2..=4).all(|i| {
                self.jump(r, i)
                    .map_or(true, |j| (1..=max_jump(i)).contains(&j))
            })
        });
        spreads_ok && jumps_ok
    }

    /// Shifts renormalized so that `m₀(i) = 0` for every index.
    pub fn normalized(&self) -> WeakChain {
        let Some(first) = self.blocks.first() else {
            return self.clone();
        };
        let offsets: Vec<(u8, i64)> = (2..=4)
            .filter_map(|i| first.min_shift(i).map(|m| (i, m)))
            .collect();
        let off = |i: u8| -offsets.iter().find(|(j, _)| *j == i).map_or(0, |(_, m)| *m);
        WeakChain {
            blocks: self.blocks.iter().map(|b| b.shifted_by(off)).collect(),
            delta: self.delta.clone(),
        }
    }

    /// The `len` blocks starting at `start`, renormalized.
    pub fn window(&self, start: usize, len: usize) -> Option<WeakChain> {
        let blocks = self.blocks.get(start..start + len)?.to_vec();
        Some(
            WeakChain {
                blocks,
                delta: self.delta.clone(),
            }
            .normalized(),
        )
    }

    fn sort_key(&self) -> (Vec<&[u8]>, Vec<&[i64]>) {
        (
            self.blocks.iter().map(|b| b.indices.as_slice()).collect(),
            self.blocks.iter().map(|b| b.shifts.as_slice()).collect(),
        )
    }
}

impl PartialOrd for WeakChain {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on the block patterns, then on the shift sequences.
impl Ord for WeakChain {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key()
            .cmp(&other.sort_key())
            .then_with(|| self.delta.cmp(&other.delta))
    }
}

impl fmt::Display for WeakChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self
            .blocks
            .iter()
            .all(|b| b.shifts.iter().all(|s| (0..10).contains(s)));
        let patterns: Vec<String> = self
            .blocks
            .iter()
            .map(|b| b.indices.iter().map(|i| char::from(b'0' + i)).collect())
            .collect();
        let shifts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let parts: Vec<String> = b.shifts.iter().map(i64::to_string).collect();
                parts.join(if digits { "" } else { "," })
            })
            .collect();
        write!(f, "<{}|{}>", patterns.join("||"), shifts.join("||"))
    }
}

impl FromStr for WeakChain {
    type Err = Error;

    /// Accepts `<342||3424|000||1314>`; shifts are single digits unless a
    /// block contains commas.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("weak chain {s:?}: {msg}"));
        let t = s.trim();
        let t = t
            .strip_prefix('<')
            .or_else(|| t.strip_prefix('⟨'))
            .and_then(|t| t.strip_suffix('>').or_else(|| t.strip_suffix('⟩')))
            .ok_or_else(|| bad("expected <...>"))?;
        let t = t.replace("||", "‖");
        let (pats, shifts) = t.split_once('|').ok_or_else(|| bad("missing '|'"))?;
        if shifts.contains('|') {
            return Err(bad("stray '|'"));
        }
        let pats: Vec<&str> = pats.split('‖').collect();
        let shifts: Vec<&str> = shifts.split('‖').collect();
        if pats.len() != shifts.len() {
            return Err(bad("block count mismatch"));
        }
        let mut blocks = Vec::new();
        for (p, sh) in pats.iter().zip(&shifts) {
            let indices: Vec<u8> = p
                .trim()
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| bad("bad index"))
                })
                .collect::<Result<_>>()?;
            let sh = sh.trim();
            let shifts: Vec<i64> = if sh.contains(',') {
                sh.split(',')
                    .map(|x| x.trim().parse().map_err(|_| bad("bad shift")))
                    .collect::<Result<_>>()?
            } else {
                sh.chars()
                    .map(|c| {
                        c.to_digit(10)
                            .map(i64::from)
                            .ok_or_else(|| bad("bad shift"))
                    })
                    .collect::<Result<_>>()?
            };
            if indices.len() != shifts.len() {
                return Err(bad("pattern and shifts differ in length"));
            }
            blocks.push(Block { indices, shifts });
        }
        Ok(WeakChain::new(blocks))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns_contain_each_index_and_one_two() {
        assert_eq!(block_patterns().len(), 29);
        for p in block_patterns() {
            assert_eq!(p.iter().filter(|&&i| i == 2).count(), 1);
            assert!(p.contains(&3) && p.contains(&4));
            let mut full = vec![1usize];
            full.extend(p.iter().map(|&i| i as usize));
            full.push(1);
            let ks = vec![0; full.len()];
            ChainSpec::new(full, ks, 4).unwrap();
        }
    }

    #[test]
    fn chain_spec_rules() {
        assert!(ChainSpec::new(vec![1, 1, 2], vec![0, 0, 0], 4).is_err());
        assert!(ChainSpec::new(vec![2, 4, 2], vec![0, 0, 0], 4).is_err());
        assert!(ChainSpec::new(vec![4, 3, 4], vec![0, 0, 0], 4).is_ok());
        assert!(ChainSpec::new(vec![1, 5], vec![0, 0], 4).is_err());
    }

    #[test]
    fn text_round_trip() {
        for s in ["<342|000>", "<342||3424|000||1314>", "<4342434|0010314>"] {
            let c: WeakChain = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
        let c: WeakChain = "<342||342|0,0,0||1,12,1>".parse().unwrap();
        assert_eq!(c.to_string(), "<342||342|0,0,0||1,12,1>");
        assert_eq!(c.blocks[1].shifts, vec![1, 12, 1]);
        for s in ["342|000", "<342|00>", "<342||342|000>", "<34a|000>"] {
            assert!(s.parse::<WeakChain>().is_err(), "{s}");
        }
    }

    #[test]
    fn statistics_and_normalization() {
        let c: WeakChain = "<4342||43424|0010||31415>".parse().unwrap();
        assert_eq!(c.max_shift(0, 4), Some(1));
        assert_eq!(c.min_shift(1, 4), Some(3));
        assert_eq!(c.jump(0, 4), Some(2));
        assert_eq!(c.jump(0, 3), Some(1));
        assert_eq!(c.jump(0, 2), Some(1));
        let w = c.window(1, 1).unwrap();
        assert_eq!(w.to_string(), "<43424|00102>");
    }

    #[test]
    fn structure_checks() {
        assert!("<234|000>"
            .parse::<WeakChain>()
            .unwrap()
            .validate_structure()
            .is_ok());
        assert!("<2234|0000>"
            .parse::<WeakChain>()
            .unwrap()
            .validate_structure()
            .is_err());
        assert!("<234|010>"
            .parse::<WeakChain>()
            .unwrap()
            .validate_structure()
            .is_err());
        assert!("<24|00>"
            .parse::<WeakChain>()
            .unwrap()
            .validate_structure()
            .is_err());
        assert!("<2434|0001>"
            .parse::<WeakChain>()
            .unwrap()
            .validate_structure()
            .is_ok());
    }
}
