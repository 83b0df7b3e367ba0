//! Transfers between weak 2-chains and the graphs they generate.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{feasible_simplex, verify_rows, LinIneq};

use super::labels::LabelFamily;
use super::system::{chain_rows, variables};
use super::{Block, WeakChain};

fn compatible(from: &WeakChain, to: &WeakChain) -> Option<Block> {
    let middle = &from.blocks[1];
    let first = &to.blocks[0];
    if middle.indices != first.indices {
        return None;
    }
    let m = |i: u8| middle.min_shift(i).unwrap_or(0);
    let renormalized = middle
        .entries()
        .zip(&first.shifts)
        .all(|((i, s), t)| s - m(i) == *t);
    renormalized.then(|| to.blocks[1].shifted_by(m))
}

/// The weak 3-chain `from ⟶ to`, if the middle blocks agree and it is admissible.
pub fn transfer(
    from: &WeakChain,
    to: &WeakChain,
    extra_rows: &[LinIneq],
) -> Result<Option<WeakChain>> {
    if from.len() != 2 || to.len() != 2 {
        return Err(Error::Structure("transfers join two weak 2-chains".into()));
    }
    from.validate_structure()?;
    to.validate_structure()?;
    let Some(third) = compatible(from, to) else {
        return Ok(None);
    };
    let joined = WeakChain {
        blocks: vec![from.blocks[0].clone(), from.blocks[1].clone(), third],
        delta: from.delta.clone(),
    };
    if joined.validate_structure().is_err() || !joined.satisfies_shift_bounds() {
        return Ok(None);
    }
    let vars = variables();
    let mut rows = chain_rows(&joined);
    rows.extend(extra_rows.iter().cloned());
    let res = feasible_simplex(&vars, &rows)?;
    verify_rows(&vars, &rows, &res).map_err(Error::Internal)?;
    Ok(res.is_feasible().then_some(joined))
}

/// Indices of the chains in `candidates` that `from` transfers to.
pub fn successors(
    from: &WeakChain,
    candidates: &[WeakChain],
    extra_rows: &[LinIneq],
) -> Result<Vec<usize>> {
    let hits: Vec<Option<usize>> = candidates
        .par_iter()
        .enumerate()
        .map(|(k, to)| Ok(transfer(from, to, extra_rows)?.map(|_| k)))
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().flatten().collect())
}

/// Directed graph on named nodes with its reachability closure.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferGraph {
    pub nodes: Vec<String>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl TransferGraph {
    pub fn from_edges(nodes: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        TransferGraph {
            nodes,
            edges: edges.into_iter().collect(),
        }
    }

    pub fn successors_of(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .range((node, 0)..=(node, usize::MAX))
            .map(|&(_, b)| b)
    }

    /// Nodes reachable from `node` along at least one edge.
    pub fn reachable_from(&self, node: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = self.successors_of(node).collect();
        while let Some(n) = stack.pop() {
            if seen.insert(n) {
                stack.extend(self.successors_of(n));
            }
        }
        seen
    }

    pub fn reachability(&self) -> BTreeMap<String, BTreeSet<String>> {
        (0..self.nodes.len())
            .map(|n| {
                let names = self
                    .reachable_from(n)
                    .into_iter()
                    .map(|k| self.nodes[k].clone())
                    .collect();
                (self.nodes[n].clone(), names)
            })
            .collect()
    }

    pub fn edge_names(&self) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.nodes[a].clone(), self.nodes[b].clone()))
            .collect()
    }

    /// One `FROM -> TO` line per edge.
    pub fn edge_list(&self) -> String {
        self.edge_names()
            .iter()
            .map(|(a, b)| format!("{a} -> {b}\n"))
            .collect()
    }

    /// `{ node: [successors] }` with every node present.
    pub fn adjacency_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = (0..self.nodes.len())
            .map(|n| {
                let succ: Vec<serde_json::Value> = self
                    .successors_of(n)
                    .map(|k| self.nodes[k].clone().into())
                    .collect();
                (self.nodes[n].clone(), succ.into())
            })
            .collect();
        map.into()
    }
}

/// Transfer graph on individual chains, named by their text form.
pub fn transfer_graph(chains: &[WeakChain], extra_rows: &[LinIneq]) -> Result<TransferGraph> {
    let edges: Vec<Vec<usize>> = chains
        .par_iter()
        .map(|c| successors(c, chains, extra_rows))
        .collect::<Result<_>>()?;
    let nodes = chains.iter().map(|c| c.to_string()).collect();
    Ok(TransferGraph::from_edges(
        nodes,
        edges
            .into_iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.into_iter().map(move |b| (a, b))),
    ))
}

/// Transfer graph on labels: `X → Y` when some member of `X` transfers to some member of `Y`.
pub fn label_graph(families: &[LabelFamily], extra_rows: &[LinIneq]) -> Result<TransferGraph> {
    let pairs: Vec<(usize, usize)> = (0..families.len())
        .flat_map(|a| (0..families.len()).map(move |b| (a, b)))
        .collect();
    let hits: Vec<bool> = pairs
        .par_iter()
        .map(|&(a, b)| {
            for x in &families[a].members {
                for y in &families[b].members {
                    if transfer(x, y, extra_rows)?.is_some() {
                        return Ok(true);
                    }
                }
            }
            Ok(false)
        })
        .collect::<Result<_>>()?;
    let nodes = families.iter().map(|f| f.label.clone()).collect();
    Ok(TransferGraph::from_edges(
        nodes,
        pairs
            .into_iter()
            .zip(hits)
            .filter(|(_, h)| *h)
            .map(|(p, _)| p),
    ))
}
