//! Imbalanced directed cycles and the per-node total cost.
//!
//! A directed simple cycle is imbalanced when the product of its edge
//! weights is negative (an odd number of negative edges). For each node and
//! each cycle length `k` in `3..=6`, the weight products of the imbalanced
//! `k`-cycles through the node are summed and divided by the squared total
//! degree. The total cost is the cube root of the absolute product of the
//! four sums.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SignedWeightedDigraph;
use crate::ranking::{NodeScoreTable, Order};

pub const MIN_CYCLE_LEN: usize = 3;
pub const MAX_CYCLE_LEN: usize = 6;
/// Default node limit for exact enumeration.
pub const DEFAULT_NODE_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectedCycle {
    /// Visiting order, smallest node index first.
    pub nodes: Vec<usize>,
    pub weight_product: f64,
    pub imbalanced: bool,
}

impl DirectedCycle {
    pub fn contains(&self, node: usize) -> bool {
        self.nodes.contains(&node)
    }
}

fn check_len(k: usize) -> Result<()> {
    if (MIN_CYCLE_LEN..=MAX_CYCLE_LEN).contains(&k) {
        Ok(())
    } else {
        Err(Error::BadParameter(format!(
            "cycle length {k} outside {MIN_CYCLE_LEN}..={MAX_CYCLE_LEN}"
        )))
    }
}

/// All directed simple cycles with exactly `k` distinct nodes, each reported
/// once starting from its smallest node. Self-loops are never cycle edges.
pub fn enumerate_simple_cycles(
    g: &SignedWeightedDigraph,
    k: usize,
    node_limit: usize,
) -> Result<Vec<DirectedCycle>> {
    check_len(k)?;
    let n = g.n();
    if n > node_limit {
        return Err(Error::TooLarge { n, limit: node_limit });
    }
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| g.out_neighbors(i).filter(|&j| j != i).collect())
        .collect();

    let mut out = Vec::new();
    let mut path = Vec::with_capacity(k);
    let mut on_path = vec![false; n];
    for start in 0..n {
        path.clear();
        path.push(start);
        on_path[start] = true;
        extend(g, &adj, start, k, &mut path, &mut on_path, &mut out);
        on_path[start] = false;
    }
    Ok(out)
}

fn extend(
    g: &SignedWeightedDigraph,
    adj: &[Vec<usize>],
    start: usize,
    k: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<DirectedCycle>,
) {
    let last = *path.last().expect("path starts non-empty");
    if path.len() == k {
        if g.has_edge(last, start) {
            let weight_product = path
                .iter()
                .zip(path.iter().skip(1).chain(std::iter::once(&start)))
                .map(|(&a, &b)| g.weight(a, b))
                .product::<f64>();
            out.push(DirectedCycle {
                nodes: path.clone(),
                weight_product,
                imbalanced: weight_product < 0.0,
            });
        }
        return;
    }
    for &next in &adj[last] {
        // only nodes above `start`, so each cycle is found from its minimum
        if next > start && !on_path[next] {
            on_path[next] = true;
            path.push(next);
            extend(g, adj, start, k, path, on_path, out);
            path.pop();
            on_path[next] = false;
        }
    }
}

/// Per-length cycle sets, computed once and indexed by node membership.
#[derive(Debug, Clone)]
pub struct CycleIndex {
    by_len: Vec<Vec<DirectedCycle>>,
}

impl CycleIndex {
    pub fn build(g: &SignedWeightedDigraph, node_limit: usize) -> Result<Self> {
        Self::build_up_to(g, MAX_CYCLE_LEN, node_limit)
    }

    /// Enumerates lengths `3..=max_len` only; longer lengths stay empty.
    pub fn build_up_to(g: &SignedWeightedDigraph, max_len: usize, node_limit: usize) -> Result<Self> {
        check_len(max_len)?;
        let by_len = (MIN_CYCLE_LEN..=MAX_CYCLE_LEN)
            .map(|k| {
                if k <= max_len {
                    enumerate_simple_cycles(g, k, node_limit)
                } else {
                    Ok(Vec::new())
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self { by_len })
    }

    pub fn cycles(&self, k: usize) -> Result<&[DirectedCycle]> {
        check_len(k)?;
        Ok(&self.by_len[k - MIN_CYCLE_LEN])
    }

    /// Sum of weight products of imbalanced `k`-cycles through `node`.
    pub fn imbalanced_sum(&self, node: usize, k: usize) -> Result<f64> {
        Ok(self
            .cycles(k)?
            .iter()
            .filter(|c| c.imbalanced && c.contains(node))
            .map(|c| c.weight_product)
            .sum())
    }
}

fn normalize(sum: f64, degree: usize) -> f64 {
    if degree == 0 || sum == 0.0 {
        0.0
    } else {
        sum / (degree * degree) as f64
    }
}

pub fn imbalanced_motif_score(g: &SignedWeightedDigraph, node: usize, k: usize) -> Result<f64> {
    g.check_node(node)?;
    let cycles = enumerate_simple_cycles(g, k, DEFAULT_NODE_LIMIT.max(g.n()))?;
    let sum = cycles
        .iter()
        .filter(|c| c.imbalanced && c.contains(node))
        .map(|c| c.weight_product)
        .sum();
    Ok(normalize(sum, g.total_degree(node)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifScoreRow {
    pub node: usize,
    pub w3: f64,
    pub w4: f64,
    pub w5: f64,
    pub w6: f64,
    pub total_cost: f64,
}

impl MotifScoreRow {
    fn from_terms(node: usize, [w3, w4, w5, w6]: [f64; 4]) -> Self {
        Self {
            node,
            w3,
            w4,
            w5,
            w6,
            total_cost: (w3 * w4 * w5 * w6).abs().cbrt(),
        }
    }

    pub fn terms(&self) -> [f64; 4] {
        [self.w3, self.w4, self.w5, self.w6]
    }
}

fn row_from_index(g: &SignedWeightedDigraph, index: &CycleIndex, node: usize) -> Result<MotifScoreRow> {
    let d = g.total_degree(node)?;
    let mut terms = [0.0; 4];
    for (slot, k) in terms.iter_mut().zip(MIN_CYCLE_LEN..=MAX_CYCLE_LEN) {
        *slot = normalize(index.imbalanced_sum(node, k)?, d);
    }
    Ok(MotifScoreRow::from_terms(node, terms))
}

pub fn total_cost(g: &SignedWeightedDigraph, node: usize) -> Result<MotifScoreRow> {
    g.check_node(node)?;
    let index = CycleIndex::build(g, DEFAULT_NODE_LIMIT.max(g.n()))?;
    row_from_index(g, &index, node)
}

/// One row per node, enumerating each cycle length once.
pub fn motif_table(g: &SignedWeightedDigraph, node_limit: usize) -> Result<Vec<MotifScoreRow>> {
    motif_table_up_to(g, MAX_CYCLE_LEN, node_limit)
}

/// Like [`motif_table`] but only enumerates cycles up to `max_len`. Terms for
/// longer cycles are 0, which also makes the total cost 0, so callers that
/// truncate should treat those columns as not computed.
pub fn motif_table_up_to(
    g: &SignedWeightedDigraph,
    max_len: usize,
    node_limit: usize,
) -> Result<Vec<MotifScoreRow>> {
    let index = CycleIndex::build_up_to(g, max_len, node_limit)?;
    (0..g.n()).map(|v| row_from_index(g, &index, v)).collect()
}

/// Larger total cost ranks first.
pub fn motif_ranking(rows: &[MotifScoreRow]) -> NodeScoreTable {
    let scores: Vec<f64> = rows.iter().map(|r| r.total_cost).collect();
    NodeScoreTable::from_values("motifs", Order::Descending, &scores)
}
