//! Column perturbation sweeps of the largest negative eigenvalue.
//!
//! For every node `j` and perturbation level `delta`, column `j` of the
//! adjacency is perturbed and the eigenvalue with negative real part closest
//! to zero is tracked. A node whose value climbs toward zero as `delta` grows
//! can push the system toward instability.

use serde::{Deserialize, Serialize};

use crate::eigen::{eigenvalues, EigenSet};
use crate::error::{Error, Result};
use crate::graph::{PerturbMode, SignedWeightedDigraph};
use crate::ranking::{NodeScoreTable, Order};

/// Real part of the eigenvalue with negative real part closest to zero.
///
/// Real parts within [`EigenSet::zero_tolerance`] of zero are not negative.
/// Among equal real parts the smaller imaginary magnitude wins, which only
/// matters for reporting since the real part is what is returned.
pub fn largest_negative_eigenvalue(e: &EigenSet) -> Option<f64> {
    let tol = e.zero_tolerance();
    e.values
        .iter()
        .filter(|v| v.re < -tol)
        .max_by(|a, b| a.re.total_cmp(&b.re).then(b.im.abs().total_cmp(&a.im.abs())))
        .map(|v| v.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    NoNegative,
    Failed,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::NoNegative => "no_negative",
            CellStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub node: usize,
    pub delta: f64,
    pub largest_negative_eigenvalue: Option<f64>,
    pub status: CellStatus,
}

/// `(node, delta)` grid of largest negative eigenvalues, node-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSweepTable {
    pub mode: PerturbMode,
    pub nodes: Vec<usize>,
    pub deltas: Vec<f64>,
    pub cells: Vec<SweepCell>,
}

impl PerturbationSweepTable {
    pub fn cell(&self, node: usize, delta: f64) -> Option<&SweepCell> {
        let ni = self.nodes.iter().position(|&n| n == node)?;
        let di = self.deltas.iter().position(|&d| d == delta)?;
        self.cells.get(ni * self.deltas.len() + di)
    }

    /// Values for one node, ordered by delta.
    pub fn trajectory(&self, node: usize) -> Vec<Option<f64>> {
        match self.nodes.iter().position(|&n| n == node) {
            Some(ni) => {
                let d = self.deltas.len();
                self.cells[ni * d..(ni + 1) * d]
                    .iter()
                    .map(|c| c.largest_negative_eigenvalue)
                    .collect()
            }
            None => Vec::new(),
        }
    }

    /// Per-node score at the largest delta; closest to zero ranks first.
    /// Nodes that were not swept get no score.
    pub fn ranking_at_max_delta(&self, n: usize) -> NodeScoreTable {
        let mut scores = vec![None; n];
        if let Some(&dmax) = self.deltas.last() {
            for &node in &self.nodes {
                if node < n {
                    scores[node] = self.cell(node, dmax).and_then(|c| c.largest_negative_eigenvalue);
                }
            }
        }
        NodeScoreTable::new("spectral", Order::Descending, scores)
    }
}

/// Perturbation levels `min, min+step, ...` up to `max` inclusive (with a
/// small slack for floating point), preceded by `0` when `0` is not already
/// on the grid.
pub fn delta_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !min.is_finite() || !max.is_finite() || max < min {
        return Err(Error::BadParameter(format!(
            "invalid delta grid min={min} max={max} step={step}"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=count).map(|i| min + step * i as f64).collect();
    // pin the last point to max to avoid drift like 2.9999999999999996
    if let Some(last) = grid.last_mut() {
        if (*last - max).abs() < 1e-9 * step.max(1.0) {
            *last = max;
        }
    }
    if !grid.contains(&0.0) {
        grid.insert(0, 0.0);
        grid.sort_by(f64::total_cmp);
    }
    Ok(grid)
}

pub fn perturbation_sweep(
    g: &SignedWeightedDigraph,
    deltas: &[f64],
    nodes: &[usize],
    mode: PerturbMode,
) -> Result<PerturbationSweepTable> {
    for &node in nodes {
        g.check_node(node)?;
    }
    if let Some(d) = deltas.iter().find(|d| !d.is_finite()) {
        return Err(Error::BadParameter(format!("perturbation {d} is not finite")));
    }
    let mut deltas = deltas.to_vec();
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();

    let mut cells = Vec::with_capacity(nodes.len() * deltas.len());
    for &node in nodes {
        for &delta in &deltas {
            let perturbed = g.perturb_column_with(node, delta, mode)?;
            let (value, status) = match eigenvalues(perturbed.weights()) {
                Ok(e) => match largest_negative_eigenvalue(&e) {
                    Some(v) => (Some(v), CellStatus::Ok),
                    None => (None, CellStatus::NoNegative),
                },
                Err(_) => (None, CellStatus::Failed),
            };
            cells.push(SweepCell {
                node,
                delta,
                largest_negative_eigenvalue: value,
                status,
            });
        }
    }
    Ok(PerturbationSweepTable {
        mode,
        nodes: nodes.to_vec(),
        deltas,
        cells,
    })
}
