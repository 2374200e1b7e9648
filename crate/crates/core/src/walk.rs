//! Two-step walks and the normalized summation of transition cost (NSTC).
//!
//! From a start node `k` a walk steps to `i != k` and then to `j` with
//! `j != i` and `j != k`, along nonzero edges only. NSTC of `k` is the mean
//! of `w(k,i) * w(i,j)` over all such walks. Strongly negative values mark
//! a polarity transition around `k`; the more negative, the stronger the
//! node spreads instability.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::SignedWeightedDigraph;
use crate::ranking::{NodeScoreTable, Order};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoStepWalk {
    pub start: usize,
    pub mid: usize,
    pub end: usize,
    pub w1: f64,
    pub w2: f64,
    pub product: f64,
}

/// Walks from `k` in lexicographic `(mid, end)` order.
pub fn two_step_walks(g: &SignedWeightedDigraph, k: usize) -> Result<Vec<TwoStepWalk>> {
    g.check_node(k)?;
    let mut walks = Vec::new();
    for mid in g.out_neighbors(k).filter(|&i| i != k) {
        let w1 = g.weight(k, mid);
        for end in g.out_neighbors(mid).filter(|&j| j != mid && j != k) {
            let w2 = g.weight(mid, end);
            walks.push(TwoStepWalk {
                start: k,
                mid,
                end,
                w1,
                w2,
                product: w1 * w2,
            });
        }
    }
    Ok(walks)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NstcRow {
    pub node: usize,
    pub n_paths: usize,
    pub nstc: f64,
    /// Set when the node has no two-step walk; `nstc` is then 0.
    pub no_walks: bool,
}

pub fn nstc(g: &SignedWeightedDigraph, k: usize) -> Result<NstcRow> {
    let walks = two_step_walks(g, k)?;
    let n_paths = walks.len();
    let nstc = if n_paths == 0 {
        0.0
    } else {
        walks.iter().map(|w| w.product).sum::<f64>() / n_paths as f64
    };
    Ok(NstcRow {
        node: k,
        n_paths,
        nstc,
        no_walks: n_paths == 0,
    })
}

pub fn nstc_table(g: &SignedWeightedDigraph) -> Vec<NstcRow> {
    (0..g.n())
        .map(|k| nstc(g, k).expect("node in range"))
        .collect()
}

/// Most negative NSTC ranks first.
pub fn nstc_ranking(g: &SignedWeightedDigraph) -> NodeScoreTable {
    let scores: Vec<f64> = nstc_table(g).iter().map(|r| r.nstc).collect();
    NodeScoreTable::from_values("nstc", Order::Ascending, &scores)
}

/// Every walk from every node, for drawing walk trees.
pub fn walk_tree(g: &SignedWeightedDigraph) -> Vec<TwoStepWalk> {
    (0..g.n())
        .flat_map(|k| two_step_walks(g, k).expect("node in range"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::piezo;
    use crate::Variant;

    #[test]
    fn piezo_walk_counts() {
        let g = piezo(Variant::Appendix).graph;
        assert_eq!(two_step_walks(&g, 2).unwrap().len(), 8);
        assert_eq!(two_step_walks(&g, 3).unwrap().len(), 10);
        assert_eq!(two_step_walks(&g, 7).unwrap().len(), 10);
    }

    #[test]
    fn piezo_nstc_values() {
        let g = piezo(Variant::Appendix).graph;
        for (k, want) in [(0, 1.0), (2, -25.9395), (7, 152.9635)] {
            let got = nstc(&g, k).unwrap().nstc;
            assert!((got - want).abs() < 1e-3, "node {k}: {got}");
        }
    }

    #[test]
    fn ranking_starts_with_6_then_2() {
        let g = piezo(Variant::Appendix).graph;
        let t = nstc_ranking(&g);
        assert_eq!(&t.ranking()[..2], &[6, 2]);
    }

    #[test]
    fn unit_weights_give_one_and_index_ties() {
        let mut rows = vec![vec![0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    rows[i][j] = 1.0;
                }
            }
        }
        let g = SignedWeightedDigraph::from_rows(&rows).unwrap();
        let t = nstc_table(&g);
        assert!(t.iter().all(|r| r.nstc == 1.0 && r.n_paths == 6));
        assert_eq!(nstc_ranking(&g).ranking(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn no_out_edges_and_single_node() {
        let g = SignedWeightedDigraph::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(two_step_walks(&g, 0).unwrap().is_empty());
        let g = SignedWeightedDigraph::from_rows(&[vec![3.0]]).unwrap();
        let row = nstc(&g, 0).unwrap();
        assert_eq!((row.n_paths, row.nstc, row.no_walks), (0, 0.0, true));
    }
}
