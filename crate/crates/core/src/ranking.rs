//! Per-node score tables, rankings and ranking concordance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which end of the score range ranks first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    /// Larger scores rank first.
    Descending,
    /// Smaller (more negative) scores rank first.
    Ascending,
}

/// Scalar score per node for one method. Missing scores rank last; ties are
/// broken by ascending node index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeScoreTable {
    pub method: String,
    pub order: Order,
    pub scores: Vec<Option<f64>>,
}

impl NodeScoreTable {
    pub fn new(method: impl Into<String>, order: Order, scores: Vec<Option<f64>>) -> Self {
        Self {
            method: method.into(),
            order,
            scores,
        }
    }

    pub fn from_values(method: impl Into<String>, order: Order, scores: &[f64]) -> Self {
        Self::new(method, order, scores.iter().copied().map(Some).collect())
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Node indices from first-ranked to last.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        idx.sort_by(|&a, &b| {
            let ord = match (self.scores[a], self.scores[b]) {
                (Some(x), Some(y)) => match self.order {
                    Order::Descending => y.total_cmp(&x),
                    Order::Ascending => x.total_cmp(&y),
                },
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            };
            ord.then(a.cmp(&b))
        });
        idx
    }

    /// 1-based rank of every node, indexed by node.
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.scores.len()];
        for (pos, node) in self.ranking().into_iter().enumerate() {
            ranks[node] = pos + 1;
        }
        ranks
    }

    /// The first `k` ranked nodes, sorted by node index.
    pub fn top_k(&self, k: usize) -> Vec<usize> {
        let mut top: Vec<usize> = self.ranking().into_iter().take(k).collect();
        top.sort_unstable();
        top
    }
}

pub fn jaccard(a: &[usize], b: &[usize]) -> f64 {
    let inter = a.iter().filter(|x| b.contains(x)).count();
    let union = a.len() + b.iter().filter(|x| !a.contains(x)).count();
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Spearman correlation of two strict rankings (1-based ranks per node).
pub fn spearman(ranks_a: &[usize], ranks_b: &[usize]) -> f64 {
    let n = ranks_a.len();
    if n < 2 {
        return 1.0;
    }
    let d2: f64 = ranks_a
        .iter()
        .zip(ranks_b)
        .map(|(&a, &b)| {
            let d = a as f64 - b as f64;
            d * d
        })
        .sum();
    let n = n as f64;
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairConcordance {
    pub method_a: String,
    pub method_b: String,
    pub top_k_a: Vec<usize>,
    pub top_k_b: Vec<usize>,
    pub top_k_jaccard: f64,
    pub spearman_rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcordanceReport {
    pub top_k: usize,
    pub pairs: Vec<PairConcordance>,
}

impl ConcordanceReport {
    pub fn pair(&self, a: &str, b: &str) -> Option<&PairConcordance> {
        self.pairs.iter().find(|p| {
            (p.method_a == a && p.method_b == b) || (p.method_a == b && p.method_b == a)
        })
    }
}

pub fn compare(a: &NodeScoreTable, b: &NodeScoreTable, top_k: usize) -> Result<PairConcordance> {
    if a.len() != b.len() {
        return Err(Error::BadParameter(format!(
            "tables {} ({} nodes) and {} ({} nodes) cover different node sets",
            a.method,
            a.len(),
            b.method,
            b.len()
        )));
    }
    if top_k == 0 {
        return Err(Error::BadParameter("top_k must be at least 1".into()));
    }
    let top_k_a = a.top_k(top_k);
    let top_k_b = b.top_k(top_k);
    Ok(PairConcordance {
        method_a: a.method.clone(),
        method_b: b.method.clone(),
        top_k_jaccard: jaccard(&top_k_a, &top_k_b),
        spearman_rho: spearman(&a.ranks(), &b.ranks()),
        top_k_a,
        top_k_b,
    })
}

/// Pairwise concordance between every two tables, in input order.
pub fn concordance(tables: &[NodeScoreTable], top_k: usize) -> Result<ConcordanceReport> {
    let mut pairs = Vec::new();
    for (i, a) in tables.iter().enumerate() {
        for b in &tables[i + 1..] {
            pairs.push(compare(a, b, top_k)?);
        }
    }
    if tables.len() == 1 {
        // still validate top_k
        compare(&tables[0], &tables[0], top_k)?;
    }
    Ok(ConcordanceReport { top_k, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_rankings() {
        let t = NodeScoreTable::from_values("a", Order::Descending, &[0.3, 0.1, 0.9, 0.5]);
        let p = compare(&t, &t, 2).unwrap();
        assert_eq!(p.top_k_jaccard, 1.0);
        assert_eq!(p.spearman_rho, 1.0);
        assert_eq!(p.top_k_a, vec![2, 3]);
    }

    #[test]
    fn reversed_rankings() {
        let s: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let a = NodeScoreTable::from_values("a", Order::Descending, &s);
        let b = NodeScoreTable::from_values("b", Order::Ascending, &s);
        assert_eq!(compare(&a, &b, 2).unwrap().spearman_rho, -1.0);
    }

    #[test]
    fn ties_break_by_node_index_and_missing_last() {
        let t = NodeScoreTable::new(
            "t",
            Order::Descending,
            vec![None, Some(0.71), Some(0.2), Some(0.71)],
        );
        assert_eq!(t.ranking(), vec![1, 3, 2, 0]);
        assert_eq!(t.ranks(), vec![4, 1, 3, 2]);
        let asc = NodeScoreTable::new("t", Order::Ascending, vec![None, Some(-1.0), Some(-3.0)]);
        assert_eq!(asc.ranking(), vec![2, 1, 0]);
    }

    #[test]
    fn mismatched_node_sets() {
        let a = NodeScoreTable::from_values("a", Order::Descending, &[1.0, 2.0]);
        let b = NodeScoreTable::from_values("b", Order::Descending, &[1.0, 2.0, 3.0]);
        assert!(matches!(concordance(&[a, b], 2), Err(Error::BadParameter(_))));
    }

    proptest! {
        #[test]
        fn concordance_is_rank_based(
            s in proptest::collection::vec(-100.0f64..100.0, 2..12),
            t in proptest::collection::vec(-100.0f64..100.0, 12),
        ) {
            let t = &t[..s.len()];
            let a = NodeScoreTable::from_values("a", Order::Descending, &s);
            let b = NodeScoreTable::from_values("b", Order::Ascending, t);
            // strictly monotone transform of a
            let s2: Vec<f64> = s.iter().map(|x| (x / 50.0).exp() * 3.0 + 1.0).collect();
            let a2 = NodeScoreTable::from_values("a", Order::Descending, &s2);
            let p1 = compare(&a, &b, 3).unwrap();
            let p2 = compare(&a2, &b, 3).unwrap();
            prop_assert_eq!(p1.top_k_jaccard, p2.top_k_jaccard);
            prop_assert_eq!(p1.spearman_rho, p2.spearman_rho);
            let q = compare(&b, &a, 3).unwrap();
            prop_assert_eq!(p1.top_k_jaccard, q.top_k_jaccard);
            prop_assert_eq!(p1.spearman_rho, q.spearman_rho);
            prop_assert!((-1.0..=1.0).contains(&p1.spearman_rho));
            prop_assert_eq!(compare(&a, &a, 3).unwrap().top_k_jaccard, 1.0);
        }
    }
}
