//! Graph data model, model files and structural perturbation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense signed weighted digraph. Entry `(i, j)` is the weight of edge `i -> j`;
/// an edge exists exactly when its weight is nonzero. Self-loops are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedWeightedDigraph {
    weights: DMatrix<f64>,
    node_labels: Option<Vec<f64>>,
    cluster_of: Option<Vec<String>>,
}

impl SignedWeightedDigraph {
    pub fn new(weights: DMatrix<f64>) -> Result<Self> {
        if weights.nrows() != weights.ncols() {
            return Err(Error::MalformedModel(format!(
                "adjacency must be square, got {}x{}",
                weights.nrows(),
                weights.ncols()
            )));
        }
        if weights.nrows() == 0 {
            return Err(Error::MalformedModel("graph has no nodes".into()));
        }
        if let Some((idx, v)) = weights.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            let n = weights.nrows();
            // column-major storage
            return Err(Error::MalformedModel(format!(
                "adjacency entry ({}, {}) is not finite: {v}",
                idx % n,
                idx / n
            )));
        }
        Ok(Self {
            weights,
            node_labels: None,
            cluster_of: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::MalformedModel(format!(
                "adjacency must be square: row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn with_labels(mut self, labels: Vec<f64>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::MalformedModel(format!(
                "labels has {} entries, graph has {} nodes",
                labels.len(),
                self.n()
            )));
        }
        if labels.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedModel("labels contain a non-finite value".into()));
        }
        self.node_labels = Some(labels);
        Ok(self)
    }

    pub fn with_clusters(mut self, clusters: Vec<String>) -> Result<Self> {
        if clusters.len() != self.n() {
            return Err(Error::MalformedModel(format!(
                "clusters has {} entries, graph has {} nodes",
                clusters.len(),
                self.n()
            )));
        }
        self.cluster_of = Some(clusters);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.weights[(from, to)]
    }

    #[inline]
    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.weights[(from, to)] != 0.0
    }

    /// Targets of the out-edges of `k`, in ascending order, self-loop included.
    pub fn out_neighbors(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&j| self.has_edge(k, j))
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.node_labels.as_deref()
    }

    pub fn clusters(&self) -> Option<&[String]> {
        self.cluster_of.as_deref()
    }

    pub fn edge_count(&self) -> usize {
        self.weights.iter().filter(|&&w| w != 0.0).count()
    }

    pub(crate) fn check_node(&self, k: usize) -> Result<()> {
        if k < self.n() {
            Ok(())
        } else {
            Err(Error::BadNode {
                index: k,
                n: self.n(),
            })
        }
    }

    /// Nonzeros in row `k` plus nonzeros in column `k`. A self-loop counts twice.
    pub fn total_degree(&self, k: usize) -> Result<usize> {
        self.check_node(k)?;
        let out = self.weights.row(k).iter().filter(|&&w| w != 0.0).count();
        let inc = self.weights.column(k).iter().filter(|&&w| w != 0.0).count();
        Ok(out + inc)
    }

    /// Adds `delta` to every nonzero entry of column `j`. Structural zeros stay zero.
    pub fn perturb_column(&self, j: usize, delta: f64) -> Result<Self> {
        self.perturb_column_with(j, delta, PerturbMode::NonzeroOnly)
    }

    pub fn perturb_column_with(&self, j: usize, delta: f64, mode: PerturbMode) -> Result<Self> {
        self.check_node(j)?;
        if !delta.is_finite() {
            return Err(Error::BadParameter(format!("perturbation {delta} is not finite")));
        }
        let mut out = self.clone();
        for w in out.weights.column_mut(j).iter_mut() {
            if mode == PerturbMode::WholeColumn || *w != 0.0 {
                *w += delta;
            }
        }
        Ok(out)
    }

    /// Multiplies every weight by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.weights *= c;
        out
    }

    /// Relabels nodes so that old node `perm[i]` becomes new node `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n();
        assert_eq!(perm.len(), n, "permutation length");
        let weights = DMatrix::from_fn(n, n, |i, j| self.weights[(perm[i], perm[j])]);
        Self {
            weights,
            node_labels: self
                .node_labels
                .as_ref()
                .map(|l| perm.iter().map(|&p| l[p]).collect()),
            cluster_of: self
                .cluster_of
                .as_ref()
                .map(|c| perm.iter().map(|&p| c[p].clone()).collect()),
        }
    }
}

/// Which entries of a column a perturbation touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbMode {
    /// Only existing edges of the column change.
    NonzeroOnly,
    /// Every entry of the column changes, creating edges where there were none.
    #[default]
    WholeColumn,
}

impl FromStr for PerturbMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonzero" | "nonzero_only" => Ok(Self::NonzeroOnly),
            "column" | "whole_column" => Ok(Self::WholeColumn),
            other => Err(Error::BadParameter(format!(
                "unknown perturb mode {other:?} (expected nonzero|column)"
            ))),
        }
    }
}

/// Degree convention used by the motif normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreeConvention {
    /// Row nonzeros plus column nonzeros; self-loops counted in both.
    #[default]
    TotalWithSelfLoopsBothWays,
}

/// Node feature table, one row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    values: DMatrix<f64>,
}

impl FeatureMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::MalformedModel("feature matrix is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedModel("features contain a non-finite value".into()));
        }
        Ok(Self { values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::MalformedModel(format!(
                "feature row {i} has a different length than row 0"
            )));
        }
        Self::new(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Copy with the feature row of `node` multiplied by `factor`.
    pub fn with_row_scaled(&self, node: usize, factor: f64) -> Result<Self> {
        if node >= self.rows() {
            return Err(Error::BadNode {
                index: node,
                n: self.rows(),
            });
        }
        let mut values = self.values.clone();
        values.row_mut(node).scale_mut(factor);
        Self::new(values)
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let values = DMatrix::from_fn(self.rows(), self.cols(), |i, j| self.values[(perm[i], j)]);
        Self { values }
    }
}

/// Which reading of the fixture's `(3, 1)` entry to load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Appendix,
    Printed,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Appendix => "appendix",
            Variant::Printed => "printed",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "appendix" => Ok(Variant::Appendix),
            "printed" => Ok(Variant::Printed),
            other => Err(Error::BadParameter(format!(
                "unknown variant {other:?} (expected appendix|printed)"
            ))),
        }
    }
}

/// A graph paired with its node features.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub graph: SignedWeightedDigraph,
    pub features: FeatureMatrix,
}

/// One entry replaced when a named variant is selected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryOverride {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// On-disk model document (JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub n: usize,
    pub adjacency: Vec<Vec<f64>>,
    pub features: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clusters: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub variants: BTreeMap<String, Vec<EntryOverride>>,
}

impl ModelFile {
    /// Validates the document and applies the overrides of `variant`, if it has any.
    pub fn into_model(self, variant: Variant) -> Result<Model> {
        let n = self.n;
        if n == 0 {
            return Err(Error::MalformedModel("field `n` must be positive".into()));
        }
        if self.adjacency.len() != n {
            return Err(Error::MalformedModel(format!(
                "field `adjacency` has {} rows, `n` is {n}",
                self.adjacency.len()
            )));
        }
        let mut adjacency = self.adjacency;
        if let Some(overrides) = self.variants.get(variant.as_str()) {
            for o in overrides {
                if o.row >= n || o.col >= n {
                    return Err(Error::MalformedModel(format!(
                        "variant {variant} overrides entry ({}, {}) outside a {n}x{n} adjacency",
                        o.row, o.col
                    )));
                }
                if let Some(cell) = adjacency[o.row].get_mut(o.col) {
                    *cell = o.value;
                }
            }
        }
        let mut graph = SignedWeightedDigraph::from_rows(&adjacency)?;
        if self.features.len() != n {
            return Err(Error::MalformedModel(format!(
                "field `features` has {} rows, `n` is {n}",
                self.features.len()
            )));
        }
        let features = FeatureMatrix::from_rows(&self.features)?;
        if let Some(labels) = self.labels {
            graph = graph.with_labels(labels)?;
        }
        if let Some(clusters) = self.clusters {
            graph = graph.with_clusters(clusters)?;
        }
        Ok(Model { graph, features })
    }
}

impl Model {
    pub fn to_file(&self) -> ModelFile {
        let w = self.graph.weights();
        let x = self.features.values();
        ModelFile {
            n: self.graph.n(),
            adjacency: w.row_iter().map(|r| r.iter().copied().collect()).collect(),
            features: x.row_iter().map(|r| r.iter().copied().collect()).collect(),
            labels: self.graph.labels().map(<[f64]>::to_vec),
            clusters: self.graph.clusters().map(<[String]>::to_vec),
            variants: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("model serializes")
    }
}

pub fn parse_model(text: &str, variant: Variant) -> Result<Model> {
    let file: ModelFile =
        serde_json::from_str(text).map_err(|e| Error::MalformedModel(e.to_string()))?;
    file.into_model(variant)
}

pub fn load_model(path: impl AsRef<Path>, variant: Variant) -> Result<Model> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_model(&text, variant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn appendix_and_printed_differ_only_at_3_1() {
        let a = fixtures::piezo(Variant::Appendix).graph;
        let p = fixtures::piezo(Variant::Printed).graph;
        assert_eq!(a.weight(3, 0), -2.748);
        assert_eq!(a.weight(3, 1), 1.3083);
        assert_eq!(p.weight(3, 1), -1.3083);
        let diff: Vec<_> = (0..8)
            .flat_map(|i| (0..8).map(move |j| (i, j)))
            .filter(|&(i, j)| a.weight(i, j) != p.weight(i, j))
            .collect();
        assert_eq!(diff, vec![(3, 1)]);
    }

    #[test]
    fn one_node_model() {
        let m = parse_model(r#"{"n":1,"adjacency":[[0]],"features":[[0,0,0]]}"#, Variant::Appendix)
            .unwrap();
        assert_eq!(m.graph.n(), 1);
        assert_eq!(m.graph.edge_count(), 0);
        assert_eq!(m.graph.total_degree(0).unwrap(), 0);
    }

    #[test]
    fn rejects_non_square_adjacency() {
        let rows: Vec<Vec<f64>> = (0..8).map(|_| vec![0.0; 7]).collect();
        let feats: Vec<Vec<f64>> = (0..8).map(|_| vec![0.0; 3]).collect();
        let file = ModelFile {
            n: 8,
            adjacency: rows,
            features: feats,
            labels: None,
            clusters: None,
            variants: BTreeMap::new(),
        };
        assert!(matches!(
            file.into_model(Variant::Appendix),
            Err(Error::MalformedModel(_))
        ));
    }

    #[test]
    fn rejects_non_finite_and_row_mismatch() {
        let err = SignedWeightedDigraph::from_rows(&[vec![0.0, f64::NAN], vec![0.0, 0.0]]);
        assert!(matches!(err, Err(Error::MalformedModel(_))));
        let err = SignedWeightedDigraph::from_rows(&[vec![f64::INFINITY]]);
        assert!(matches!(err, Err(Error::MalformedModel(_))));
        let err = parse_model(
            r#"{"n":2,"adjacency":[[0,1],[1,0]],"features":[[1.0]]}"#,
            Variant::Appendix,
        );
        assert!(matches!(err, Err(Error::MalformedModel(_))));
        let err = parse_model(
            r#"{"n":2,"adjacency":[[0,1],[1,0]],"features":[[1.0],[2.0]],"labels":[0.1]}"#,
            Variant::Appendix,
        );
        assert!(matches!(err, Err(Error::MalformedModel(_))));
    }

    #[test]
    fn degree_examples() {
        let g = fixtures::piezo(Variant::Appendix).graph;
        assert_eq!(g.total_degree(2).unwrap(), 6);
        assert_eq!(g.total_degree(7).unwrap(), 10);
        assert!(matches!(g.total_degree(8), Err(Error::BadNode { index: 8, n: 8 })));
        let total: usize = (0..8).map(|k| g.total_degree(k).unwrap()).sum();
        assert_eq!(total, 2 * g.edge_count());
    }

    #[test]
    fn perturb_column_printed_example() {
        let g = fixtures::piezo(Variant::Printed).graph;
        let p = g.perturb_column(1, 0.5).unwrap();
        assert_eq!(p.weight(0, 1), 1.5);
        assert!((p.weight(3, 1) - (-0.8083)).abs() < 1e-12);
        assert_eq!(p.weight(4, 1), 1.5);
        for i in [1, 2, 5, 6, 7] {
            assert_eq!(p.weight(i, 1), 0.0);
        }
        // input untouched
        assert_eq!(g.weight(0, 1), 1.0);
    }

    #[test]
    fn perturb_column_appendix_example() {
        let g = fixtures::piezo(Variant::Appendix).graph;
        let p = g.perturb_column(1, 1.0).unwrap();
        assert!((p.weight(3, 1) - 2.3083).abs() < 1e-12);
        assert_eq!(g.perturb_column(0, 0.0).unwrap(), g);
        assert!(matches!(g.perturb_column(9, 1.0), Err(Error::BadNode { .. })));
    }

    #[test]
    fn whole_column_mode_fills_structural_zeros() {
        let g = fixtures::piezo(Variant::Appendix).graph;
        let p = g.perturb_column_with(2, 0.5, PerturbMode::WholeColumn).unwrap();
        for i in 0..8 {
            assert_eq!(p.weight(i, 2), g.weight(i, 2) + 0.5);
        }
    }

    #[test]
    fn unknown_variant_names_are_rejected() {
        assert!("nope".parse::<Variant>().is_err());
        assert_eq!("printed".parse::<Variant>().unwrap(), Variant::Printed);
    }

    #[test]
    fn variant_override_out_of_range() {
        let err = parse_model(
            r#"{"n":1,"adjacency":[[0]],"features":[[0]],"variants":{"printed":[{"row":3,"col":1,"value":1}]}}"#,
            Variant::Printed,
        );
        assert!(matches!(err, Err(Error::MalformedModel(_))));
    }
}
