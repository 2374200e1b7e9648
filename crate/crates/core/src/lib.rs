//! Attention scores and instability analyses for signed weighted digraphs.
//!
//! A dynamical system's state matrix is read as the weighted adjacency of a
//! directed graph whose nodes are states. On that graph this crate computes:
//!
//! - per-node attention from an attention-enhanced graph convolutional
//!   network ([`agcn`]),
//! - the drift of the largest negative eigenvalue under column perturbation
//!   ([`spectral`]),
//! - degree-normalized weight sums of imbalanced directed cycles
//!   ([`motif`]),
//! - the normalized summation of transition cost over two-step walks
//!   ([`walk`]),
//!
//! and compares the resulting node rankings ([`ranking`]).

pub mod agcn;
pub mod eigen;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod motif;
pub mod ranking;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{FeatureMatrix, Model, SignedWeightedDigraph, Variant};
pub use ranking::{NodeScoreTable, Order};
