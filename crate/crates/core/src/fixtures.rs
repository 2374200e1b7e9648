//! Shipped piezoelectric tube actuator model.
//!
//! The state matrix of an 8-state actuator model read as a signed weighted
//! digraph, with a 3-feature table per node and two-cluster labels
//! (`0.01` for nodes 0, 3, 4, 7 and `0.2` for nodes 1, 2, 5, 6).

use crate::graph::{parse_model, Model, Variant};

/// Canonical fixture, `(3, 1) = +1.3083`.
pub const PIEZO_APPENDIX_JSON: &str = include_str!("../fixtures/piezo_appendix.json");
/// Same model as printed in matrix form, `(3, 1) = -1.3083`.
pub const PIEZO_PRINTED_JSON: &str = include_str!("../fixtures/piezo_printed.json");

pub const PIEZO_LOW_LABEL_NODES: [usize; 4] = [0, 3, 4, 7];
pub const PIEZO_HIGH_LABEL_NODES: [usize; 4] = [1, 2, 5, 6];

pub fn piezo(variant: Variant) -> Model {
    let text = match variant {
        Variant::Appendix => PIEZO_APPENDIX_JSON,
        Variant::Printed => PIEZO_PRINTED_JSON,
    };
    parse_model(text, variant).expect("shipped fixture parses")
}
