//! Browser bindings for the single-page demo in `www/`.
//!
//! Every exported function takes a model document (the same JSON format the
//! CLI reads) and returns a JSON string. The plain `*_json` functions hold the
//! logic and are what native tests call; the `#[wasm_bindgen]` wrappers only
//! convert errors into JavaScript exceptions.

use attnstab_core::agcn::{node_attention_scores, train, AgcnHyperparams, AttentionAggregation};
use attnstab_core::fixtures::{PIEZO_APPENDIX_JSON, PIEZO_PRINTED_JSON};
use attnstab_core::graph::{parse_model, PerturbMode};
use attnstab_core::motif::{motif_ranking, motif_table, DEFAULT_NODE_LIMIT};
use attnstab_core::spectral::{delta_grid, perturbation_sweep};
use attnstab_core::walk::{nstc_ranking, nstc_table};
use attnstab_core::{Model, Variant};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest graph the page will analyze; keeps cycle enumeration interactive.
pub const MAX_NODES: usize = 12;

fn load(model_json: &str, variant: &str) -> Result<Model, String> {
    let variant: Variant = variant.parse().map_err(|e| format!("{e}"))?;
    let model = parse_model(model_json, variant).map_err(|e| e.to_string())?;
    if model.graph.n() > MAX_NODES {
        return Err(format!("the demo handles at most {MAX_NODES} nodes"));
    }
    Ok(model)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

pub fn fixture_text(variant: &str) -> Result<String, String> {
    match variant.parse::<Variant>().map_err(|e| e.to_string())? {
        Variant::Appendix => Ok(PIEZO_APPENDIX_JSON.to_string()),
        Variant::Printed => Ok(PIEZO_PRINTED_JSON.to_string()),
    }
}

#[derive(Serialize)]
struct Trajectory {
    node: usize,
    values: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct SweepOut {
    deltas: Vec<f64>,
    trajectories: Vec<Trajectory>,
    /// Nodes ordered from closest-to-zero at the last delta.
    ranking: Vec<usize>,
}

pub fn sweep_json(model_json: &str, variant: &str, delta_max: f64, delta_step: f64, mode: &str) -> Result<String, String> {
    let model = load(model_json, variant)?;
    let mode: PerturbMode = mode.parse().map_err(|e| format!("{e}"))?;
    let g = &model.graph;
    let deltas = delta_grid(delta_step, delta_max, delta_step).map_err(|e| e.to_string())?;
    let nodes: Vec<usize> = (0..g.n()).collect();
    let t = perturbation_sweep(g, &deltas, &nodes, mode).map_err(|e| e.to_string())?;
    let out = SweepOut {
        trajectories: nodes.iter().map(|&node| Trajectory { node, values: t.trajectory(node) }).collect(),
        ranking: t.ranking_at_max_delta(g.n()).ranking(),
        deltas: t.deltas,
    };
    Ok(to_json(&out))
}

#[derive(Serialize)]
struct StabilityRow {
    node: usize,
    w: [f64; 4],
    total_cost: f64,
    motif_rank: usize,
    n_paths: usize,
    nstc: f64,
    nstc_rank: usize,
}

pub fn stability_json(model_json: &str, variant: &str) -> Result<String, String> {
    let model = load(model_json, variant)?;
    let g = &model.graph;
    let motifs = motif_table(g, DEFAULT_NODE_LIMIT).map_err(|e| e.to_string())?;
    let motif_ranks = motif_ranking(&motifs).ranks();
    let nstc = nstc_table(g);
    let nstc_ranks = nstc_ranking(g).ranks();
    let rows: Vec<StabilityRow> = motifs
        .iter()
        .zip(&nstc)
        .map(|(m, w)| StabilityRow {
            node: m.node,
            w: m.terms(),
            total_cost: m.total_cost,
            motif_rank: motif_ranks[m.node],
            n_paths: w.n_paths,
            nstc: w.nstc,
            nstc_rank: nstc_ranks[m.node],
        })
        .collect();
    Ok(to_json(&rows))
}

#[derive(Serialize)]
struct TrainOut {
    loss: Vec<f64>,
    final_loss: f64,
    labels: Vec<f64>,
    predictions: Vec<f64>,
    attention: Vec<f64>,
    ranking: Vec<usize>,
}

#[allow(clippy::too_many_arguments)]
pub fn train_json(
    model_json: &str,
    variant: &str,
    seed: u64,
    iterations: usize,
    learning_rate: f64,
    perturb_node: usize,
    perturb_factor: f64,
) -> Result<String, String> {
    let mut model = load(model_json, variant)?;
    let labels = model
        .graph
        .labels()
        .ok_or("the model has no labels to train against")?
        .to_vec();
    if perturb_factor != 1.0 {
        model.features = model
            .features
            .with_row_scaled(perturb_node, perturb_factor)
            .map_err(|e| e.to_string())?;
    }
    let h = AgcnHyperparams {
        seed,
        iterations,
        learning_rate,
        ..Default::default()
    };
    let s = train(&model.graph, &model.features, &labels, &h).map_err(|e| e.to_string())?;
    let scores = node_attention_scores(&s.alpha, AttentionAggregation::ColumnMean);
    let out = TrainOut {
        ranking: scores.ranking(),
        attention: scores.scores.iter().map(|v| v.unwrap_or(f64::NAN)).collect(),
        final_loss: s.final_loss,
        predictions: s.y_pp.iter().copied().collect(),
        loss: s.loss_history,
        labels,
    };
    Ok(to_json(&out))
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn fixture(variant: &str) -> Result<String, JsValue> {
    js(fixture_text(variant))
}

#[wasm_bindgen]
pub fn sweep(model_json: &str, variant: &str, delta_max: f64, delta_step: f64, mode: &str) -> Result<String, JsValue> {
    js(sweep_json(model_json, variant, delta_max, delta_step, mode))
}

#[wasm_bindgen]
pub fn stability(model_json: &str, variant: &str) -> Result<String, JsValue> {
    js(stability_json(model_json, variant))
}

#[wasm_bindgen(js_name = trainModel)]
pub fn train_model(
    model_json: &str,
    variant: &str,
    seed: u32,
    iterations: u32,
    learning_rate: f64,
    perturb_node: u32,
    perturb_factor: f64,
) -> Result<String, JsValue> {
    js(train_json(
        model_json,
        variant,
        seed as u64,
        iterations as usize,
        learning_rate,
        perturb_node as usize,
        perturb_factor,
    ))
}
