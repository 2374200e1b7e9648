use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use attnstab_core::agcn::{node_attention_scores, train, AgcnHyperparams, AttentionAggregation};
use attnstab_core::graph::{load_model, PerturbMode};
use attnstab_core::motif::{motif_table_up_to, DEFAULT_NODE_LIMIT, MAX_CYCLE_LEN};
use attnstab_core::ranking::{concordance, ConcordanceReport, NodeScoreTable, Order};
use attnstab_core::spectral::{delta_grid, perturbation_sweep, SweepCell};
use attnstab_core::walk::{nstc_table, walk_tree, TwoStepWalk};
use attnstab_core::{Model, Variant};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{AnalysisConfig, Method};
use crate::format::{fmt6, fmt6_opt, Csv};

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub path: String,
    pub variant: Variant,
    pub nodes: usize,
    pub features: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// Feature row scaled in this scenario, if any.
    pub perturb_node: Option<usize>,
    pub perturb_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttentionRun {
    pub scenario: String,
    pub seed: u64,
    /// `ok`, or the training error message.
    pub status: String,
    pub initial_loss: Option<f64>,
    pub final_loss: Option<f64>,
    pub loss_history: Vec<f64>,
    pub alpha: Vec<Vec<f64>>,
    pub predictions: Vec<f64>,
    pub node_scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttentionSummary {
    pub scenarios: Vec<Scenario>,
    pub labels: Vec<f64>,
    pub runs: Vec<AttentionRun>,
    /// Column-mean attention averaged over the successful unperturbed seeds.
    pub scores: Vec<f64>,
    pub ranks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub mode: PerturbMode,
    pub deltas: Vec<f64>,
    pub cells: Vec<SweepCell>,
    pub scores: Vec<Option<f64>>,
    pub ranks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifRow {
    pub node: usize,
    pub w3: Option<f64>,
    pub w4: Option<f64>,
    pub w5: Option<f64>,
    pub w6: Option<f64>,
    pub total_cost: Option<f64>,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NstcRowOut {
    pub node: usize,
    pub n_paths: usize,
    pub nstc: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NstcSummary {
    pub rows: Vec<NstcRowOut>,
    pub walks: Vec<TwoStepWalk>,
}

/// Everything a run produced, written as `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub model: ModelInfo,
    pub config: AnalysisConfig,
    pub attention: Option<AttentionSummary>,
    pub spectral: Option<SpectralSummary>,
    pub motifs: Option<Vec<MotifRow>>,
    pub nstc: Option<NstcSummary>,
    /// Instability-oriented score tables, one per method, in method order.
    pub tables: Vec<NodeScoreTable>,
    pub rankings: BTreeMap<String, Vec<usize>>,
    pub concordance: ConcordanceReport,
}

#[derive(Debug)]
pub struct RunOutput {
    pub summary: Summary,
    /// Written files in the order they were written.
    pub artifacts: Vec<PathBuf>,
}

type Files = Vec<(String, String)>;

enum MethodResult {
    Attention(AttentionSummary, NodeScoreTable, Files),
    Spectral(SpectralSummary, NodeScoreTable, Files),
    Motifs(Vec<MotifRow>, NodeScoreTable, Files),
    Nstc(NstcSummary, NodeScoreTable, Files),
}

/// Loads the model, runs the requested methods and writes every artifact.
pub fn run(config: &AnalysisConfig) -> Result<RunOutput> {
    config.validate()?;
    let model = load_model(&config.model_path, config.variant)
        .with_context(|| format!("--model: cannot load {}", config.model_path.display()))?;
    let n = model.graph.n();
    if config.methods.contains(&Method::Attention) && config.perturb_node >= n {
        bail!("--perturb-node: node {} is out of range for {n} nodes", config.perturb_node);
    }

    let methods: Vec<Method> = config.methods.iter().copied().collect();
    let results: Vec<MethodResult> = methods
        .par_iter()
        .map(|&m| run_method(m, &model, config).with_context(|| format!("{m} analysis failed")))
        .collect::<Result<_>>()?;

    let mut summary = Summary {
        model: ModelInfo {
            path: config.model_path.display().to_string(),
            variant: config.variant,
            nodes: n,
            features: model.features.cols(),
        },
        config: config.clone(),
        attention: None,
        spectral: None,
        motifs: None,
        nstc: None,
        tables: Vec::new(),
        rankings: BTreeMap::new(),
        concordance: ConcordanceReport {
            top_k: config.top_k,
            pairs: Vec::new(),
        },
    };
    let mut files: Files = Vec::new();
    for r in results {
        let (table, f) = match r {
            MethodResult::Attention(s, t, f) => {
                summary.attention = Some(s);
                (t, f)
            }
            MethodResult::Spectral(s, t, f) => {
                summary.spectral = Some(s);
                (t, f)
            }
            MethodResult::Motifs(s, t, f) => {
                summary.motifs = Some(s);
                (t, f)
            }
            MethodResult::Nstc(s, t, f) => {
                summary.nstc = Some(s);
                (t, f)
            }
        };
        summary.rankings.insert(table.method.clone(), table.ranking());
        summary.tables.push(table);
        files.extend(f);
    }
    summary.concordance = concordance(&summary.tables, config.top_k)?;

    std::fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("--out: cannot create {}", config.output_dir.display()))?;
    let mut artifacts = Vec::with_capacity(files.len() + 1);
    for (name, text) in files {
        artifacts.push(write(&config.output_dir, &name, &text)?);
    }
    let json = serde_json::to_string_pretty(&summary)? + "\n";
    artifacts.push(write(&config.output_dir, SUMMARY_FILE, &json)?);
    Ok(RunOutput { summary, artifacts })
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

fn run_method(m: Method, model: &Model, config: &AnalysisConfig) -> Result<MethodResult> {
    match m {
        Method::Attention => attention(model, config),
        Method::Spectral => spectral(model, config),
        Method::Motifs => motifs(model, config),
        Method::Nstc => Ok(nstc(model)),
    }
}

fn scenarios(model: &Model, config: &AnalysisConfig) -> Result<Vec<(Scenario, Model)>> {
    let mut perturbed = model.clone();
    perturbed.features = model
        .features
        .with_row_scaled(config.perturb_node, config.perturb_factor)
        .context("--perturb-node")?;
    Ok(vec![
        (
            Scenario {
                name: "unperturbed".into(),
                perturb_node: None,
                perturb_factor: 1.0,
            },
            model.clone(),
        ),
        (
            Scenario {
                name: "perturbed".into(),
                perturb_node: Some(config.perturb_node),
                perturb_factor: config.perturb_factor,
            },
            perturbed,
        ),
    ])
}

fn attention(model: &Model, config: &AnalysisConfig) -> Result<MethodResult> {
    let labels = model
        .graph
        .labels()
        .ok_or_else(|| anyhow!("model: labels are required for attention"))?
        .to_vec();
    let n = model.graph.n();
    let scenarios = scenarios(model, config)?;
    let jobs: Vec<(&Scenario, &Model, u64)> = scenarios
        .iter()
        .flat_map(|(s, m)| config.seeds.iter().map(move |&seed| (s, m, seed)))
        .collect();

    // collect() keeps job order, so output does not depend on scheduling
    let runs: Vec<AttentionRun> = jobs
        .par_iter()
        .map(|&(scenario, m, seed)| {
            let h = AgcnHyperparams {
                leaky_slope: config.leaky_slope,
                learning_rate: config.learning_rate,
                iterations: config.iterations,
                seed,
                ..Default::default()
            };
            match train(&m.graph, &m.features, &labels, &h) {
                Ok(state) => AttentionRun {
                    scenario: scenario.name.clone(),
                    seed,
                    status: "ok".into(),
                    initial_loss: state.loss_history.first().copied(),
                    final_loss: Some(state.final_loss),
                    node_scores: node_attention_scores(&state.alpha, AttentionAggregation::ColumnMean)
                        .scores
                        .into_iter()
                        .map(|s| s.expect("attention scores are complete"))
                        .collect(),
                    alpha: state.alpha.row_iter().map(|r| r.iter().copied().collect()).collect(),
                    predictions: state.y_pp.iter().copied().collect(),
                    loss_history: state.loss_history,
                },
                Err(e) => AttentionRun {
                    scenario: scenario.name.clone(),
                    seed,
                    status: e.to_string(),
                    initial_loss: None,
                    final_loss: None,
                    loss_history: Vec::new(),
                    alpha: Vec::new(),
                    predictions: Vec::new(),
                    node_scores: Vec::new(),
                },
            }
        })
        .collect();

    let good: Vec<&AttentionRun> = runs
        .iter()
        .filter(|r| r.scenario == "unperturbed" && r.status == "ok")
        .collect();
    if good.is_empty() {
        bail!("training failed for every seed in the unperturbed scenario");
    }
    let scores: Vec<f64> = (0..n)
        .map(|j| good.iter().map(|r| r.node_scores[j]).sum::<f64>() / good.len() as f64)
        .collect();
    let table = NodeScoreTable::from_values("attention", Order::Descending, &scores);
    let ranks = table.ranks();

    let mut files = Files::new();
    let mut runs_csv = Csv::with_header(&["scenario", "seed", "status", "initial_loss", "final_loss"]);
    let mut pred_csv = Csv::with_header(&["scenario", "seed", "node", "label", "prediction"]);
    for r in &runs {
        runs_csv.row([
            r.scenario.clone(),
            r.seed.to_string(),
            if r.status == "ok" { "ok".into() } else { "failed".into() },
            fmt6_opt(r.initial_loss),
            fmt6_opt(r.final_loss),
        ]);
        if r.status != "ok" {
            continue;
        }
        let mut loss = Csv::with_header(&["iteration", "loss"]);
        for (i, l) in r.loss_history.iter().enumerate() {
            loss.row([i.to_string(), fmt6(*l)]);
        }
        files.push((format!("attention_loss_{}_seed{}.csv", r.scenario, r.seed), loss.into_string()));
        let mut alpha = Csv::default();
        for row in &r.alpha {
            alpha.row(row.iter().map(|&v| fmt6(v)));
        }
        files.push((format!("attention_alpha_{}_seed{}.csv", r.scenario, r.seed), alpha.into_string()));
        for (node, (&y, &t)) in r.predictions.iter().zip(&labels).enumerate() {
            pred_csv.row([r.scenario.clone(), r.seed.to_string(), node.to_string(), fmt6(t), fmt6(y)]);
        }
    }
    let mut scores_csv = Csv::with_header(&["node", "score", "rank"]);
    for (node, s) in scores.iter().enumerate() {
        scores_csv.row([node.to_string(), fmt6(*s), ranks[node].to_string()]);
    }
    files.push(("attention_runs.csv".into(), runs_csv.into_string()));
    files.push(("attention_predictions.csv".into(), pred_csv.into_string()));
    files.push(("attention_scores.csv".into(), scores_csv.into_string()));

    let summary = AttentionSummary {
        scenarios: scenarios.into_iter().map(|(s, _)| s).collect(),
        labels,
        runs,
        scores,
        ranks,
    };
    Ok(MethodResult::Attention(summary, table, files))
}

fn spectral(model: &Model, config: &AnalysisConfig) -> Result<MethodResult> {
    let g = &model.graph;
    let deltas = delta_grid(config.delta_min, config.delta_max, config.delta_step)?;
    let nodes: Vec<usize> = (0..g.n()).collect();
    let sweep = perturbation_sweep(g, &deltas, &nodes, config.perturb_mode)?;
    let table = sweep.ranking_at_max_delta(g.n());
    let ranks = table.ranks();

    let mut csv = Csv::with_header(&["node", "delta", "largest_negative_eigenvalue", "status"]);
    for c in &sweep.cells {
        csv.row([
            c.node.to_string(),
            fmt6(c.delta),
            fmt6_opt(c.largest_negative_eigenvalue),
            c.status.as_str().to_string(),
        ]);
    }
    let summary = SpectralSummary {
        mode: sweep.mode,
        deltas: sweep.deltas,
        cells: sweep.cells,
        scores: table.scores.clone(),
        ranks,
    };
    Ok(MethodResult::Spectral(summary, table, vec![("spectral_sweep.csv".into(), csv.into_string())]))
}

fn motifs(model: &Model, config: &AnalysisConfig) -> Result<MethodResult> {
    let g = &model.graph;
    let limit = DEFAULT_NODE_LIMIT.max(g.n());
    let raw = motif_table_up_to(g, config.max_motif_size, limit)?;
    let keep = |k: usize, v: f64| (k <= config.max_motif_size).then_some(v);
    let complete = config.max_motif_size == MAX_CYCLE_LEN;
    let totals: Vec<Option<f64>> = raw.iter().map(|r| complete.then_some(r.total_cost)).collect();
    let table = NodeScoreTable::new("motifs", Order::Descending, totals.clone());
    let ranks = table.ranks();
    let rows: Vec<MotifRow> = raw
        .iter()
        .zip(&totals)
        .map(|(r, &total_cost)| MotifRow {
            node: r.node,
            w3: keep(3, r.w3),
            w4: keep(4, r.w4),
            w5: keep(5, r.w5),
            w6: keep(6, r.w6),
            total_cost,
            rank: ranks[r.node],
        })
        .collect();

    let mut csv = Csv::with_header(&["node", "w3", "w4", "w5", "w6", "total_cost"]);
    for r in &rows {
        csv.row([
            r.node.to_string(),
            fmt6_opt(r.w3),
            fmt6_opt(r.w4),
            fmt6_opt(r.w5),
            fmt6_opt(r.w6),
            fmt6_opt(r.total_cost),
        ]);
    }
    Ok(MethodResult::Motifs(rows, table, vec![("motifs.csv".into(), csv.into_string())]))
}

fn nstc(model: &Model) -> MethodResult {
    let g = &model.graph;
    let raw = nstc_table(g);
    let scores: Vec<f64> = raw.iter().map(|r| r.nstc).collect();
    let table = NodeScoreTable::from_values("nstc", Order::Ascending, &scores);
    let ranks = table.ranks();
    let rows: Vec<NstcRowOut> = raw
        .iter()
        .map(|r| NstcRowOut {
            node: r.node,
            n_paths: r.n_paths,
            nstc: r.nstc,
            rank: ranks[r.node],
        })
        .collect();
    let walks = walk_tree(g);

    let mut csv = Csv::with_header(&["node", "n_paths", "nstc", "rank"]);
    for r in &rows {
        csv.row([r.node.to_string(), r.n_paths.to_string(), fmt6(r.nstc), r.rank.to_string()]);
    }
    let mut tree = Csv::with_header(&["start", "mid", "end", "w1", "w2", "product"]);
    for w in &walks {
        tree.row([
            w.start.to_string(),
            w.mid.to_string(),
            w.end.to_string(),
            fmt6(w.w1),
            fmt6(w.w2),
            fmt6(w.product),
        ]);
    }
    MethodResult::Nstc(
        NstcSummary { rows, walks },
        table,
        vec![
            ("nstc.csv".into(), csv.into_string()),
            ("walk_tree.csv".into(), tree.into_string()),
        ],
    )
}

/// Reads a summary written by [`run`] and recomputes the concordance report,
/// optionally at a different `top_k`.
pub fn concordance_from_summary(path: &Path, top_k: Option<usize>) -> Result<ConcordanceReport> {
    let text = std::fs::read_to_string(path).with_context(|| format!("--summary: cannot read {}", path.display()))?;
    let summary: Summary =
        serde_json::from_str(&text).with_context(|| format!("--summary: {} is not a summary file", path.display()))?;
    let k = top_k.unwrap_or(summary.config.top_k);
    if k == 0 {
        bail!("--top-k: must be at least 1");
    }
    Ok(concordance(&summary.tables, k)?)
}

/// Plain-text table of a concordance report.
pub fn render_concordance(report: &ConcordanceReport) -> String {
    let mut out = format!(
        "{:<10} {:<10} {:<14} {:<14} {:>8} {:>9}\n",
        "method_a",
        "method_b",
        format!("top{}_a", report.top_k),
        format!("top{}_b", report.top_k),
        "jaccard",
        "spearman"
    );
    let set = |v: &[usize]| v.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ");
    for p in &report.pairs {
        out.push_str(&format!(
            "{:<10} {:<10} {:<14} {:<14} {:>8} {:>9}\n",
            p.method_a,
            p.method_b,
            set(&p.top_k_a),
            set(&p.top_k_b),
            fmt6(p.top_k_jaccard),
            fmt6(p.spearman_rho)
        ));
    }
    out
}
