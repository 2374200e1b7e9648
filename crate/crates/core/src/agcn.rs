//! Attention-enhanced graph convolutional network.
//!
//! The pipeline has four stages:
//!
//! 1. Self-attention embedding: `Y = (X Xᵀ) X`, then a per-node softmax over
//!    features of `LeakyReLU(Y)` gives `Y'`.
//! 2. Pairwise attention: `alpha_ij` is the softmax over `j` of
//!    `LeakyReLU(w_att · (y'_i ‖ y'_j))`.
//! 3. Graph convolution on the symmetrically degree-normalized adjacency
//!    with self-loops, combined with `alpha`, then a softmax across nodes.
//! 4. Training by the heuristic update rules below (not exact gradients).
//!
//! Update rules, with `r = y_target - y''` and `M = combine(Â, alpha)`:
//!
//! - `W += mu * (M X ⊙ (1 - M X))ᵀ r`
//! - `G = diag(mu r) (Y' ⊙ (1 - Y')) ⊙ X`, and `w_att` moves by the mean of
//!   `G_i ‖ G_j` over the ordered pairs `(i, j)` with `Ã_ij != 0`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, SignedWeightedDigraph};
use crate::ranking::{NodeScoreTable, Order};

/// How the normalized adjacency and the attention coefficients are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttentionCombine {
    /// `Â ⊙ alpha`: attention masked to the self-looped adjacency.
    #[default]
    Elementwise,
    /// `Â · alpha`.
    MatrixProduct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgcnHyperparams {
    pub leaky_slope: f64,
    pub learning_rate: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Half-width of the uniform initialization interval.
    pub init_range: f64,
    pub attention_combine: AttentionCombine,
    /// Apply the `w_att` update; when false only `W` is trained.
    pub update_attention: bool,
}

impl Default for AgcnHyperparams {
    fn default() -> Self {
        Self {
            leaky_slope: 0.01,
            learning_rate: 0.8,
            iterations: 500,
            seed: 0,
            init_range: 0.5,
            attention_combine: AttentionCombine::Elementwise,
            update_attention: true,
        }
    }
}

impl AgcnHyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.leaky_slope > 0.0 && self.leaky_slope < 1.0) {
            return Err(Error::BadParameter(format!(
                "leaky_slope must lie in (0, 1), got {}",
                self.leaky_slope
            )));
        }
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::BadParameter(format!(
                "learning_rate must be finite and >= 0, got {}",
                self.learning_rate
            )));
        }
        if self.iterations == 0 {
            return Err(Error::BadParameter("iterations must be at least 1".into()));
        }
        if !(self.init_range >= 0.0) || !self.init_range.is_finite() {
            return Err(Error::BadParameter(format!(
                "init_range must be finite and >= 0, got {}",
                self.init_range
            )));
        }
        Ok(())
    }
}

/// Learnable parameters: `w_att` (length `2F`) and `W` (`F x 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct AgcnParams {
    pub w_att: DVector<f64>,
    pub w: DVector<f64>,
}

impl AgcnParams {
    /// Uniform in `[-init_range, init_range]`, `w_att` drawn before `W`.
    pub fn init(features: usize, h: &AgcnHyperparams) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(h.seed);
        let r = h.init_range;
        let mut draw = |len: usize| {
            DVector::from_iterator(
                len,
                (0..len).map(|_| if r > 0.0 { rng.gen_range(-r..=r) } else { 0.0 }),
            )
        };
        let w_att = draw(2 * features);
        let w = draw(features);
        Self { w_att, w }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingIntermediates {
    pub omega_self: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub y_prime: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgcnState {
    pub w_att: DVector<f64>,
    pub w: DVector<f64>,
    pub alpha: DMatrix<f64>,
    /// Loss before each update, one entry per iteration.
    pub loss_history: Vec<f64>,
    /// Predictions with the final parameters.
    pub y_pp: DVector<f64>,
    /// Loss of `y_pp`.
    pub final_loss: f64,
}

impl AgcnState {
    pub fn params(&self) -> AgcnParams {
        AgcnParams {
            w_att: self.w_att.clone(),
            w: self.w.clone(),
        }
    }
}

#[inline]
pub fn leaky_relu(x: f64, slope: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        slope * x
    }
}

pub fn softmax(v: &[f64]) -> Vec<f64> {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = v.iter().map(|x| (x - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

fn softmax_rows(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for mut row in out.row_iter_mut() {
        let s = softmax(&row.iter().copied().collect::<Vec<_>>());
        for (dst, v) in row.iter_mut().zip(s) {
            *dst = v;
        }
    }
    out
}

pub fn self_attention_embed(x: &FeatureMatrix, h: &AgcnHyperparams) -> EmbeddingIntermediates {
    let x = x.values();
    let omega_self = x * x.transpose();
    let y = &omega_self * x;
    let y_prime = softmax_rows(&y.map(|v| leaky_relu(v, h.leaky_slope)));
    EmbeddingIntermediates {
        omega_self,
        y,
        y_prime,
    }
}

/// Row-stochastic attention coefficients; row `i` is a softmax over all `j`.
pub fn pair_attention(
    e: &EmbeddingIntermediates,
    w_att: &DVector<f64>,
    h: &AgcnHyperparams,
) -> Result<DMatrix<f64>> {
    let f = e.y_prime.ncols();
    if w_att.len() != 2 * f {
        return Err(Error::BadParameter(format!(
            "w_att has length {}, expected {}",
            w_att.len(),
            2 * f
        )));
    }
    // w_att · (y'_i ‖ y'_j) = src_i + dst_j
    let src = &e.y_prime * w_att.rows(0, f);
    let dst = &e.y_prime * w_att.rows(f, f);
    let n = e.y_prime.nrows();
    let scores = DMatrix::from_fn(n, n, |i, j| leaky_relu(src[i] + dst[j], h.leaky_slope));
    Ok(softmax_rows(&scores))
}

/// `Ã = A + I`, `Â = D̃^{-1/2} Ã D̃^{-1/2}` with `D̃_ii = Σ_j |Ã_ij|`.
pub fn normalize_adjacency(g: &SignedWeightedDigraph) -> DMatrix<f64> {
    let n = g.n();
    let a_tilde = g.weights() + DMatrix::<f64>::identity(n, n);
    let inv_sqrt: Vec<f64> = a_tilde
        .row_iter()
        .map(|r| {
            let d: f64 = r.iter().map(|v| v.abs()).sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| inv_sqrt[i] * a_tilde[(i, j)] * inv_sqrt[j])
}

pub fn combine(a_hat: &DMatrix<f64>, alpha: &DMatrix<f64>, mode: AttentionCombine) -> DMatrix<f64> {
    match mode {
        AttentionCombine::Elementwise => a_hat.component_mul(alpha),
        AttentionCombine::MatrixProduct => a_hat * alpha,
    }
}

fn predict(
    a_hat: &DMatrix<f64>,
    x: &DMatrix<f64>,
    alpha: &DMatrix<f64>,
    w: &DVector<f64>,
    h: &AgcnHyperparams,
) -> (DMatrix<f64>, DVector<f64>) {
    let mx = combine(a_hat, alpha, h.attention_combine) * x;
    let logits: Vec<f64> = (&mx * w).iter().map(|&v| leaky_relu(v, h.leaky_slope)).collect();
    (mx, DVector::from_vec(softmax(&logits)))
}

/// Predictions `Y''` for the given attention and convolution weights.
pub fn forward(
    g: &SignedWeightedDigraph,
    x: &FeatureMatrix,
    alpha: &DMatrix<f64>,
    w: &DVector<f64>,
    h: &AgcnHyperparams,
) -> Result<DVector<f64>> {
    let n = g.n();
    if x.rows() != n || alpha.nrows() != n || alpha.ncols() != n {
        return Err(Error::BadParameter(format!(
            "shape mismatch: graph {n} nodes, features {} rows, alpha {}x{}",
            x.rows(),
            alpha.nrows(),
            alpha.ncols()
        )));
    }
    if w.len() != x.cols() {
        return Err(Error::BadParameter(format!(
            "W has {} rows, features have {} columns",
            w.len(),
            x.cols()
        )));
    }
    Ok(predict(&normalize_adjacency(g), x.values(), alpha, w, h).1)
}

/// Embedding, attention and forward pass with explicit parameters.
pub fn run_forward(
    g: &SignedWeightedDigraph,
    x: &FeatureMatrix,
    params: &AgcnParams,
    h: &AgcnHyperparams,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let e = self_attention_embed(x, h);
    let alpha = pair_attention(&e, &params.w_att, h)?;
    let y = forward(g, x, &alpha, &params.w, h)?;
    Ok((alpha, y))
}

pub fn mse(target: &[f64], pred: &DVector<f64>) -> f64 {
    target
        .iter()
        .zip(pred.iter())
        .map(|(t, p)| (t - p).powi(2))
        .sum::<f64>()
        / target.len() as f64
}

pub fn train(
    g: &SignedWeightedDigraph,
    x: &FeatureMatrix,
    labels: &[f64],
    h: &AgcnHyperparams,
) -> Result<AgcnState> {
    train_from(g, x, labels, h, AgcnParams::init(x.cols(), h))
}

pub fn train_from(
    g: &SignedWeightedDigraph,
    x: &FeatureMatrix,
    labels: &[f64],
    h: &AgcnHyperparams,
    init: AgcnParams,
) -> Result<AgcnState> {
    h.validate()?;
    let n = g.n();
    let f = x.cols();
    if x.rows() != n {
        return Err(Error::BadParameter(format!(
            "features have {} rows, graph has {n} nodes",
            x.rows()
        )));
    }
    if labels.len() != n {
        return Err(Error::BadParameter(format!(
            "labels have {} entries, graph has {n} nodes",
            labels.len()
        )));
    }
    if init.w_att.len() != 2 * f || init.w.len() != f {
        return Err(Error::BadParameter("initial parameter shapes do not match features".into()));
    }

    let xv = x.values();
    let a_hat = normalize_adjacency(g);
    let emb = self_attention_embed(x, h);
    let softmax_slope = emb.y_prime.map(|v| v * (1.0 - v)).component_mul(xv);

    // pair counts for the w_att step: Ã_ij != 0
    let mut out_count = vec![0usize; n];
    let mut in_count = vec![0usize; n];
    let mut pairs = 0usize;
    for i in 0..n {
        for j in 0..n {
            let a_tilde = g.weight(i, j) + if i == j { 1.0 } else { 0.0 };
            if a_tilde != 0.0 {
                out_count[i] += 1;
                in_count[j] += 1;
                pairs += 1;
            }
        }
    }

    let mu = h.learning_rate;
    let AgcnParams { mut w_att, mut w } = init;
    let mut loss_history = Vec::with_capacity(h.iterations);

    for iteration in 0..h.iterations {
        let alpha = pair_attention(&emb, &w_att, h)?;
        let (mx, y) = predict(&a_hat, xv, &alpha, &w, h);
        let residual = DVector::from_iterator(n, labels.iter().zip(y.iter()).map(|(t, p)| t - p));
        let loss = residual.norm_squared() / n as f64;
        if !loss.is_finite() {
            return Err(Error::DivergedTraining { iteration });
        }
        loss_history.push(loss);

        let slope = mx.map(|v| v * (1.0 - v));
        w += (slope.transpose() * &residual) * mu;

        if h.update_attention && pairs > 0 {
            let mut step = DVector::zeros(2 * f);
            for i in 0..n {
                let scale = mu * residual[i];
                for c in 0..f {
                    let g_ic = scale * softmax_slope[(i, c)];
                    step[c] += out_count[i] as f64 * g_ic;
                    step[f + c] += in_count[i] as f64 * g_ic;
                }
            }
            w_att += step / pairs as f64;
        }
        if w.iter().chain(w_att.iter()).any(|v| !v.is_finite()) {
            return Err(Error::DivergedTraining { iteration });
        }
    }

    let alpha = pair_attention(&emb, &w_att, h)?;
    let (_, y_pp) = predict(&a_hat, xv, &alpha, &w, h);
    let final_loss = mse(labels, &y_pp);
    if !final_loss.is_finite() {
        return Err(Error::DivergedTraining {
            iteration: h.iterations,
        });
    }
    Ok(AgcnState {
        w_att,
        w,
        alpha,
        loss_history,
        y_pp,
        final_loss,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttentionAggregation {
    /// Attention received: mean of column `j`.
    #[default]
    ColumnMean,
    /// Attention paid: mean of row `i`.
    RowMean,
}

pub fn node_attention_scores(alpha: &DMatrix<f64>, aggregation: AttentionAggregation) -> NodeScoreTable {
    let n = alpha.nrows() as f64;
    let scores: Vec<f64> = match aggregation {
        AttentionAggregation::ColumnMean => alpha.column_iter().map(|c| c.sum() / n).collect(),
        AttentionAggregation::RowMean => alpha.row_iter().map(|r| r.sum() / n).collect(),
    };
    NodeScoreTable::from_values("attention", Order::Descending, &scores)
}
