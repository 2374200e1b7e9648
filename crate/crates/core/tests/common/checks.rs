//! Reusable property checks. Each returns `Err` with a description of the
//! first violation so both proptest wrappers and the acceptance runner can
//! drive them.

use attnstab_core::agcn::{
    pair_attention, run_forward, self_attention_embed, softmax, train_from, AgcnHyperparams,
    AgcnParams,
};
use attnstab_core::eigen::eigenvalues;
use attnstab_core::graph::PerturbMode;
use attnstab_core::motif::{enumerate_simple_cycles, motif_ranking, motif_table};
use attnstab_core::walk::{nstc_ranking, nstc_table, two_step_walks};
use attnstab_core::{FeatureMatrix, SignedWeightedDigraph};
use nalgebra::DMatrix;
use rand::Rng;

use super::*;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-12)
}

pub fn random_features(seed: u64, n: usize, f: usize) -> FeatureMatrix {
    let mut r = rng(seed);
    FeatureMatrix::new(DMatrix::from_fn(n, f, |_, _| r.gen_range(-1.0..1.0))).unwrap()
}

pub fn cycles_match_oracle(g: &SignedWeightedDigraph) -> Check {
    for k in 3..=6 {
        let mut got: Vec<(Vec<usize>, f64)> = Vec::new();
        for c in enumerate_simple_cycles(g, k, 16).map_err(|e| e.to_string())? {
            let negatives = (0..k)
                .filter(|&i| g.weight(c.nodes[i], c.nodes[(i + 1) % k]) < 0.0)
                .count();
            ensure!(c.imbalanced == (negatives % 2 == 1), "sign rule broken on {:?}", c.nodes);
            got.push((c.nodes, c.weight_product));
        }
        got.sort_by(|a, b| a.0.cmp(&b.0));
        let want = brute_force_cycles(g, k);
        ensure!(got == want, "k={k}: {} cycles vs oracle {}", got.len(), want.len());
    }
    Ok(())
}

pub fn walks_match_oracle(g: &SignedWeightedDigraph) -> Check {
    for k in 0..g.n() {
        let got: Vec<(usize, usize, f64)> = two_step_walks(g, k)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|w| (w.mid, w.end, w.product))
            .collect();
        ensure!(got == brute_force_walks(g, k), "walks from {k} differ from oracle");
    }
    Ok(())
}

/// Trace, determinant and conjugate closure of the computed spectrum.
pub fn eigen_properties(m: &DMatrix<f64>) -> Check {
    let n = m.nrows();
    let e = eigenvalues(m).map_err(|e| e.to_string())?;
    ensure!(e.values.len() == n, "expected {n} eigenvalues");
    let scale = m.norm().max(1.0);
    let sum = e.sum();
    ensure!(
        (sum.re - m.trace()).abs() <= 1e-6 * scale && sum.im.abs() <= 1e-6 * scale,
        "trace {} vs eigenvalue sum {sum}",
        m.trace()
    );
    let det = m.clone().lu().determinant();
    let prod = e.product();
    let tol = 1e-6 * det.abs().max(1.0);
    ensure!(
        (prod.re - det).abs() <= tol && prod.im.abs() <= tol,
        "determinant {det} vs eigenvalue product {prod}"
    );
    for v in &e.values {
        if v.im != 0.0 {
            ensure!(
                e.values.iter().any(|w| (w - v.conj()).norm() <= 1e-9 * scale),
                "{v} has no conjugate partner"
            );
        }
    }
    Ok(())
}

pub fn similarity_invariance(m: &DMatrix<f64>, p: &[usize]) -> Check {
    let n = m.nrows();
    let pm = DMatrix::from_fn(n, n, |i, j| m[(p[i], p[j])]);
    let a = eigenvalues(m).map_err(|e| e.to_string())?.values;
    let b = eigenvalues(&pm).map_err(|e| e.to_string())?.values;
    for v in &a {
        let nearest = b.iter().map(|w| (w - v).norm()).fold(f64::INFINITY, f64::min);
        ensure!(nearest <= 1e-6, "{v} missing after relabeling");
    }
    Ok(())
}

pub fn softmax_normalized(v: &[f64]) -> Check {
    let s = softmax(v);
    ensure!(s.iter().all(|&p| (0.0..=1.0).contains(&p)), "softmax left [0, 1]");
    ensure!((s.iter().sum::<f64>() - 1.0).abs() < 1e-9, "softmax sum {}", s.iter().sum::<f64>());
    Ok(())
}

pub fn attention_rows_normalized(seed: u64, n: usize, f: usize) -> Check {
    let x = random_features(seed, n, f);
    let h = AgcnHyperparams { seed, ..Default::default() };
    let p = AgcnParams::init(f, &h);
    let alpha = pair_attention(&self_attention_embed(&x, &h), &p.w_att, &h).map_err(|e| e.to_string())?;
    for row in alpha.row_iter() {
        ensure!(row.iter().all(|&a| a >= 0.0), "negative attention");
        ensure!((row.sum() - 1.0).abs() < 1e-9, "attention row sums to {}", row.sum());
    }
    Ok(())
}

pub fn zero_perturbation_identity(g: &SignedWeightedDigraph) -> Check {
    for j in 0..g.n() {
        for mode in [PerturbMode::NonzeroOnly, PerturbMode::WholeColumn] {
            let p = g.perturb_column_with(j, 0.0, mode).map_err(|e| e.to_string())?;
            ensure!(p.weights() == g.weights(), "column {j} changed by a zero {mode:?} perturbation");
        }
    }
    Ok(())
}

pub fn zero_learning_rate_noop(seed: u64, n: usize) -> Check {
    let g = random_digraph(&mut rng(seed), n, 0.5);
    let x = random_features(seed ^ 1, n, 3);
    let labels = vec![0.1; n];
    let h = AgcnHyperparams {
        learning_rate: 0.0,
        iterations: 5,
        seed,
        ..Default::default()
    };
    let init = AgcnParams::init(3, &h);
    let s = train_from(&g, &x, &labels, &h, init.clone()).map_err(|e| e.to_string())?;
    ensure!(s.params() == init, "parameters moved with zero learning rate");
    ensure!(
        s.loss_history.iter().all(|&l| l == s.loss_history[0]),
        "loss changed with zero learning rate"
    );
    Ok(())
}

pub fn motif_scaling(g: &SignedWeightedDigraph, c: f64) -> Check {
    let a = motif_table(g, 16).map_err(|e| e.to_string())?;
    let b = motif_table(&g.scaled(c), 16).map_err(|e| e.to_string())?;
    for (ra, rb) in a.iter().zip(&b) {
        for (i, (ta, tb)) in ra.terms().iter().zip(rb.terms()).enumerate() {
            let k = i as i32 + 3;
            ensure!(close(ta * c.powi(k), tb, 1e-9), "node {} W{k}: {ta} scaled by {c} gave {tb}", ra.node);
        }
        ensure!(close(ra.total_cost * c.powi(6), rb.total_cost, 1e-9), "node {} total cost", ra.node);
    }
    ensure!(
        motif_ranking(&a).ranking() == motif_ranking(&b).ranking(),
        "motif ranking changed under scaling by {c}"
    );
    Ok(())
}

pub fn nstc_scaling(g: &SignedWeightedDigraph, c: f64) -> Check {
    let scaled = g.scaled(c);
    for (ra, rb) in nstc_table(g).iter().zip(&nstc_table(&scaled)) {
        ensure!(ra.n_paths == rb.n_paths, "walk count changed");
        ensure!(close(ra.nstc * c * c, rb.nstc, 1e-12), "node {} NSTC {} vs {}", ra.node, ra.nstc, rb.nstc);
    }
    ensure!(
        nstc_ranking(g).ranking() == nstc_ranking(&scaled).ranking(),
        "NSTC ranking changed under scaling by {c}"
    );
    Ok(())
}

pub fn forward_equivariance(seed: u64, n: usize) -> Check {
    let mut r = rng(seed);
    let g = random_digraph(&mut r, n, 0.5);
    let perm = random_permutation(&mut r, n);
    let x = random_features(seed ^ 7, n, 3);
    let h = AgcnHyperparams { seed, ..Default::default() };
    let p = AgcnParams::init(3, &h);
    let (alpha, y) = run_forward(&g, &x, &p, &h).map_err(|e| e.to_string())?;
    let (alpha_p, y_p) =
        run_forward(&g.permuted(&perm), &x.permuted(&perm), &p, &h).map_err(|e| e.to_string())?;
    for i in 0..n {
        ensure!((y_p[i] - y[perm[i]]).abs() < 1e-12, "prediction {i} not equivariant");
        for j in 0..n {
            ensure!(
                (alpha_p[(i, j)] - alpha[(perm[i], perm[j])]).abs() < 1e-12,
                "attention ({i},{j}) not equivariant"
            );
        }
    }
    Ok(())
}
