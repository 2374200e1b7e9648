#![allow(dead_code)]

pub mod checks;

use attnstab_core::SignedWeightedDigraph;
use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random signed digraph: each ordered pair (self-loops included) is an edge
/// with probability `density`, weight magnitude in [0.25, 3) and random sign.
pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> SignedWeightedDigraph {
    let w = DMatrix::from_fn(n, n, |_, _| {
        if rng.gen_bool(density) {
            let mag = rng.gen_range(0.25..3.0);
            if rng.gen_bool(0.5) {
                mag
            } else {
                -mag
            }
        } else {
            0.0
        }
    });
    SignedWeightedDigraph::new(w).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        p.swap(i, j);
    }
    p
}

/// Brute-force cycle oracle: every k-permutation of distinct nodes (no edge
/// pruning while generating) whose consecutive pairs and last -> first are
/// non-self-loop edges, kept once per rotation class by requiring the
/// minimum first.
pub fn brute_force_cycles(g: &SignedWeightedDigraph, k: usize) -> Vec<(Vec<usize>, f64)> {
    fn perms(n: usize, k: usize, cur: &mut Vec<usize>, all: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            all.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                perms(n, k, cur, all);
                cur.pop();
            }
        }
    }
    let mut all = Vec::new();
    perms(g.n(), k, &mut Vec::new(), &mut all);
    let mut out = Vec::new();
    for t in all {
        if t[0] != *t.iter().min().unwrap() {
            continue;
        }
        let edges_ok = (0..k).all(|i| t[i] != t[(i + 1) % k] && g.has_edge(t[i], t[(i + 1) % k]));
        if edges_ok {
            let p = (0..k).map(|i| g.weight(t[i], t[(i + 1) % k])).product();
            out.push((t, p));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Triple-loop walk oracle.
pub fn brute_force_walks(g: &SignedWeightedDigraph, k: usize) -> Vec<(usize, usize, f64)> {
    let n = g.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != k && j != i && j != k && g.weight(k, i) != 0.0 && g.weight(i, j) != 0.0 {
                out.push((i, j, g.weight(k, i) * g.weight(i, j)));
            }
        }
    }
    out
}

/// Durand-Kerner roots of a monic polynomial given by coefficients
/// `c[0] + c[1] x + ... + x^deg` (`c` excludes the leading 1).
pub fn polynomial_roots(c: &[f64]) -> Vec<Complex<f64>> {
    let deg = c.len();
    let eval = |x: Complex<f64>| {
        let mut acc = Complex::new(1.0, 0.0);
        for &ck in c.iter().rev() {
            acc = acc * x + ck;
        }
        acc
    };
    let bound = 1.0 + c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut roots: Vec<Complex<f64>> = (0..deg)
        .map(|i| Complex::from_polar(bound * 0.9, 0.4 + 2.0 * std::f64::consts::PI * i as f64 / deg as f64))
        .collect();
    for _ in 0..5000 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm() / roots[i].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    roots
}
