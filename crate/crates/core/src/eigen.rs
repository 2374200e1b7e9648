//! Eigenvalues of small dense nonsymmetric real matrices.
//!
//! Balancing, Householder reduction to upper Hessenberg form, then the
//! Francis double-shift QR iteration. Every returned eigenvalue is checked
//! with two steps of inverse iteration; the largest backward error found is
//! reported as [`EigenSet::residual_bound`].

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Backward error accepted for a computed eigenvalue, relative to `max(1, ||m||_F)`.
pub const BACKWARD_ERROR_LIMIT: f64 = 1e-9;

const MAX_ITERATIONS_PER_EIGENVALUE: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSet {
    /// Sorted by descending real part, then descending imaginary part.
    pub values: Vec<C64>,
    /// Largest `sigma_min(m - lambda I) / max(1, ||m||_F)` estimate over all eigenvalues.
    pub residual_bound: f64,
    /// `max(1, ||m||_F)` of the source matrix.
    pub scale: f64,
}

impl EigenSet {
    /// Wraps known eigenvalues (scale 1, zero residual).
    pub fn from_values(mut values: Vec<C64>) -> Self {
        sort_values(&mut values);
        Self {
            values,
            residual_bound: 0.0,
            scale: 1.0,
        }
    }

    /// Real parts with magnitude at or below this are treated as zero.
    pub fn zero_tolerance(&self) -> f64 {
        BACKWARD_ERROR_LIMIT * self.scale
    }

    pub fn sum(&self) -> C64 {
        self.values.iter().sum()
    }

    pub fn product(&self) -> C64 {
        self.values.iter().product()
    }
}

fn sort_values(values: &mut [C64]) {
    values.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

/// Row-major square work matrix.
struct Work {
    n: usize,
    a: Vec<f64>,
}

impl Work {
    fn from(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = m[(i, j)];
            }
        }
        Self { n, a }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }
}

/// Diagonal similarity by powers of two that evens out row and column norms.
fn balance(w: &mut Work) {
    const RADIX: f64 = 2.0;
    let n = w.n;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut c, mut r) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += w.get(j, i).abs();
                    r += w.get(i, j).abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut g = r / RADIX;
            let mut f = 1.0;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    *w.at(i, j) *= g;
                }
                for j in 0..n {
                    *w.at(j, i) *= f;
                }
            }
        }
    }
}

fn hessenberg(w: &mut Work) {
    let n = w.n;
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let norm = (0..len).map(|i| w.get(k + 1 + i, k).powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = w.get(k + 1, k);
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        for i in 0..len {
            v[i] = w.get(k + 1 + i, k);
        }
        v[0] -= alpha;
        let vv: f64 = v[..len].iter().map(|x| x * x).sum();
        if vv == 0.0 {
            continue;
        }
        // left: rows k+1.. of every column
        for j in 0..n {
            let s: f64 = (0..len).map(|i| v[i] * w.get(k + 1 + i, j)).sum();
            let f = 2.0 * s / vv;
            for i in 0..len {
                *w.at(k + 1 + i, j) -= f * v[i];
            }
        }
        // right: columns k+1.. of every row
        for i in 0..n {
            let s: f64 = (0..len).map(|j| w.get(i, k + 1 + j) * v[j]).sum();
            let f = 2.0 * s / vv;
            for j in 0..len {
                *w.at(i, k + 1 + j) -= f * v[j];
            }
        }
        *w.at(k + 1, k) = alpha;
        for i in k + 2..n {
            *w.at(i, k) = 0.0;
        }
    }
}

#[inline]
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
fn hqr(w: &mut Work) -> Result<Vec<C64>> {
    let n = w.n as isize;
    let eps = f64::EPSILON;
    let mut out = vec![C64::new(0.0, 0.0); w.n];
    let a = |w: &Work, i: isize, j: isize| w.get(i as usize, j as usize);

    let mut anorm = 0.0;
    for i in 0..n {
        for j in (i - 1).max(0)..n {
            anorm += a(w, i, j).abs();
        }
    }
    let mut nn = n - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l > 0 {
                let mut s = a(w, l - 1, l - 1).abs() + a(w, l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a(w, l, l - 1).abs() <= eps * s {
                    *w.at(l as usize, (l - 1) as usize) = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a(w, nn, nn);
            if l == nn {
                out[nn as usize] = C64::new(x + t, 0.0);
                nn -= 1;
            } else {
                let mut y = a(w, nn - 1, nn - 1);
                let mut wv = a(w, nn, nn - 1) * a(w, nn - 1, nn);
                if l == nn - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + wv;
                    let z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        let z = p + sign(z, p);
                        out[(nn - 1) as usize] = C64::new(x + z, 0.0);
                        out[nn as usize] = C64::new(if z != 0.0 { x - wv / z } else { x + z }, 0.0);
                    } else {
                        out[(nn - 1) as usize] = C64::new(x + p, z);
                        out[nn as usize] = C64::new(x + p, -z);
                    }
                    nn -= 2;
                } else {
                    if its == MAX_ITERATIONS_PER_EIGENVALUE {
                        return Err(Error::NumericalFailure(format!(
                            "QR iteration did not converge for eigenvalue {nn}"
                        )));
                    }
                    if its > 0 && its % 10 == 0 {
                        // exceptional shift
                        t += x;
                        for i in 0..=nn {
                            *w.at(i as usize, i as usize) -= x;
                        }
                        let s = a(w, nn, nn - 1).abs() + a(w, nn - 1, nn - 2).abs();
                        x = 0.75 * s;
                        y = x;
                        wv = -0.4375 * s * s;
                    }
                    its += 1;
                    let (mut p, mut q, mut r);
                    let mut m = nn - 2;
                    loop {
                        let z = a(w, m, m);
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - wv) / a(w, m + 1, m) + a(w, m, m + 1);
                        q = a(w, m + 1, m + 1) - z - rr - ss;
                        r = a(w, m + 2, m + 1);
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a(w, m, m - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a(w, m - 1, m - 1).abs() + z.abs() + a(w, m + 1, m + 1).abs());
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m..nn - 1 {
                        *w.at((i + 2) as usize, i as usize) = 0.0;
                        if i != m {
                            *w.at((i + 2) as usize, (i - 1) as usize) = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = a(w, k, k - 1);
                            q = a(w, k + 1, k - 1);
                            r = if k + 1 != nn { a(w, k + 2, k - 1) } else { 0.0 };
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    let v = -a(w, k, k - 1);
                                    *w.at(k as usize, (k - 1) as usize) = v;
                                }
                            } else {
                                *w.at(k as usize, (k - 1) as usize) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            let z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                let mut pp = a(w, k, j) + q * a(w, k + 1, j);
                                if k + 1 != nn {
                                    pp += r * a(w, k + 2, j);
                                    *w.at((k + 2) as usize, j as usize) -= pp * z;
                                }
                                *w.at((k + 1) as usize, j as usize) -= pp * y;
                                *w.at(k as usize, j as usize) -= pp * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                let mut pp = x * a(w, i, k) + y * a(w, i, k + 1);
                                if k + 1 != nn {
                                    pp += z * a(w, i, k + 2);
                                    *w.at(i as usize, (k + 2) as usize) -= pp * r;
                                }
                                *w.at(i as usize, (k + 1) as usize) -= pp * q;
                                *w.at(i as usize, k as usize) -= pp;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l + 1 >= nn {
                break;
            }
        }
    }
    Ok(out)
}

/// Estimate of `sigma_min(m - lambda I)` from two inverse-iteration steps.
fn inverse_iteration_residual(m: &DMatrix<f64>, lambda: C64) -> f64 {
    let n = m.nrows();
    let shifted = DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { lambda } else { C64::new(0.0, 0.0) };
        C64::new(m[(i, j)], 0.0) - d
    });
    let lu = shifted.lu();
    // fixed start vector, not orthogonal to any particular eigenvector in practice
    let mut x = DVector::from_fn(n, |i, _| C64::new(1.0 / (i as f64 + 1.0), 0.5 / (i as f64 + 2.0)));
    let mut residual = f64::INFINITY;
    for _ in 0..2 {
        let norm = x.norm();
        x /= C64::new(norm, 0.0);
        match lu.solve(&x) {
            Some(y) => {
                let ny = y.norm();
                if !ny.is_finite() {
                    return 0.0;
                }
                residual = 1.0 / ny;
                x = y;
            }
            None => return 0.0,
        }
    }
    residual
}

/// All eigenvalues of a square real matrix.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<EigenSet> {
    if m.nrows() != m.ncols() {
        return Err(Error::BadMatrix(format!(
            "matrix must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::BadMatrix("matrix has a non-finite entry".into()));
    }
    let scale = m.norm().max(1.0);
    if m.nrows() == 0 {
        return Ok(EigenSet {
            values: Vec::new(),
            residual_bound: 0.0,
            scale,
        });
    }
    let mut w = Work::from(m);
    balance(&mut w);
    hessenberg(&mut w);
    let mut values = hqr(&mut w)?;
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NumericalFailure("eigenvalue iteration produced a non-finite value".into()));
    }
    sort_values(&mut values);
    let residual_bound = values
        .iter()
        .map(|&l| inverse_iteration_residual(m, l) / scale)
        .fold(0.0, f64::max);
    if residual_bound > BACKWARD_ERROR_LIMIT {
        return Err(Error::NumericalFailure(format!(
            "eigenvalue backward error {residual_bound:e} exceeds {BACKWARD_ERROR_LIMIT:e}"
        )));
    }
    Ok(EigenSet {
        values,
        residual_bound,
        scale,
    })
}
