//! Gauss quadrature rules built by the Golub–Welsch eigenvalue method.

use nalgebra::{DMatrix, SymmetricEigen};

/// A quadrature rule: nodes and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn jacobi_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jm[(i, i)] = diag[i];
        if i + 1 < n {
            jm[(i, i + 1)] = off[i];
            jm[(i + 1, i)] = off[i];
        }
    }
    let eig = SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)]))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Gauss–Legendre rule with `n` points on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Rule {
    assert!(n >= 1, "need at least one node");
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let (x, v0) = jacobi_eigen(&diag, &off);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    Rule {
        nodes: x.iter().map(|&t| mid + half * t).collect(),
        weights: v0.iter().map(|&v| 2.0 * v * v * half).collect(),
    }
}

/// Gauss–Laguerre rule for `∫₀^∞ e^{-x} f(x) dx` with `n` points.
///
/// Weights are returned as natural logarithms. The tail weights fall far
/// below the eigenvector round-off floor, so they are recomputed from the
/// Christoffel sum `1 / Σ_k L_k(x)²` with running rescaling instead of being
/// read off the eigenvectors.
pub fn gauss_laguerre_log(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let diag: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|i| i as f64).collect();
    let (mut x, _) = jacobi_eigen(&diag, &off);

    for xi in x.iter_mut() {
        for _ in 0..3 {
            let (lk, lk1) = laguerre_pair(n, *xi);
            let deriv = n as f64 * (lk - lk1) / *xi;
            if deriv == 0.0 || !deriv.is_finite() {
                break;
            }
            let step = lk / deriv;
            if !step.is_finite() {
                break;
            }
            *xi -= step;
        }
    }

    let logw = x.iter().map(|&xi| -christoffel_log_sum(n, xi)).collect();
    (x, logw)
}

// (L_n(x), L_{n-1}(x)) up to a common positive scale factor.
fn laguerre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if n == 1 {
        return (cur, prev);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        let m = cur.abs().max(prev.abs());
        if m > 1e150 {
            prev /= m;
            cur /= m;
        }
    }
    (cur, prev)
}

// ln Σ_{k<n} L_k(x)²
fn christoffel_log_sum(n: usize, x: f64) -> f64 {
    let mut log_scale = 0.0;
    let (mut prev, mut cur) = (1.0f64, 1.0 - x);
    let mut sum = 1.0;
    if n > 1 {
        sum += cur * cur;
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        sum += cur * cur;
        let m = cur.abs().max(prev.abs());
        if m > 1e100 {
            prev /= m;
            cur /= m;
            sum /= m * m;
            log_scale += 2.0 * m.ln();
        }
    }
    sum.ln() + log_scale
}
