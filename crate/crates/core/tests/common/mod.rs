//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use fcstar::filtration::FilteredVector;
use fcstar::groups::{make_model, Ball, Element, GroupModel};
use fcstar::linop::SparseMatrix;
use fcstar::util::C64;

pub fn model(spec: &str) -> GroupModel {
    make_model(spec.parse().unwrap()).unwrap()
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Eigenvalues of a complex Hermitian matrix, via its real form
/// `[[Re, -Im], [Im, Re]]` whose spectrum repeats each eigenvalue twice.
pub fn hermitian_eigenvalues(h: &[Vec<C64>]) -> Vec<f64> {
    let n = h.len();
    let mut r = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            r[i][j] = h[i][j].re;
            r[i + n][j + n] = h[i][j].re;
            r[i][j + n] = -h[i][j].im;
            r[i + n][j] = h[i][j].im;
        }
    }
    let ev = jacobi_eigenvalues(r);
    ev.into_iter().step_by(2).collect()
}

/// Largest singular value of a dense complex matrix.
pub fn dense_norm(a: &[Vec<C64>]) -> f64 {
    if a.is_empty() || a[0].is_empty() {
        return 0.0;
    }
    let (rows, cols) = (a.len(), a[0].len());
    let mut h = vec![vec![C64::new(0.0, 0.0); cols]; cols];
    for i in 0..cols {
        for j in 0..cols {
            h[i][j] = (0..rows).map(|k| a[k][i].conj() * a[k][j]).sum();
        }
    }
    hermitian_eigenvalues(&h).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Coefficients of `f` keyed by element.
pub fn coefficient_map(model: &GroupModel, f: &FilteredVector) -> HashMap<Element, C64> {
    f.terms(model).unwrap().into_iter().collect()
}

/// `P_R f P_R` entries with `weight(|x|, |z|)`, built from the group law
/// directly: entry `(x, z)` collects `f(x z^-1)`.
pub fn weighted_compression(
    model: &GroupModel,
    f: &FilteredVector,
    radius: usize,
    weight: impl Fn(usize, usize) -> f64,
) -> HashMap<(usize, usize), C64> {
    let ball = Ball::new(model, radius).unwrap();
    let pos: HashMap<Element, usize> = ball.elements().cloned().enumerate().map(|(i, x)| (x, i)).collect();
    let deg = ball.degrees();
    let mut out: HashMap<(usize, usize), C64> = HashMap::new();
    for (y, c) in f.terms(model).unwrap() {
        for (zi, z) in ball.elements().enumerate() {
            if let Some(&xi) = pos.get(&model.multiply(&y, z)) {
                let w = weight(deg[xi], deg[zi]);
                if w != 0.0 {
                    *out.entry((xi, zi)).or_default() += c * w;
                }
            }
        }
    }
    out.retain(|_, v| *v != C64::new(0.0, 0.0));
    out
}

/// Largest entrywise difference between a sparse matrix and an entry map.
pub fn max_diff(a: &SparseMatrix, b: &HashMap<(usize, usize), C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, j, v) in a.triplets() {
        worst = worst.max((v - b.get(&(i, j)).copied().unwrap_or_default()).norm());
    }
    for (&(i, j), w) in b {
        if a.get(i, j) == C64::new(0.0, 0.0) {
            worst = worst.max(w.norm());
        }
    }
    worst
}

/// `sum_{k > n} k^-2` from the closed value of the full series.
pub fn zeta2_tail_closed(n: u64) -> f64 {
    let head: f64 = (1..=n).rev().map(|k| 1.0 / (k as f64 * k as f64)).sum();
    std::f64::consts::PI.powi(2) / 6.0 - head
}

/// Bracket for `sum_{k > n} k^-2`: `terms` direct terms, then the remainder
/// beyond `M` enclosed by `1/M - 1/(2M^2)` and that plus `1/(6M^3)`.
pub fn zeta2_tail_bracket(n: u64, terms: u64) -> (f64, f64) {
    let m = n + terms;
    let direct: f64 = (n + 1..=m).rev().map(|k| 1.0 / (k as f64 * k as f64)).sum();
    let mf = m as f64;
    let lo = 1.0 / mf - 1.0 / (2.0 * mf * mf);
    (direct + lo, direct + lo + 1.0 / (6.0 * mf * mf * mf))
}
