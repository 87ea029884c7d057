use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::dirac::truncate;
use crate::filtration::{seminorm_upper_best, FilteredVector};
use crate::groups::GroupModel;
use crate::linop::{op_norm, NormOptions, SparseMatrix};
use crate::util::C64;

/// Number of terms summed directly before the asymptotic remainder.
const DIRECT_TERMS: u64 = 16;

/// `sum_{k >= m} k^-2` by Euler-Maclaurin; absolute error below `m^-13`.
fn tail_from(m: f64) -> f64 {
    let inv = 1.0 / m;
    let i2 = inv * inv;
    // Terms in inv^1, inv^2, then odd powers inv^3 .. inv^11.
    let odd = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let series = odd.iter().rev().fold(0.0, |acc, c| acc * i2 + c);
    inv + 0.5 * i2 + inv * i2 * series
}

/// `sum_{k > n} k^-2`.
pub fn zeta2_tail(n: u64) -> f64 {
    let direct: f64 = (1..=DIRECT_TERMS).rev().map(|i| ((n + i) as f64).powi(-2)).sum();
    direct + tail_from((n + DIRECT_TERMS + 1) as f64)
}

/// `|phi_N|_2 = (2 sum_{k > N} k^-2)^(1/2)`.
pub fn phi_norm(n: u64) -> f64 {
    (2.0 * zeta2_tail(n)).sqrt()
}

/// Smallest `n >= 0` with `zeta2_tail(n) < t`. The bracket
/// `1/(n+1) < tail(n) < 1/n` confines the answer to a window of width two.
fn smallest_tail_below(t: f64) -> u64 {
    if zeta2_tail(0) < t {
        return 0;
    }
    let mut n = ((1.0 / t - 1.0).ceil().max(0.0) as u64).saturating_sub(1);
    while zeta2_tail(n) >= t {
        n += 1;
    }
    n
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationBudget {
    pub eps: f64,
    pub c: f64,
    /// Smallest `N` with `2 pi |phi_N|_2 < eps`.
    pub n: u64,
    /// Smallest `K` with `(sum_{k > K} k^-2)^(1/2) < eps / (C (2N+1))`.
    pub k: u64,
    pub smoothing_error: f64,
    pub k_threshold: f64,
    pub k_tail_root: f64,
}

/// The pair `(N, K)` controlling the finite-dimensional approximation of
/// the unit Lipschitz ball to within `eps`.
pub fn truncation_budget(eps: f64, c: f64) -> Result<TruncationBudget> {
    if !(eps > 0.0 && eps.is_finite()) || !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps and C must be positive, got {eps}, {c}")));
    }
    let n = smallest_tail_below((eps / (2.0 * PI)).powi(2) / 2.0);
    let k_threshold = eps / (c * (2 * n + 1) as f64);
    let k = smallest_tail_below(k_threshold * k_threshold);
    Ok(TruncationBudget {
        eps,
        c,
        n,
        k,
        smoothing_error: 2.0 * PI * phi_norm(n),
        k_threshold,
        k_tail_root: zeta2_tail(k).sqrt(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothingReport {
    pub n_cut: usize,
    pub radius: usize,
    pub phi_norm_sq: f64,
    /// `|f^(N)|` on `l2(B_R)`.
    pub tail_norm: f64,
    /// `|[D_R, f]|` on `l2(B_R)`.
    pub commutator_lower: f64,
    /// Rigorous upper bound for `L(f)`.
    pub commutator_upper: f64,
    /// `2 pi |phi_N|_2 |[D_R, f]|`, the bound for the compressed operator.
    pub bound_truncated: f64,
    /// `2 pi |phi_N|_2` times the rigorous upper bound for `L(f)`.
    pub bound_upper: f64,
    pub holds_truncated: bool,
    pub holds_upper: bool,
    /// `f = f^N + f^(N)` entrywise on blocks away from the boundary.
    pub split_exact: bool,
}

pub struct Smoothing {
    /// Entries of the compressed operator with `|l(x) - l(z)| > N`.
    pub tail: SparseMatrix,
    /// Entries with `|l(x) - l(z)| <= N`.
    pub head: SparseMatrix,
    pub report: SmoothingReport,
}

/// Splits the compressed operator of `f` at band `N` and checks the norm of
/// the far part against the commutator.
pub fn smoothing(
    model: &GroupModel,
    f: &FilteredVector,
    n_cut: usize,
    radius: usize,
    c: Option<f64>,
    opts: NormOptions,
) -> Result<Smoothing> {
    let t = truncate(model, f, radius)?;
    let d = &t.degrees;
    let zero = C64::new(0.0, 0.0);
    let tail = t.matrix.map_entries(|i, j, v| if d[i].abs_diff(d[j]) > n_cut { v } else { zero });
    let head = t.matrix.map_entries(|i, j, v| if d[i].abs_diff(d[j]) <= n_cut { v } else { zero });
    let interior = radius - f.top_degree();
    let split_exact = t
        .matrix
        .triplets()
        .filter(|&(i, j, _)| d[i] <= interior && d[j] <= interior)
        .all(|(i, j, v)| head.get(i, j) + tail.get(i, j) == v);

    let tail_norm = op_norm(&tail, opts)?.value;
    let commutator_lower = op_norm(&t.commutator(), opts)?.value;
    let commutator_upper = seminorm_upper_best(f, c)?;
    let phi = phi_norm(n_cut as u64);
    let bound_truncated = 2.0 * PI * phi * commutator_lower;
    let bound_upper = 2.0 * PI * phi * commutator_upper;
    let slack = |b: f64| b * (1.0 + 1e-9) + 1e-12;
    let report = SmoothingReport {
        n_cut,
        radius,
        phi_norm_sq: phi * phi,
        tail_norm,
        commutator_lower,
        commutator_upper,
        bound_truncated,
        bound_upper,
        holds_truncated: tail_norm <= slack(bound_truncated),
        holds_upper: tail_norm <= slack(bound_upper),
        split_exact,
    };
    Ok(Smoothing { tail, head, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::make_model;

    #[test]
    fn tail_values() {
        let z2 = PI * PI / 6.0;
        assert!((zeta2_tail(0) - z2).abs() < 1e-15);
        assert!((zeta2_tail(1) - (z2 - 1.0)).abs() < 1e-15);
        assert!((zeta2_tail(2) - (z2 - 1.25)).abs() < 1e-15);
        for n in [1u64, 10, 1000, 1 << 30] {
            let t = zeta2_tail(n);
            assert!(1.0 / ((n + 1) as f64) < t && t < 1.0 / (n as f64));
        }
    }

    #[test]
    fn budget_at_two_pi_root_two() {
        let b = truncation_budget(2.0 * PI * 2f64.sqrt(), 3.0).unwrap();
        assert_eq!(b.n, 1);
        assert!(b.smoothing_error < b.eps);
    }

    #[test]
    fn budget_is_monotone() {
        let mut last = (0, 0);
        for eps in [4.0, 2.0, 1.0, 0.5, 0.25, 0.1] {
            let b = truncation_budget(eps, 2.0).unwrap();
            assert!(b.n >= last.0 && b.k >= last.1);
            last = (b.n, b.k);
        }
        assert!(truncation_budget(0.0, 1.0).is_err());
    }

    #[test]
    fn smoothing_extremes() {
        let m = make_model("free(2)".parse().unwrap()).unwrap();
        let f = FilteredVector::random(&m, 2, 5, true).unwrap();
        let s = smoothing(&m, &f, 2, 4, Some(1.0), NormOptions::default()).unwrap();
        assert!(s.tail.is_zero());
        assert!(s.report.split_exact);
        let s = smoothing(&m, &f, 0, 4, Some(1.0), NormOptions::default()).unwrap();
        assert!(s.report.holds_truncated && s.report.holds_upper);
        assert!((s.report.phi_norm_sq - PI * PI / 3.0).abs() < 1e-14);
    }
}
