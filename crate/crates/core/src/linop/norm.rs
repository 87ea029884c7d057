use serde::Serialize;

use crate::error::{Error, Result};
use crate::linop::SparseMatrix;
use crate::util::{self, C64, DEFAULT_SEED};

#[derive(Clone, Copy, Debug)]
pub struct NormOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            tol: 1e-10,
            max_iter: 5000,
            seed: DEFAULT_SEED,
        }
    }
}

impl NormOptions {
    pub fn with_seed(seed: u64) -> Self {
        NormOptions {
            seed,
            ..Self::default()
        }
    }
}

/// Result of a largest-singular-value estimate.
///
/// `value` is always `|A right|` for the unit vector `right`, so it is a
/// certified lower bound for the operator norm even when `converged` is
/// false. `upper_bound` is `sqrt(|A|_1 |A|_inf)`.
#[derive(Clone, Debug, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    #[serde(skip)]
    pub left: Vec<C64>,
    #[serde(skip)]
    pub right: Vec<C64>,
    pub iterations: usize,
    pub residual: f64,
    pub upper_bound: f64,
    pub converged: bool,
}

/// Estimates the operator norm of `a` by power iteration on `A*A`.
pub fn op_norm(a: &SparseMatrix, opts: NormOptions) -> Result<NormEstimate> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", opts.tol)));
    }
    if opts.max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
    }
    let upper_bound = a.norm_upper_bound();
    if a.is_zero() {
        return Ok(NormEstimate {
            value: 0.0,
            left: unit(a.rows()),
            right: unit(a.cols()),
            iterations: 0,
            residual: 0.0,
            upper_bound,
            converged: true,
        });
    }
    let adj = a.adjoint();
    let first = power_iteration(a, &adj, opts, 0);
    if first.converged {
        return Ok(NormEstimate { upper_bound, ..first });
    }
    let second = power_iteration(a, &adj, opts, 1);
    let best = if second.value > first.value { second } else { first.clone() };
    Ok(NormEstimate {
        upper_bound,
        converged: first.converged || best.converged,
        iterations: first.iterations + best.iterations,
        ..best
    })
}

fn unit(n: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    if let Some(x) = v.first_mut() {
        *x = C64::new(1.0, 0.0);
    }
    v
}

fn power_iteration(a: &SparseMatrix, adj: &SparseMatrix, opts: NormOptions, stream: u64) -> NormEstimate {
    let mut rng = util::rng(opts.seed, stream);
    let mut v = util::gaussian_unit(&mut rng, a.cols());
    let mut sigma = 0.0;
    let mut last_diff = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let w = a.matvec_unchecked(&v);
        let s = util::norm2(&w);
        if s == 0.0 {
            // Start landed in the kernel; reseed within the same stream.
            v = util::gaussian_unit(&mut rng, a.cols());
            continue;
        }
        let diff = (s - sigma).abs();
        sigma = s;
        // Geometric extrapolation of the remaining error from the observed
        // contraction rate of successive differences.
        let rate = diff / last_diff;
        let tail = if rate.is_finite() && rate < 1.0 { diff * rate / (1.0 - rate) } else { diff };
        last_diff = diff;
        let mut next = adj.matvec_unchecked(&w);
        if util::normalize(&mut next) == 0.0 {
            break;
        }
        v = next;
        if diff.max(tail) < opts.tol * sigma {
            converged = true;
            break;
        }
    }
    let mut left = a.matvec_unchecked(&v);
    let value = util::normalize(&mut left);
    let back = adj.matvec_unchecked(&left);
    let residual = util::norm2(
        &back.iter().zip(&v).map(|(b, x)| b - x * value).collect::<Vec<_>>(),
    );
    NormEstimate {
        value,
        left,
        right: v,
        iterations,
        residual,
        upper_bound: 0.0,
        converged,
    }
}
