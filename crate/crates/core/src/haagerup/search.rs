use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linop::{op_norm, NormEstimate, NormOptions, TriTable};
use crate::par;
use crate::util::{self, C64};

/// Stream offset separating alternating starts from random trials.
const START_STREAM: u64 = 1 << 32;

/// How to search for a symbol maximizing `|block(f)| / |f|_2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    /// Independent Gaussian symbols.
    Random { trials: usize, seed: u64 },
    /// Alternating maximization of the trilinear form from Gaussian starts.
    Alternating { starts: usize, iters: usize, seed: u64 },
    /// Both of the above with a shared seed.
    Combined { trials: usize, starts: usize, iters: usize, seed: u64 },
}

impl Strategy {
    pub fn seed(&self) -> u64 {
        match *self {
            Strategy::Random { seed, .. } | Strategy::Alternating { seed, .. } | Strategy::Combined { seed, .. } => seed,
        }
    }

    fn parts(&self) -> (usize, usize, usize) {
        match *self {
            Strategy::Random { trials, .. } => (trials, 0, 0),
            Strategy::Alternating { starts, iters, .. } => (0, starts, iters),
            Strategy::Combined { trials, starts, iters, .. } => (trials, starts, iters),
        }
    }
}

/// Best symbol found by a search, with its certified ratio.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub ratio: f64,
    /// Unit symbol attaining `ratio`.
    pub witness: Vec<C64>,
    pub evaluations: usize,
    /// False if some norm estimate on the winning path hit its iteration cap.
    pub converged: bool,
}

fn evaluate(table: &TriTable, f: &[C64], opts: NormOptions) -> Result<NormEstimate> {
    op_norm(&table.block(f)?, opts)
}

struct Candidate {
    ratio: f64,
    witness: Vec<C64>,
    evaluations: usize,
    converged: bool,
}

fn climb(table: &TriTable, start: Vec<C64>, iters: usize, opts: NormOptions) -> Result<Candidate> {
    let mut f = start;
    let mut est = evaluate(table, &f, opts)?;
    let mut evaluations = 1;
    for _ in 0..iters {
        let g = table.symbol_gradient(&est.right, &est.left);
        let (next, value) = table.best_symbol(&g);
        if value <= est.value * (1.0 + 1e-13) {
            break;
        }
        let next_est = evaluate(table, &next, opts)?;
        evaluations += 1;
        if next_est.value <= est.value {
            break;
        }
        f = next;
        est = next_est;
    }
    Ok(Candidate {
        ratio: est.value,
        witness: f,
        evaluations,
        converged: est.converged,
    })
}

/// Maximizes `|block(f)|` over unit symbols `f`. The returned ratio is the
/// norm estimate of the witness block, hence a certified lower bound for the
/// maximum.
pub fn maximize_table(table: &TriTable, strategy: Strategy, opts: NormOptions) -> Result<SearchResult> {
    let dim = table.symbol_dim;
    if dim == 0 || table.terms.is_empty() {
        return Ok(SearchResult {
            ratio: 0.0,
            witness: vec![C64::new(0.0, 0.0); dim],
            evaluations: 0,
            converged: true,
        });
    }
    let seed = strategy.seed();
    let (trials, starts, iters) = strategy.parts();
    let jobs: Vec<(u64, usize)> = (0..trials as u64)
        .map(|t| (t, 0))
        .chain((0..starts as u64).map(|s| (START_STREAM + s, iters)))
        .collect();
    let results = par::map_slice(&jobs, |&(stream, iters)| {
        let start = util::gaussian_unit(&mut util::rng(seed, stream), dim);
        climb(table, start, iters, opts)
    });
    let mut best: Option<Candidate> = None;
    let mut evaluations = 0;
    for r in results {
        let r = r?;
        evaluations += r.evaluations;
        if best.as_ref().is_none_or(|b| r.ratio > b.ratio) {
            best = Some(r);
        }
    }
    let best = best.expect("at least one job");
    Ok(SearchResult {
        ratio: best.ratio,
        witness: best.witness,
        evaluations,
        converged: best.converged,
    })
}

/// Recomputes `|block(f)| / |f|_2` for a stored witness.
pub fn table_ratio(table: &TriTable, f: &[C64], opts: NormOptions) -> Result<f64> {
    let n = util::norm2(f);
    if n == 0.0 {
        return Ok(0.0);
    }
    Ok(evaluate(table, f, opts)?.value / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::Term;

    #[test]
    fn alternating_finds_diagonal_maximum() {
        // block(f) = diag(f_0, 2 f_1): best unit symbol is e_1 with ratio 2.
        let one = C64::new(1.0, 0.0);
        let t = TriTable::new(
            2,
            2,
            2,
            false,
            vec![
                Term { y: 0, z: 0, x: 0, coeff: one },
                Term { y: 1, z: 1, x: 1, coeff: one * 2.0 },
            ],
        )
        .unwrap();
        let r = maximize_table(&t, Strategy::Alternating { starts: 3, iters: 20, seed: 1 }, NormOptions::default()).unwrap();
        assert!((r.ratio - 2.0).abs() < 1e-10);
        assert!((table_ratio(&t, &r.witness, NormOptions::default()).unwrap() - r.ratio).abs() < 1e-12);
        let r = maximize_table(&t, Strategy::Random { trials: 10, seed: 1 }, NormOptions::default()).unwrap();
        assert!(r.ratio <= 2.0 + 1e-12 && r.ratio > 1.0);
    }
}
