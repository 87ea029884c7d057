use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::filtration::{block_table, FilteredVector};
use crate::groups::{GroupModel, ModelKind};
use crate::haagerup::{maximize_table, table_ratio, Strategy};
use crate::linop::NormOptions;
use crate::par;
use crate::util::C64;

/// Outcome of a search for the best constant of one block triple.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HaagerupReport {
    pub model: String,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    /// Largest `|P_m f P_n| / |f|_2` found, a lower bound for the optimum.
    pub ratio: f64,
    /// Unit-norm symbol on `E_k` in sphere order, as `[re, im]` pairs.
    pub witness: Vec<[f64; 2]>,
    pub strategy: Strategy,
    pub evaluations: usize,
    pub converged: bool,
    /// Known theoretical constant for the model, if any.
    pub ceiling: Option<f64>,
}

impl HaagerupReport {
    pub fn witness_symbol(&self) -> Vec<C64> {
        self.witness.iter().map(|[re, im]| C64::new(*re, *im)).collect()
    }

    pub fn exceeds_ceiling(&self, tol: f64) -> bool {
        self.ceiling.is_some_and(|c| self.ratio > c + tol)
    }
}

/// The constant of the Haagerup-type condition known for the model: 1 for
/// free groups.
pub fn known_ceiling(kind: ModelKind) -> Option<f64> {
    match kind {
        ModelKind::Free(_) => Some(1.0),
        _ => None,
    }
}

/// Searches for the symbol on `E_k` maximizing `|P_m f P_n| / |f|_2`.
/// Triples with `|m - n| > k` give ratio 0 without a search.
pub fn best_ratio(
    model: &GroupModel,
    k: usize,
    m: usize,
    n: usize,
    strategy: Strategy,
    opts: NormOptions,
) -> Result<HaagerupReport> {
    let table = block_table(model, k, m, n)?;
    let found = maximize_table(&table, strategy, opts)?;
    Ok(HaagerupReport {
        model: model.kind().to_string(),
        k,
        m,
        n,
        ratio: found.ratio,
        witness: found.witness.iter().map(|z| [z.re, z.im]).collect(),
        strategy,
        evaluations: found.evaluations,
        converged: found.converged,
        ceiling: known_ceiling(model.kind()),
    })
}

/// Re-evaluates the ratio of a stored witness.
pub fn reproduce(model: &GroupModel, report: &HaagerupReport, opts: NormOptions) -> Result<f64> {
    let table = block_table(model, report.k, report.m, report.n)?;
    table_ratio(&table, &report.witness_symbol(), opts)
}

/// The witness as a group-algebra element.
pub fn witness_vector(model: &GroupModel, report: &HaagerupReport) -> Result<FilteredVector> {
    let ek = model.sphere(report.k)?;
    let terms: Vec<_> = ek.elements.iter().cloned().zip(report.witness_symbol()).collect();
    FilteredVector::from_terms(model, &terms)
}

/// All triples `(k, m, n)` with entries up to `max` whose block can be
/// nonzero.
pub fn scan_triples(max: usize) -> Vec<(usize, usize, usize)> {
    let mut out = vec![];
    for k in 0..=max {
        for m in 0..=max {
            for n in 0..=max {
                if m.abs_diff(n) <= k && k <= m + n {
                    out.push((k, m, n));
                }
            }
        }
    }
    out
}

/// `best_ratio` over every triple of `scan_triples(max)`.
pub fn haagerup_scan(model: &GroupModel, max: usize, strategy: Strategy, opts: NormOptions) -> Result<Vec<HaagerupReport>> {
    // Build spheres up front so that parallel workers only read them.
    model.spheres_upto(2 * max)?;
    let triples = scan_triples(max);
    par::map_slice(&triples, |&(k, m, n)| best_ratio(model, k, m, n, strategy, opts))
        .into_iter()
        .collect()
}
