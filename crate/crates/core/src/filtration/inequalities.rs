use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::dirac::truncate;
use crate::filtration::FilteredVector;
use crate::groups::GroupModel;
use crate::linop::{op_norm, NormOptions};
use crate::par;

/// Relative slack absorbing the tolerance of the norm estimates.
const REL_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `|a_k| <= C (2k+1) |a_k|_2`.
    ComponentGrowth,
    /// `|a| <= 2 C (pi^2/6)^(1/2) (sum (1+k)^4 |a_k|_2^2)^(1/2)`.
    WeightedSum,
    /// `|a| <= 2 C (sum_{k<=p} (k+1)^2)^(1/2) |a|_2`.
    Polynomial,
    /// `|P_m a_k P_n| <= C |a_k|_2`, block by block.
    Block,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityCheck {
    pub inequality: Inequality,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub c: f64,
    pub radius: usize,
    pub checks: Vec<InequalityCheck>,
    pub min_margin: f64,
    pub violated: bool,
}

impl InequalityReport {
    pub fn of(&self, which: Inequality) -> impl Iterator<Item = &InequalityCheck> {
        self.checks.iter().filter(move |c| c.inequality == which)
    }
}

fn check(inequality: Inequality, k: Option<usize>, mn: Option<(usize, usize)>, lhs: f64, rhs: f64) -> InequalityCheck {
    InequalityCheck {
        inequality,
        k,
        m: mn.map(|p| p.0),
        n: mn.map(|p| p.1),
        lhs,
        rhs,
        margin: rhs - lhs,
        violated: lhs > rhs * (1.0 + REL_SLACK) + 1e-12,
    }
}

/// Compares norms of `f` and its components on `l2(B_R)` against the growth
/// bounds implied by a Haagerup-type constant `c`. Left-hand sides are lower
/// bounds for the true norms, so any violation falsifies `c`.
pub fn check_growth_inequalities(
    model: &GroupModel,
    f: &FilteredVector,
    c: f64,
    radius: usize,
    opts: NormOptions,
) -> Result<InequalityReport> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("constant must be positive, got {c}")));
    }
    let norms2 = f.component_norms();
    let degrees = f.support_degrees();
    let whole = truncate(model, f, radius)?;
    let full_norm = op_norm(&whole.matrix, opts)?.value;

    let per_degree = par::map_slice(&degrees, |&k| -> Result<Vec<InequalityCheck>> {
        let fk = f.only(model, k)?;
        let t = truncate(model, &fk, radius)?;
        let mut out = vec![check(
            Inequality::ComponentGrowth,
            Some(k),
            None,
            op_norm(&t.matrix, opts)?.value,
            c * (2 * k + 1) as f64 * norms2[k],
        )];
        for m in 0..=radius {
            for n in m.saturating_sub(k)..=(m + k).min(radius) {
                let block = t.matrix.submatrix(t.ball.range(m), t.ball.range(n));
                if block.is_zero() {
                    continue;
                }
                let lhs = op_norm(&block, opts)?.value;
                out.push(check(Inequality::Block, Some(k), Some((m, n)), lhs, c * norms2[k]));
            }
        }
        Ok(out)
    });
    let mut checks = vec![];
    for part in per_degree {
        checks.extend(part?);
    }

    let c_prime = 2.0 * c * PI / 6f64.sqrt();
    let weighted: f64 = norms2
        .iter()
        .enumerate()
        .map(|(k, a)| ((1 + k) as f64).powi(4) * a * a)
        .sum();
    checks.push(check(Inequality::WeightedSum, None, None, full_norm, c_prime * weighted.sqrt()));
    let p = f.top_degree();
    let poly: f64 = (0..=p).map(|k| ((k + 1) * (k + 1)) as f64).sum();
    checks.push(check(Inequality::Polynomial, None, None, full_norm, 2.0 * c * poly.sqrt() * f.norm2()));

    let min_margin = checks.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
    let violated = checks.iter().any(|c| c.violated);
    Ok(InequalityReport {
        c,
        radius,
        checks,
        min_margin,
        violated,
    })
}
