use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::FilteredVector;
use crate::groups::{Ball, Element, GroupModel, ModelKind};
use crate::util::{self, C64};

/// Tolerance for unit norms and character relations.
pub const STATE_TOL: f64 = 1e-12;

/// A state on the truncated algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    /// `f -> f(e)`.
    Trace,
    /// `f -> <xi, f xi>` for a unit vector `xi` on `B_radius`, given as
    /// `[re, im]` pairs in ball order.
    Vector { radius: usize, coeffs: Vec<[f64; 2]> },
    /// `f -> sum f(x) chi(x)` for the character sending the `i`-th
    /// generator direction to `phases[i]`.
    Character { phases: Vec<[f64; 2]> },
}

fn to_c64(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|[re, im]| C64::new(*re, *im)).collect()
}

impl StateSpec {
    /// A vector state from arbitrary coefficients, normalized.
    pub fn vector(radius: usize, coeffs: &[C64]) -> Result<Self> {
        let n = util::norm2(coeffs);
        if n == 0.0 {
            return Err(Error::InvalidParameter("vector state needs a nonzero vector".into()));
        }
        Ok(StateSpec::Vector {
            radius,
            coeffs: coeffs.iter().map(|c| [c.re / n, c.im / n]).collect(),
        })
    }

    /// The vector state of `sum c_x delta_x`, normalized, on the smallest
    /// ball containing the support.
    pub fn vector_from_terms(model: &GroupModel, terms: &[(Element, C64)]) -> Result<Self> {
        let radius = terms.iter().map(|(x, _)| model.length(x)).collect::<Result<Vec<_>>>()?.into_iter().max().unwrap_or(0);
        let ball = Ball::new(model, radius)?;
        let mut coeffs = vec![C64::new(0.0, 0.0); ball.len()];
        for (x, c) in terms {
            coeffs[ball.locate(x).expect("within radius")] += c;
        }
        Self::vector(radius, &coeffs)
    }

    /// Checks the state against `model`.
    pub fn validate(&self, model: &GroupModel) -> Result<()> {
        match self {
            StateSpec::Trace => Ok(()),
            StateSpec::Vector { radius, coeffs } => {
                let len = Ball::new(model, *radius)?.len();
                if coeffs.len() != len {
                    return Err(Error::DimensionMismatch { expected: len, got: coeffs.len() });
                }
                let n = util::norm2(&to_c64(coeffs));
                if (n - 1.0).abs() > STATE_TOL {
                    return Err(Error::InvalidParameter(format!("vector state has norm {n}, expected 1")));
                }
                Ok(())
            }
            StateSpec::Character { phases } => {
                let kind = model.kind();
                let expected = character_rank(kind)?;
                if phases.len() != expected {
                    return Err(Error::DimensionMismatch { expected, got: phases.len() });
                }
                let phases = to_c64(phases);
                if let Some(p) = phases.iter().find(|p| (p.norm() - 1.0).abs() > STATE_TOL) {
                    return Err(Error::InvalidParameter(format!("phase {p} is not unimodular")));
                }
                let order = match kind {
                    ModelKind::Cyclic(p) => Some(p as i32),
                    ModelKind::DihedralInfinity => Some(2),
                    _ => None,
                };
                if let Some(order) = order {
                    for p in &phases {
                        if (p.powi(order) - 1.0).norm() > 1e-10 {
                            return Err(Error::InvalidParameter(format!(
                                "phase {p} violates the relation g^{order} = e of {kind}"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// Number of phases a character takes, refusing nonamenable models.
fn character_rank(kind: ModelKind) -> Result<usize> {
    if !kind.is_amenable() {
        return Err(Error::Refused(format!(
            "{kind} is not amenable; its characters need not define states of the reduced algebra"
        )));
    }
    Ok(match kind {
        ModelKind::Free(n) => n as usize,
        ModelKind::Zd(d) => d as usize,
        ModelKind::Heisenberg | ModelKind::DihedralInfinity => 2,
        ModelKind::Cyclic(_) => 1,
        ModelKind::FreeProductCyclic(..) => 2,
    })
}

/// `chi(x)` for a character of an amenable model.
fn character_value(kind: ModelKind, phases: &[C64], x: &Element) -> C64 {
    let l = x.letters();
    match kind {
        ModelKind::Zd(_) | ModelKind::Cyclic(_) => l.iter().zip(phases).map(|(e, p)| p.powi(*e)).product(),
        // x^a y^b z^c; characters kill the commutator z.
        ModelKind::Heisenberg => phases[0].powi(l[0]) * phases[1].powi(l[1]),
        ModelKind::Free(_) => l.iter().map(|&g| phases[g.unsigned_abs() as usize - 1].powi(g.signum())).product(),
        ModelKind::DihedralInfinity | ModelKind::FreeProductCyclic(..) => l
            .iter()
            .map(|&s| if s > 0 { phases[0].powi(s) } else { phases[1].powi(-s) })
            .product(),
    }
}

/// Evaluates `state` on `f`.
pub fn state_eval(model: &GroupModel, state: &StateSpec, f: &FilteredVector) -> Result<C64> {
    state.validate(model)?;
    f.check_model(model)?;
    match state {
        StateSpec::Trace => Ok(f.component(0).map(|c| c[0]).unwrap_or_default()),
        StateSpec::Vector { radius, coeffs } => {
            if f.is_zero() {
                return Ok(C64::new(0.0, 0.0));
            }
            let xi = to_c64(coeffs);
            let ball = Ball::new(model, *radius)?;
            let support: Vec<(usize, &Element, C64)> = ball
                .elements()
                .enumerate()
                .zip(&xi)
                .filter(|(_, c)| **c != C64::new(0.0, 0.0))
                .map(|((i, z), c)| (i, z, *c))
                .collect();
            let mut acc = C64::new(0.0, 0.0);
            for (y, c) in f.terms(model)? {
                for &(_, z, xz) in &support {
                    if let Some(x) = ball.locate(&model.multiply(&y, z)) {
                        acc += xi[x].conj() * c * xz;
                    }
                }
            }
            Ok(acc)
        }
        StateSpec::Character { phases } => {
            let phases = to_c64(phases);
            Ok(f.terms(model)?
                .iter()
                .map(|(x, c)| c * character_value(model.kind(), &phases, x))
                .sum())
        }
    }
}
