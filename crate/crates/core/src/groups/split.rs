use serde::{Deserialize, Serialize};

use super::model::{Element, GroupModel, ModelKind};
use crate::error::{Error, Result};

/// The integers fixed by a triple `(k, n, m)` when splitting `x in E_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitParameters {
    /// `p = k + n - m`.
    pub p: usize,
    /// `q = floor(p / 2)`.
    pub q: usize,
    /// `q~ = p - q`.
    pub q_tilde: usize,
    /// Target length of the left factor, `k - q`.
    pub left_len: usize,
    /// Target length of the right factor, `n - q~`.
    pub right_len: usize,
}

/// Checks `|m - n| <= k` and `|n - k| <= m` and derives the split lengths.
pub fn split_parameters(k: usize, n: usize, m: usize) -> Result<SplitParameters> {
    if m.abs_diff(n) > k {
        return Err(Error::Constraint(format!("|m - n| <= k fails for (k,n,m) = ({k},{n},{m})")));
    }
    if n.abs_diff(k) > m {
        return Err(Error::Constraint(format!("|n - k| <= m fails for (k,n,m) = ({k},{n},{m})")));
    }
    let p = k + n - m;
    let q = p / 2;
    let q_tilde = p - q;
    Ok(SplitParameters {
        p,
        q,
        q_tilde,
        left_len: k - q,
        right_len: n - q_tilde,
    })
}

/// Splits `x in E_m` as `x = x_bar * x_tilde` with `l(x_bar) = k - q` and
/// `l(x_tilde) = n - q~`.
///
/// Free-type models cut a geodesic spelling of the normal form; `zd` walks a
/// monotone lattice path that exhausts the first coordinate first. The
/// Heisenberg and cyclic models take the first `x_bar` in sphere order whose
/// complement has the right length.
pub fn geodesic_split(
    model: &GroupModel,
    x: &Element,
    k: usize,
    n: usize,
    m: usize,
) -> Result<(Element, Element)> {
    let len = model.length(x)?;
    if len != m {
        return Err(Error::Constraint(format!("x = {x} has length {len}, not m = {m}")));
    }
    let sp = split_parameters(k, n, m)?;
    let x_bar = match model.kind() {
        ModelKind::Free(_) => Element(x.0[..sp.left_len].to_vec()),
        ModelKind::FreeProductCyclic(p, q) => syllable_prefix(x, sp.left_len, p as i32, q as i32),
        ModelKind::DihedralInfinity => syllable_prefix(x, sp.left_len, 2, 2),
        ModelKind::Zd(_) => {
            let mut remaining = sp.left_len as i32;
            Element(
                x.0.iter()
                    .map(|&c| {
                        let step = c.abs().min(remaining);
                        remaining -= step;
                        step * c.signum()
                    })
                    .collect(),
            )
        }
        ModelKind::Heisenberg | ModelKind::Cyclic(_) => {
            let candidates = model.sphere(sp.left_len)?;
            let mut found = None;
            for c in &candidates.elements {
                let rest = model.multiply(&model.invert(c), x);
                if model.length(&rest)? == sp.right_len {
                    found = Some(c.clone());
                    break;
                }
            }
            found.ok_or_else(|| {
                Error::Constraint(format!("no geodesic prefix of length {} for {x}", sp.left_len))
            })?
        }
    };
    let x_tilde = model.multiply(&model.invert(&x_bar), x);
    Ok((x_bar, x_tilde))
}

/// Prefix of length `len` of the geodesic spelling of a syllable word, where
/// `a^e` is spelled with `a` if `e <= p/2` and with `a^-1` otherwise.
fn syllable_prefix(x: &Element, len: usize, p: i32, q: i32) -> Element {
    let mut out = Vec::new();
    let mut remaining = len as i32;
    for &s in &x.0 {
        if remaining == 0 {
            break;
        }
        let ord = if s > 0 { p } else { q };
        let e = s.abs();
        let (steps, forward) = if e <= ord - e { (e, true) } else { (ord - e, false) };
        let take = steps.min(remaining);
        remaining -= take;
        let exp = if forward { take } else { ord - take };
        out.push(if s > 0 { exp } else { -exp });
    }
    Element(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_model, Ball};

    #[test]
    fn free_prefix_split() {
        let g = make_model(ModelKind::Free(2)).unwrap();
        let abab = Element(vec![1, 2, 1, 2]);
        let sp = split_parameters(3, 3, 4).unwrap();
        assert_eq!((sp.p, sp.q, sp.q_tilde), (2, 1, 1));
        let (xb, xt) = geodesic_split(&g, &abab, 3, 3, 4).unwrap();
        assert_eq!(xb, Element(vec![1, 2]));
        assert_eq!(xt, Element(vec![1, 2]));
    }

    #[test]
    fn odd_p_uses_floor() {
        let sp = split_parameters(2, 3, 2).unwrap();
        assert_eq!((sp.p, sp.q, sp.q_tilde), (3, 1, 2));
        assert_eq!((sp.left_len, sp.right_len), (1, 1));
    }

    #[test]
    fn m_equals_k_plus_n() {
        let g = make_model(ModelKind::Free(2)).unwrap();
        let x = Element(vec![1, 1, -2]);
        let (xb, xt) = geodesic_split(&g, &x, 2, 1, 3).unwrap();
        assert_eq!(xb, Element(vec![1, 1]));
        assert_eq!(xt, Element(vec![-2]));
    }

    #[test]
    fn violated_constraints() {
        let g = make_model(ModelKind::Free(2)).unwrap();
        let x = Element(vec![1, 1, 1]);
        let err = geodesic_split(&g, &x, 1, 1, 3).unwrap_err();
        assert!(err.to_string().contains("|m - n| <= k"), "{err}");
        assert!(split_parameters(5, 1, 3).unwrap_err().to_string().contains("|n - k| <= m"));
        // x must lie in E_m.
        assert!(geodesic_split(&g, &x, 2, 2, 2).is_err());
    }

    #[test]
    fn splits_are_exact_for_all_models() {
        for kind in [
            ModelKind::Free(2),
            ModelKind::Zd(2),
            ModelKind::Zd(3),
            ModelKind::Heisenberg,
            ModelKind::Cyclic(7),
            ModelKind::FreeProductCyclic(5, 3),
            ModelKind::DihedralInfinity,
        ] {
            let g = make_model(kind).unwrap();
            let ball = Ball::new(&g, 4).unwrap();
            for x in ball.elements() {
                let m = g.length(x).unwrap();
                for k in 0..=4 {
                    for n in 0..=4 {
                        let Ok(sp) = split_parameters(k, n, m) else {
                            continue;
                        };
                        let (xb, xt) = geodesic_split(&g, x, k, n, m).unwrap();
                        assert_eq!(g.multiply(&xb, &xt), *x, "{kind}");
                        assert_eq!(g.length(&xb).unwrap(), sp.left_len, "{kind} {x}");
                        assert_eq!(g.length(&xt).unwrap(), sp.right_len, "{kind} {x}");
                    }
                }
            }
        }
    }

    #[test]
    fn zd_reduces_first_coordinate_first() {
        let g = make_model(ModelKind::Zd(2)).unwrap();
        let (xb, xt) = geodesic_split(&g, &Element(vec![2, -3]), 3, 2, 5).unwrap();
        assert_eq!(xb, Element(vec![2, -1]));
        assert_eq!(xt, Element(vec![0, -2]));
    }
}
