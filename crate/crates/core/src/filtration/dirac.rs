use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::{ball_operator, FilteredVector};
use crate::groups::{Ball, GroupModel};
use crate::linop::{op_norm, NormEstimate, NormOptions, SparseMatrix};
use crate::par;
use crate::util::C64;

/// Norm of one block `P_m a P_{m-j}` inside a band.
#[derive(Clone, Debug, Serialize)]
pub struct BlockNorm {
    pub m: usize,
    pub n: usize,
    pub norm: f64,
    /// Set when `m` or `n` lies within the top degree of the radius, where
    /// the band continues past the truncation.
    pub edge: bool,
}

/// The band `T_j = sum_m P_m a P_{m-j}` compressed to `l2(B_R)`.
#[derive(Clone, Debug, Serialize)]
pub struct DiracBand {
    pub j: i64,
    pub radius: usize,
    #[serde(skip)]
    pub matrix: SparseMatrix,
    pub blocks: Vec<BlockNorm>,
    /// Largest block norm, a lower bound for `|T_j|`.
    pub norm_lower: f64,
    /// Largest block norm over blocks not flagged as edge.
    pub interior_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BandDecomposition {
    pub radius: usize,
    pub top_degree: usize,
    pub bands: Vec<DiracBand>,
    /// Largest entrywise gap between `[D_R, f]` and `sum_j j T_j`.
    pub identity_error: f64,
    /// Entries of the compressed operator outside every band `|j| <= p`.
    pub stray_entries: usize,
}

/// Truncated operator of `f` together with the degree of every basis vector.
pub(crate) struct Truncation {
    pub ball: Ball,
    pub matrix: SparseMatrix,
    pub degrees: Vec<usize>,
}

pub(crate) fn truncate(model: &GroupModel, f: &FilteredVector, radius: usize) -> Result<Truncation> {
    if radius < f.top_degree() {
        return Err(Error::InvalidParameter(format!(
            "radius {radius} below top degree {}",
            f.top_degree()
        )));
    }
    let ball = Ball::new(model, radius)?;
    let matrix = ball_operator(model, f, &ball)?;
    let degrees = ball.degrees();
    Ok(Truncation { ball, matrix, degrees })
}

impl Truncation {
    /// `D_R F - F D_R`, computed as a difference of two products.
    pub fn commutator(&self) -> SparseMatrix {
        let d = &self.degrees;
        let left = self.matrix.map_entries(|i, _, v| v * d[i] as f64);
        let right = self.matrix.map_entries(|_, j, v| v * d[j] as f64);
        left.sub(&right).expect("same shape")
    }

    /// Entries of `F` with `l(x) - l(z) = j`.
    pub fn band(&self, j: i64) -> SparseMatrix {
        let d = &self.degrees;
        self.matrix
            .map_entries(|i, k, v| if d[i] as i64 - d[k] as i64 == j { v } else { C64::new(0.0, 0.0) })
    }
}

/// Splits the compressed operator of `f` into its bands and checks
/// `[D_R, f] = sum_j j T_j` entrywise.
pub fn dirac_bands(model: &GroupModel, f: &FilteredVector, radius: usize, opts: NormOptions) -> Result<BandDecomposition> {
    let t = truncate(model, f, radius)?;
    let p = f.top_degree();
    let js: Vec<i64> = (-(p as i64)..=p as i64).collect();
    let bands = par::map_slice(&js, |&j| -> Result<DiracBand> {
        let matrix = t.band(j);
        let pairs: Vec<(usize, usize)> = (0..=radius)
            .filter_map(|m| {
                let n = m as i64 - j;
                (0..=radius as i64).contains(&n).then_some((m, n as usize))
            })
            .collect();
        let blocks = pairs
            .iter()
            .map(|&(m, n)| {
                let b = matrix.submatrix(t.ball.range(m), t.ball.range(n));
                Ok(BlockNorm {
                    m,
                    n,
                    norm: op_norm(&b, opts)?.value,
                    edge: m + p > radius || n + p > radius,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let norm_lower = blocks.iter().map(|b| b.norm).fold(0.0, f64::max);
        let interior_norm = blocks.iter().filter(|b| !b.edge).map(|b| b.norm).fold(0.0, f64::max);
        Ok(DiracBand {
            j,
            radius,
            matrix,
            blocks,
            norm_lower,
            interior_norm,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut assembled = SparseMatrix::zeros(t.ball.len(), t.ball.len());
    let mut covered = 0;
    for b in &bands {
        covered += b.matrix.nnz();
        assembled = assembled.add(&b.matrix.scale(C64::new(b.j as f64, 0.0)))?;
    }
    let identity_error = assembled.max_abs_diff(&t.commutator())?;
    Ok(BandDecomposition {
        radius,
        top_degree: p,
        bands,
        identity_error,
        stray_entries: t.matrix.nnz() - covered,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SeminormReport {
    pub radius: usize,
    /// `|[D_R, f]|` on `l2(B_R)`, a lower bound for `L(f)`.
    pub value: f64,
    pub estimate: NormEstimate,
}

/// The norm of the commutator of `f` with the length operator, compressed
/// to `l2(B_R)`.
pub fn seminorm_lower(model: &GroupModel, f: &FilteredVector, radius: usize, opts: NormOptions) -> Result<SeminormReport> {
    let t = truncate(model, f, radius)?;
    let estimate = op_norm(&t.commutator(), opts)?;
    Ok(SeminormReport {
        radius,
        value: estimate.value,
        estimate,
    })
}

/// `C K (K+1) sum_k |f_k|_2`, an upper bound for `L(f)` whenever `C` is a
/// valid Haagerup-type constant for the model.
pub fn seminorm_upper(f: &FilteredVector, c: f64) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("constant must be positive, got {c}")));
    }
    let k = f.top_degree() as f64;
    Ok(c * k * (k + 1.0) * f.component_norms().iter().sum::<f64>())
}

/// `sum_x l(x) |f(x)|`, an upper bound for `L(f)` valid for every model:
/// `[D, lambda(x)]` is a weighted permutation with weights bounded by `l(x)`.
pub fn seminorm_upper_l1(f: &FilteredVector) -> f64 {
    f.weighted_norm1()
}

/// The tighter of the two upper bounds, the first only when `c` is given.
pub fn seminorm_upper_best(f: &FilteredVector, c: Option<f64>) -> Result<f64> {
    let l1 = seminorm_upper_l1(f);
    Ok(match c {
        Some(c) => seminorm_upper(f, c)?.min(l1),
        None => l1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_model, Element};

    fn model(s: &str) -> GroupModel {
        make_model(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn scalar_has_no_bands() {
        let m = model("free(2)");
        let f = FilteredVector::delta(&m, &m.identity(), C64::new(2.5, 0.0)).unwrap();
        let d = dirac_bands(&m, &f, 3, NormOptions::default()).unwrap();
        assert_eq!(d.bands.len(), 1);
        assert_eq!(d.identity_error, 0.0);
        assert_eq!(seminorm_lower(&m, &f, 3, NormOptions::default()).unwrap().value, 0.0);
        assert_eq!(seminorm_upper(&f, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn shift_on_integers_uses_unit_bands_only() {
        let m = model("zd(1)");
        let f = FilteredVector::delta(&m, &Element(vec![1]), C64::new(1.0, 0.0)).unwrap();
        let d = dirac_bands(&m, &f, 6, NormOptions::default()).unwrap();
        assert_eq!(d.identity_error, 0.0);
        assert_eq!(d.stray_entries, 0);
        for b in &d.bands {
            assert_eq!(b.matrix.is_zero(), b.j.abs() != 1, "band {}", b.j);
        }
    }

    #[test]
    fn upper_bounds() {
        let m = model("free(2)");
        let g = m.sphere(1).unwrap().elements[1].clone();
        let f = FilteredVector::delta(&m, &g, C64::new(1.0, 0.0)).unwrap();
        assert_eq!(seminorm_upper(&f, 1.0).unwrap(), 2.0);
        assert_eq!(seminorm_upper_l1(&f), 1.0);
        assert!(seminorm_upper(&f, 0.0).is_err());
        for r in 1..=6 {
            let l = seminorm_lower(&m, &f, r, NormOptions::default()).unwrap().value;
            assert!(l <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn homogeneous() {
        let m = model("dihedral-infinity");
        let f = FilteredVector::random(&m, 2, 8, true).unwrap();
        let lam = C64::new(-1.5, 2.0);
        let a = seminorm_lower(&m, &f, 6, NormOptions::default()).unwrap().value;
        let b = seminorm_lower(&m, &f.scale(lam), 6, NormOptions::default()).unwrap().value;
        assert!((b - lam.norm() * a).abs() < 1e-9 * b);
    }
}
