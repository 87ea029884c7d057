use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::block_table;
use crate::groups::{make_model, Element, GroupModel, ModelKind};
use crate::linop::{exact_apply, rational, Rational, RationalSparseMatrix};

/// The witness family showing that `Z^2` with its standard length admits no
/// Haagerup-type constant.
///
/// `f` is `1/k` on the points `(p, k-p)` with `1 <= p <= k`; `xi` is
/// `1/sqrt(n)` on the points `(q, n-q)` with `1 <= q <= n`, recorded through
/// its squares. The image lives on `E_m` with `m = n + k`.
#[derive(Clone, Debug, Serialize)]
pub struct Z2Witness {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub f: Vec<(String, String)>,
    pub xi_squared: Vec<(String, String)>,
    pub f_norm1: String,
    pub f_norm2_squared: String,
    pub xi_norm2_squared: String,
    /// `|(f * xi)(r, m-r)|^2` for every `r` with a nonzero value.
    pub image_squared: Vec<(i64, String)>,
    /// Points `(r, m-r)` whose squared value is exactly `1/n`.
    pub full_points: Vec<i64>,
    /// `|P_m f P_n xi|_2^2`, exact.
    pub image_norm2_squared: String,
    /// `(n - k)/n`, the guaranteed lower bound for the squared image norm.
    pub guaranteed: String,
    pub identities_hold: bool,
    /// `((n - k)/n)^(1/2)`, lower bound for `|P_m f P_n|`.
    pub norm_bound: f64,
    /// `(k (n - k)/n)^(1/2)`, lower bound for `|P_m f P_n| / |f|_2`.
    pub ratio_bound: f64,
}

/// Builds the witness for `(k, n)` and verifies its identities in exact
/// rational arithmetic.
pub fn z2_witness(k: usize, n: usize) -> Result<Z2Witness> {
    if k < 1 || n <= k {
        return Err(Error::InvalidParameter(format!("need n > k >= 1, got k = {k}, n = {n}")));
    }
    let model = make_model(ModelKind::Zd(2))?;
    let m = n + k;
    let (ki, ni) = (k as i64, n as i64);
    let f_points: Vec<Element> = (1..=ki).map(|p| Element(vec![p as i32, (ki - p) as i32])).collect();
    let xi_points: Vec<Element> = (1..=ni).map(|q| Element(vec![q as i32, (ni - q) as i32])).collect();
    let f_value = rational(1, ki);
    let xi_sq = rational(1, ni);

    let f_norm1: Rational = f_points.iter().map(|_| f_value.clone()).sum();
    let f_norm2_sq: Rational = f_points.iter().map(|_| &f_value * &f_value).sum();
    let xi_norm2_sq: Rational = xi_points.iter().map(|_| xi_sq.clone()).sum();

    // Apply the exact block to sqrt(n) xi, which is the indicator of the
    // xi points, then divide the squares by n.
    let block = rational_block(&model, k, m, n, &f_points, &f_value)?;
    let en = model.sphere(n)?;
    let mut indicator = vec![Rational::zero(); en.len()];
    for q in &xi_points {
        indicator[en.position(q).unwrap()] = Rational::one();
    }
    let image = exact_apply(&block, &indicator)?;
    let em = model.sphere(m)?;
    let mut image_squared = vec![];
    let mut image_norm2_sq = Rational::zero();
    for (i, v) in image.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let sq = v * v * &xi_sq;
        image_norm2_sq += &sq;
        let x = &em.elements[i];
        if x.0[1] as i64 == m as i64 - x.0[0] as i64 {
            image_squared.push((x.0[0] as i64, sq));
        }
    }
    image_squared.sort_by_key(|e| e.0);
    let full_points: Vec<i64> = image_squared.iter().filter(|(_, s)| *s == xi_sq).map(|e| e.0).collect();
    let guaranteed = rational(ni - ki, ni);
    // Every r with k < r <= n + 1 collects all k summands.
    let expected_full: Vec<i64> = (ki + 1..=ni + 1).collect();
    let identities_hold = f_norm1.is_one()
        && f_norm2_sq == rational(1, ki)
        && xi_norm2_sq.is_one()
        && full_points == expected_full
        && image_norm2_sq >= guaranteed;
    let show = |r: &Rational| r.to_string();
    Ok(Z2Witness {
        k,
        n,
        m,
        f: f_points.iter().map(|x| (x.to_string(), show(&f_value))).collect(),
        xi_squared: xi_points.iter().map(|x| (x.to_string(), show(&xi_sq))).collect(),
        f_norm1: show(&f_norm1),
        f_norm2_squared: show(&f_norm2_sq),
        xi_norm2_squared: show(&xi_norm2_sq),
        image_squared: image_squared.iter().map(|(r, s)| (*r, show(s))).collect(),
        full_points,
        image_norm2_squared: show(&image_norm2_sq),
        guaranteed: show(&guaranteed),
        identities_hold,
        norm_bound: ((n - k) as f64 / n as f64).sqrt(),
        ratio_bound: (k as f64 * (n - k) as f64 / n as f64).sqrt(),
    })
}

/// `P_m f P_n` over the rationals for `f` constant on `points` of `E_k`.
fn rational_block(
    model: &GroupModel,
    k: usize,
    m: usize,
    n: usize,
    points: &[Element],
    value: &Rational,
) -> Result<RationalSparseMatrix> {
    let table = block_table(model, k, m, n)?;
    let ek = model.sphere(k)?;
    let mut on = vec![false; ek.len()];
    for p in points {
        on[ek.position(p).unwrap()] = true;
    }
    let mut entries: Vec<(usize, usize, Rational)> = vec![];
    for t in &table.terms {
        if on[t.y as usize] {
            entries.push((t.x as usize, t.z as usize, value.clone()));
        }
    }
    entries.sort_by_key(|e| (e.0, e.1));
    let mut merged: Vec<(usize, usize, Rational)> = vec![];
    for (i, j, v) in entries {
        match merged.last_mut() {
            Some(last) if (last.0, last.1) == (i, j) => last.2 += v,
            _ => merged.push((i, j, v)),
        }
    }
    RationalSparseMatrix::new(table.rows, table.cols, merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_case() {
        let w = z2_witness(1, 2).unwrap();
        assert!(w.identities_hold);
        assert_eq!(w.full_points, vec![2, 3]);
        assert_eq!(w.guaranteed, "1/2");
        assert!((w.ratio_bound - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn four_sixteen() {
        let w = z2_witness(4, 16).unwrap();
        assert!(w.identities_hold);
        assert_eq!(w.m, 20);
        assert_eq!(w.f_norm2_squared, "1/4");
        assert!((w.ratio_bound - 3f64.sqrt()).abs() < 1e-15);
        // At r = k only k - 1 summands survive.
        let at_k = w.image_squared.iter().find(|e| e.0 == 4).unwrap();
        assert_eq!(at_k.1, "9/256");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(z2_witness(0, 3).is_err());
        assert!(z2_witness(3, 3).is_err());
    }
}
