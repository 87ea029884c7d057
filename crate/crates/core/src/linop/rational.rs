use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Sparse matrix over the rationals, used where exact answers are required.
/// Coordinates are in range, distinct and carry nonzero values.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Rational)>,
}

impl RationalSparseMatrix {
    pub fn new(rows: usize, cols: usize, mut entries: Vec<(usize, usize, Rational)>) -> Result<Self> {
        for (i, j, v) in &entries {
            if *i >= rows || *j >= cols {
                return Err(Error::InvalidMatrix(format!("entry ({i},{j}) outside {rows}x{cols}")));
            }
            if v.is_zero() {
                return Err(Error::InvalidMatrix(format!("explicit zero at ({i},{j})")));
            }
        }
        entries.sort_by_key(|e| (e.0, e.1));
        if entries.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::InvalidMatrix("duplicate coordinate".into()));
        }
        Ok(RationalSparseMatrix { rows, cols, entries })
    }

    pub fn identity(n: usize) -> Self {
        let one = rational(1, 1);
        RationalSparseMatrix {
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i, one.clone())).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, Rational)] {
        &self.entries
    }
}

/// Exact product `A v`.
pub fn exact_apply(a: &RationalSparseMatrix, v: &[Rational]) -> Result<Vec<Rational>> {
    if v.len() != a.cols {
        return Err(Error::DimensionMismatch {
            expected: a.cols,
            got: v.len(),
        });
    }
    let mut out = vec![Rational::zero(); a.rows];
    for (i, j, x) in &a.entries {
        out[*i] += x * &v[*j];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_neutral() {
        let v = vec![rational(1, 2), rational(-3, 7), rational(0, 1)];
        assert_eq!(exact_apply(&RationalSparseMatrix::identity(3), &v).unwrap(), v);
    }

    #[test]
    fn third_times_three() {
        let a = RationalSparseMatrix::new(1, 1, vec![(0, 0, rational(1, 3))]).unwrap();
        assert_eq!(exact_apply(&a, &[rational(3, 1)]).unwrap(), vec![rational(1, 1)]);
    }

    #[test]
    fn rejects_mismatch_and_bad_entries() {
        let a = RationalSparseMatrix::identity(2);
        assert!(exact_apply(&a, &[rational(1, 1)]).is_err());
        assert!(RationalSparseMatrix::new(1, 1, vec![(0, 0, rational(0, 1))]).is_err());
        assert!(RationalSparseMatrix::new(1, 1, vec![(0, 1, rational(1, 1))]).is_err());
    }
}
