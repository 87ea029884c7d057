use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::par;
use crate::util::C64;

/// Rows above which matrix-vector products are split across workers.
const PAR_ROWS: usize = 4096;

/// A finite complex matrix with explicitly stored nonzero entries.
///
/// Entries are kept in row-major order with no duplicate coordinates and no
/// explicit zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseMatrix {
    /// Builds a matrix from coordinate entries, rejecting out-of-range
    /// indices, duplicate coordinates and explicit zeros.
    pub fn new(rows: usize, cols: usize, mut entries: Vec<(usize, usize, C64)>) -> Result<Self> {
        for &(i, j, v) in &entries {
            if i >= rows || j >= cols {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({i},{j}) outside {rows}x{cols}"
                )));
            }
            if v == C64::new(0.0, 0.0) {
                return Err(Error::InvalidMatrix(format!("explicit zero at ({i},{j})")));
            }
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));
        if let Some(w) = entries.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::InvalidMatrix(format!(
                "duplicate coordinate ({},{})",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::from_sorted(rows, cols, entries))
    }

    /// Builds a matrix from coordinate entries, summing duplicates and
    /// dropping entries that are exactly zero.
    pub fn from_triplets(rows: usize, cols: usize, mut entries: Vec<(usize, usize, C64)>) -> Result<Self> {
        if let Some(&(i, j, _)) = entries.iter().find(|&&(i, j, _)| i >= rows || j >= cols) {
            return Err(Error::InvalidMatrix(format!("entry ({i},{j}) outside {rows}x{cols}")));
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        merged.retain(|e| e.2 != C64::new(0.0, 0.0));
        Ok(Self::from_sorted(rows, cols, merged))
    }

    fn from_sorted(rows: usize, cols: usize, entries: Vec<(usize, usize, C64)>) -> Self {
        let mut row_ptr = vec![0; rows + 1];
        for &(i, _, _) in &entries {
            row_ptr[i + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let (col_idx, vals) = entries.into_iter().map(|(_, j, v)| (j, v)).unzip();
        SparseMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            vals,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_sorted(rows, cols, vec![])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_sorted(n, n, (0..n).map(|i| (i, i, C64::new(1.0, 0.0))).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    /// Coordinate entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (i, self.col_idx[p], self.vals[p]))
        })
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (self.col_idx[p], self.vals[p]))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let span = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        match span.binary_search(&j) {
            Ok(p) => self.vals[self.row_ptr[i] + p],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok(self.matvec_unchecked(x))
    }

    pub(crate) fn matvec_unchecked(&self, x: &[C64]) -> Vec<C64> {
        let row = |i: usize| -> C64 {
            (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(|p| self.vals[p] * x[self.col_idx[p]])
                .sum()
        };
        if self.rows >= PAR_ROWS {
            par::map_range(self.rows, row)
        } else {
            (0..self.rows).map(row).collect()
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> SparseMatrix {
        let entries = self.triplets().map(|(i, j, v)| (j, i, v.conj())).collect::<Vec<_>>();
        let mut entries = entries;
        entries.sort_by_key(|&(i, j, _)| (i, j));
        Self::from_sorted(self.cols, self.rows, entries)
    }

    /// Applies `f(row, col, value)` to every stored entry, dropping results
    /// that are exactly zero.
    pub fn map_entries(&self, f: impl Fn(usize, usize, C64) -> C64) -> SparseMatrix {
        let entries = self
            .triplets()
            .map(|(i, j, v)| (i, j, f(i, j, v)))
            .filter(|e| e.2 != C64::new(0.0, 0.0))
            .collect();
        Self::from_sorted(self.rows, self.cols, entries)
    }

    pub fn scale(&self, c: C64) -> SparseMatrix {
        self.map_entries(|_, _, v| v * c)
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.check_same_shape(other)?;
        let entries = self.triplets().chain(other.triplets()).collect();
        Self::from_triplets(self.rows, self.cols, entries)
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    fn check_same_shape(&self, other: &SparseMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(())
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &SparseMatrix) -> Result<f64> {
        self.check_same_shape(other)?;
        let mut acc: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for (i, j, v) in self.triplets() {
            *acc.entry((i, j)).or_default() += v;
        }
        for (i, j, v) in other.triplets() {
            *acc.entry((i, j)).or_default() -= v;
        }
        Ok(acc.values().map(|v| v.norm()).fold(0.0, f64::max))
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let mut sums = vec![0.0; self.cols];
        for (_, j, v) in self.triplets() {
            sums[j] += v.norm();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `sqrt(|A|_1 |A|_inf)`, an upper bound for the operator norm.
    pub fn norm_upper_bound(&self) -> f64 {
        (self.norm_one() * self.norm_inf()).sqrt()
    }

    pub fn frobenius(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// The rectangular block with the given row and column ranges.
    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> SparseMatrix {
        let entries = rows
            .clone()
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .filter(|(_, j, _)| cols.contains(j))
            .map(|(i, j, v)| (i - rows.start, j - cols.start, v))
            .collect();
        Self::from_sorted(rows.len(), cols.len(), entries)
    }

    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let mut out = vec![vec![C64::new(0.0, 0.0); self.cols]; self.rows];
        for (i, j, v) in self.triplets() {
            out[i][j] = v;
        }
        out
    }
}
