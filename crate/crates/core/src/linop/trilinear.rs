use crate::error::{Error, Result};
use crate::linop::SparseMatrix;
use crate::util::C64;

/// One nonzero structure coefficient: symbol coordinate `y` sends column `z`
/// to row `x` with weight `coeff`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub y: u32,
    pub z: u32,
    pub x: u32,
    pub coeff: C64,
}

/// A sparse trilinear form `(f, xi, eta) -> sum coeff w(f_y) xi_z conj(eta_x)`
/// where `w` is the identity, or complex conjugation when `conjugate_symbol`
/// is set.
///
/// The block of a symbol `f` is the matrix with entry `(x, z)` equal to
/// `sum_y w(f_y) coeff`.
#[derive(Clone, Debug)]
pub struct TriTable {
    pub symbol_dim: usize,
    pub rows: usize,
    pub cols: usize,
    pub conjugate_symbol: bool,
    pub terms: Vec<Term>,
}

impl TriTable {
    pub fn new(symbol_dim: usize, rows: usize, cols: usize, conjugate_symbol: bool, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.y as usize >= symbol_dim || t.x as usize >= rows || t.z as usize >= cols {
                return Err(Error::InvalidMatrix(format!(
                    "term ({},{},{}) outside {symbol_dim}x{rows}x{cols}",
                    t.y, t.z, t.x
                )));
            }
        }
        Ok(TriTable {
            symbol_dim,
            rows,
            cols,
            conjugate_symbol,
            terms,
        })
    }

    fn weight(&self, f: C64) -> C64 {
        if self.conjugate_symbol {
            f.conj()
        } else {
            f
        }
    }

    fn check_symbol(&self, f: &[C64]) -> Result<()> {
        if f.len() != self.symbol_dim {
            return Err(Error::DimensionMismatch {
                expected: self.symbol_dim,
                got: f.len(),
            });
        }
        Ok(())
    }

    pub fn block(&self, f: &[C64]) -> Result<SparseMatrix> {
        self.check_symbol(f)?;
        let entries = self
            .terms
            .iter()
            .filter(|t| f[t.y as usize] != C64::new(0.0, 0.0))
            .map(|t| (t.x as usize, t.z as usize, self.weight(f[t.y as usize]) * t.coeff))
            .collect();
        SparseMatrix::from_triplets(self.rows, self.cols, entries)
    }

    /// `g_y = sum coeff xi_z conj(eta_x)`, so that `Re <eta, block(f) xi>`
    /// equals `Re sum w(f_y) g_y`.
    pub fn symbol_gradient(&self, xi: &[C64], eta: &[C64]) -> Vec<C64> {
        let mut g = vec![C64::new(0.0, 0.0); self.symbol_dim];
        for t in &self.terms {
            g[t.y as usize] += t.coeff * xi[t.z as usize] * eta[t.x as usize].conj();
        }
        g
    }

    /// The unit symbol maximizing `Re sum w(f_y) g_y`, together with that
    /// maximum `|g|`.
    pub fn best_symbol(&self, g: &[C64]) -> (Vec<C64>, f64) {
        let n = crate::util::norm2(g);
        if n == 0.0 {
            return (vec![C64::new(0.0, 0.0); g.len()], 0.0);
        }
        let f = g
            .iter()
            .map(|v| if self.conjugate_symbol { *v / n } else { v.conj() / n })
            .collect();
        (f, n)
    }
}
