use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::{conv_block, FilteredVector};
use crate::freeprod::{
    check_triple, classify_cell, component_haagerup_constant, cell_form_holds, CellLabel, FreeProduct, FreeVector,
    FreeWord,
};
use crate::groups::{make_model, Element, ModelKind};
use crate::haagerup::{maximize_table, Strategy};
use crate::linop::{op_norm, NormOptions, SparseMatrix, Term, TriTable};
use crate::par;
use crate::util::{self, C64};

/// Slack added to the bound when comparing against a searched ratio.
pub const BOUND_SLACK: f64 = 1e-8;

/// The bases of `B_k`, `B_m`, `B_n` together with the trilinear table of
/// `(a, xi) -> P_m (a* xi)` for `a` supported on `B_k`.
#[derive(Clone, Debug)]
pub struct FreeBlockTable {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub symbols: Vec<FreeWord>,
    pub rows: Vec<FreeWord>,
    pub cols: Vec<FreeWord>,
    pub table: TriTable,
}

pub fn free_block_table(fp: &FreeProduct, k: usize, m: usize, n: usize) -> Result<FreeBlockTable> {
    let (symbols, rows, cols) = (fp.basis(k)?, fp.basis(m)?, fp.basis(n)?);
    let row_pos: HashMap<&FreeWord, u32> = rows.iter().enumerate().map(|(i, w)| (w, i as u32)).collect();
    let columns = par::map_range(cols.len(), |zi| {
        let z = &cols[zi];
        let mut terms = vec![];
        for (yi, y) in symbols.iter().enumerate() {
            for (x, coeff) in fp.product(&y.star(), z) {
                if let Some(&xi) = row_pos.get(&x) {
                    terms.push(Term { y: yi as u32, z: zi as u32, x: xi, coeff });
                }
            }
        }
        terms
    });
    let table = TriTable::new(symbols.len(), rows.len(), cols.len(), true, columns.concat())?;
    Ok(FreeBlockTable { k, m, n, symbols, rows, cols, table })
}

#[derive(Clone, Debug, Serialize)]
pub struct CellSummary {
    pub label: CellLabel,
    pub rows: usize,
    pub nnz: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellStructure {
    pub cells: Vec<CellSummary>,
    /// Rows of `B_m` assigned to exactly one cell.
    pub rows_covered: usize,
    pub rows_total: usize,
    /// Every nonzero term has the shape predicted for its row's cell.
    pub cell_forms_hold: bool,
    pub violations: Vec<String>,
}

/// Partitions the rows of the table into cells and checks the shape of every
/// contributing pair `(y, z)`.
pub fn cell_structure(fp: &FreeProduct, t: &FreeBlockTable) -> Result<CellStructure> {
    check_triple(t.k, t.m, t.n)?;
    let labels = t
        .rows
        .iter()
        .map(|x| classify_cell(fp, x, t.k, t.n))
        .collect::<Result<Vec<_>>>()?;
    let mut cells: BTreeMap<&CellLabel, CellSummary> = BTreeMap::new();
    for l in &labels {
        cells
            .entry(l)
            .or_insert_with(|| CellSummary { label: l.clone(), rows: 0, nnz: 0 })
            .rows += 1;
    }
    let mut violations = vec![];
    for term in &t.table.terms {
        let (x, y, z) = (&t.rows[term.x as usize], &t.symbols[term.y as usize], &t.cols[term.z as usize]);
        let label = &labels[term.x as usize];
        cells.get_mut(label).expect("labelled").nnz += 1;
        if !cell_form_holds(label, x, y, z) {
            violations.push(format!("{label}: x={x} y={y} z={z}"));
        }
    }
    let rows_covered = cells.values().map(|c| c.rows).sum();
    Ok(CellStructure {
        cells: cells.into_values().collect(),
        rows_covered,
        rows_total: t.rows.len(),
        cell_forms_hold: violations.is_empty(),
        violations,
    })
}

fn homogeneous_degree(fp: &FreeProduct, a: &FreeVector) -> Result<usize> {
    let mut degrees = a.iter().filter(|(_, c)| **c != C64::new(0.0, 0.0)).map(|(w, _)| fp.word_len(w));
    let k = degrees.next().unwrap_or(0);
    if degrees.any(|d| d != k) {
        return Err(Error::InvalidParameter("free block needs a homogeneous element".into()));
    }
    Ok(k)
}

/// The matrix of `xi -> P_m (a* xi)` from `B_n` to `B_m`, with `a`
/// homogeneous.
pub fn fp_block(fp: &FreeProduct, a: &FreeVector, m: usize, n: usize) -> Result<SparseMatrix> {
    for w in a.keys() {
        fp.check_word(w)?;
    }
    let k = homogeneous_degree(fp, a)?;
    let t = free_block_table(fp, k, m, n)?;
    let coeffs: Vec<C64> = t.symbols.iter().map(|w| a.get(w).copied().unwrap_or_default()).collect();
    t.table.block(&coeffs)
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentBound {
    pub algebra: String,
    pub value: f64,
    pub searched: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FreeProductCheck {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub ratio: f64,
    pub witness: Vec<(FreeWord, [f64; 2])>,
    pub constants: [ComponentBound; 2],
    pub bound: f64,
    pub holds: bool,
    pub cells: Option<CellStructure>,
}

/// The constant of each component: the declared one when present, otherwise
/// a searched lower bound.
pub fn component_bounds(fp: &FreeProduct, strategy: Strategy, opts: NormOptions) -> Result<[ComponentBound; 2]> {
    let one = |i: u8| -> Result<ComponentBound> {
        let a = fp.component(i);
        Ok(match a.constant() {
            Some(c) => ComponentBound { algebra: a.name().into(), value: c.value, searched: false },
            None => ComponentBound {
                algebra: a.name().into(),
                value: component_haagerup_constant(a, strategy, opts)?.value,
                searched: true,
            },
        })
    };
    Ok([one(0)?, one(1)?])
}

/// Searches for the largest `|P_m a* P_n| / |a|_2` over `a` of length `k`
/// and compares it with `sqrt 5 max(C1, C2)`.
pub fn free_product_check(
    fp: &FreeProduct,
    k: usize,
    m: usize,
    n: usize,
    constants: &[ComponentBound; 2],
    strategy: Strategy,
    opts: NormOptions,
) -> Result<FreeProductCheck> {
    let t = free_block_table(fp, k, m, n)?;
    let r = maximize_table(&t.table, strategy, opts)?;
    let bound = 5f64.sqrt() * constants[0].value.max(constants[1].value);
    let cells = if check_triple(k, m, n).is_ok() { Some(cell_structure(fp, &t)?) } else { None };
    Ok(FreeProductCheck {
        k,
        m,
        n,
        ratio: r.ratio,
        witness: t.symbols.iter().cloned().zip(r.witness.iter().map(|c| [c.re, c.im])).collect(),
        constants: constants.clone(),
        bound,
        holds: r.ratio <= bound + BOUND_SLACK,
        cells,
    })
}

/// `Z/2 * Z/2` as a free product: the letter of the first component is the
/// generator `a`, that of the second is `b`.
pub fn dihedral_free_product() -> Result<FreeProduct> {
    let c2 = crate::freeprod::component_from_cyclic(2)?;
    Ok(FreeProduct::new(c2.clone(), c2))
}

/// The group element named by a reduced word of the dihedral free product.
pub fn word_to_element(w: &FreeWord) -> Element {
    Element(w.letters().iter().map(|l| if l.comp == 0 { 1 } else { -1 }).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossValidation {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub entries: usize,
    pub max_entry_diff: f64,
    pub norm_free: f64,
    pub norm_group: f64,
    pub agree: bool,
}

pub const ENTRY_TOL: f64 = 1e-12;
pub const NORM_TOL: f64 = 1e-9;

/// Builds one block twice for the infinite dihedral group, once through the
/// free-product word calculus and once through group convolution by the
/// adjoint symbol, and compares them.
pub fn cross_validate_group(k: usize, m: usize, n: usize, seed: u64, opts: NormOptions) -> Result<CrossValidation> {
    let fp = dihedral_free_product()?;
    let model = make_model(ModelKind::DihedralInfinity)?;
    let t = free_block_table(&fp, k, m, n)?;
    let mut rng = util::rng(seed, 0);
    let coeffs = util::gaussian_vec(&mut rng, t.symbols.len());
    let free = t.table.block(&coeffs)?;

    let f = FilteredVector::from_terms(
        &model,
        &t.symbols.iter().map(word_to_element).zip(coeffs.iter().copied()).collect::<Vec<_>>(),
    )?;
    let fstar = f.adjoint(&model)?;
    let group = if fstar.is_zero() {
        SparseMatrix::zeros(model.sphere(m)?.len(), model.sphere(n)?.len())
    } else {
        conv_block(&model, &fstar, m, n)?
    };
    let (em, en) = (model.sphere(m)?, model.sphere(n)?);
    if em.len() != t.rows.len() || en.len() != t.cols.len() {
        return Err(Error::DimensionMismatch { expected: em.len(), got: t.rows.len() });
    }
    let row_of: Vec<usize> = t.rows.iter().map(|w| em.position(&word_to_element(w)).expect("bijection")).collect();
    let col_of: Vec<usize> = t.cols.iter().map(|w| en.position(&word_to_element(w)).expect("bijection")).collect();
    let relabelled = SparseMatrix::from_triplets(
        group.rows(),
        group.cols(),
        free.triplets().map(|(i, j, v)| (row_of[i], col_of[j], v)).collect(),
    )?;
    let max_entry_diff = relabelled.max_abs_diff(&group)?;
    let norm_free = op_norm(&free, opts)?.value;
    let norm_group = op_norm(&group, opts)?.value;
    Ok(CrossValidation {
        k,
        m,
        n,
        entries: group.nnz(),
        max_entry_diff,
        norm_free,
        norm_group,
        agree: max_entry_diff <= ENTRY_TOL && (norm_free - norm_group).abs() <= NORM_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freeprod::component_from_cyclic;

    #[test]
    fn cells_partition_and_forms_hold() {
        let fp = FreeProduct::new(component_from_cyclic(3).unwrap(), component_from_cyclic(4).unwrap());
        for k in 1..=4 {
            for m in 1..=4 {
                for n in 1..=4 {
                    if check_triple(k, m, n).is_err() {
                        continue;
                    }
                    let t = free_block_table(&fp, k, m, n).unwrap();
                    let c = cell_structure(&fp, &t).unwrap();
                    assert_eq!(c.rows_covered, c.rows_total);
                    assert!(c.cell_forms_hold, "({k},{m},{n}): {:?}", &c.violations[..c.violations.len().min(3)]);
                }
            }
        }
    }

    #[test]
    fn dihedral_cross_validation() {
        for k in 0..=4 {
            for m in 0..=4 {
                for n in 0..=4 {
                    let r = cross_validate_group(k, m, n, 11, NormOptions::default()).unwrap();
                    assert!(r.agree, "{r:?}");
                }
            }
        }
    }

    #[test]
    fn fp_block_rejects_mixed_degrees() {
        let fp = dihedral_free_product().unwrap();
        let mut a = FreeVector::new();
        for w in fp.basis(1).unwrap().into_iter().chain(fp.basis(2).unwrap()) {
            a.insert(w, C64::new(1.0, 0.0));
        }
        assert!(fp_block(&fp, &a, 1, 2).is_err());
    }

    #[test]
    fn small_free_product_check() {
        let fp = FreeProduct::new(component_from_cyclic(3).unwrap(), component_from_cyclic(2).unwrap());
        let strategy = Strategy::Combined { trials: 20, starts: 6, iters: 20, seed: 5 };
        let c = component_bounds(&fp, strategy, NormOptions::default()).unwrap();
        let r = free_product_check(&fp, 2, 2, 2, &c, strategy, NormOptions::default()).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(r.cells.unwrap().cell_forms_hold);
    }
}
