use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haagerup::{maximize_table, Strategy};
use crate::linop::{NormOptions, Term, TriTable};
use crate::util::C64;

/// Largest dimension accepted by the brute-force constant search.
pub const MAX_SEARCH_DIM: usize = 12;

/// Tolerance for the structural identities checked at construction.
const STRUCT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Lower bound from a multistart search over all grade triples.
    Searched,
    /// Given by the caller.
    Supplied,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeclaredConstant {
    pub value: f64,
    pub provenance: Provenance,
}

/// A finite-dimensional filtered *-algebra with a faithful trace, given by
/// a self-adjoint orthonormal basis `b_0 = 1, b_1, ..., b_{d-1}` and
/// structure constants `b_i b_j = sum_k c[i][j][k] b_k`.
///
/// Construction verifies the unit, trace orthonormality, compatibility of
/// the product with the involution, the grading and associativity.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentAlgebra {
    name: String,
    lengths: Vec<usize>,
    tensor: Vec<C64>,
    constant: Option<DeclaredConstant>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraJson {
    name: String,
    dimension: usize,
    lengths: Vec<usize>,
    /// `structure[i][j][k]` as `[re, im]`.
    structure: Vec<Vec<Vec<[f64; 2]>>>,
    constant: Option<DeclaredConstant>,
}

impl ComponentAlgebra {
    pub fn new(name: impl Into<String>, lengths: Vec<usize>, tensor: Vec<C64>) -> Result<Self> {
        let a = ComponentAlgebra {
            name: name.into(),
            lengths,
            tensor,
            constant: None,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn with_constant(mut self, value: f64, provenance: Provenance) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidParameter(format!("constant must be positive, got {value}")));
        }
        self.constant = Some(DeclaredConstant { value, provenance });
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn len_of(&self, i: usize) -> usize {
        self.lengths[i]
    }

    pub fn max_grade(&self) -> usize {
        self.lengths.iter().copied().max().unwrap_or(0)
    }

    pub fn constant(&self) -> Option<DeclaredConstant> {
        self.constant
    }

    /// `c[i][j][k]`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> C64 {
        let d = self.dim();
        self.tensor[(i * d + j) * d + k]
    }

    /// Basis indices of grade `g`.
    pub fn grade(&self, g: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.lengths[i] == g).collect()
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim();
        let bad = |msg: String| Err(Error::InvalidAlgebra(format!("{}: {msg}", self.name)));
        if d == 0 {
            return bad("dimension must be at least 1".into());
        }
        if self.tensor.len() != d * d * d {
            return bad(format!("structure tensor has {} entries, expected {}", self.tensor.len(), d * d * d));
        }
        if self.lengths[0] != 0 {
            return bad("b_0 must have length 0".into());
        }
        if let Some(i) = (1..d).find(|&i| self.lengths[i] == 0) {
            return bad(format!("b_{i} has length 0"));
        }
        let near = |a: C64, b: C64| (a - b).norm() <= STRUCT_TOL;
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                let e = if i == j { one } else { zero };
                if !near(self.c(0, i, j), e) || !near(self.c(i, 0, j), e) {
                    return bad(format!("b_0 is not a unit at ({i},{j})"));
                }
                if !near(self.c(i, j, 0), e) {
                    return bad(format!("trace of b_{i} b_{j} is {}, basis not orthonormal", self.c(i, j, 0)));
                }
                if !near(self.c(i, j, 0), self.c(j, i, 0)) {
                    return bad(format!("trace not symmetric at ({i},{j})"));
                }
                for k in 0..d {
                    if !near(self.c(i, j, k).conj(), self.c(j, i, k)) {
                        return bad(format!("(b_{i} b_{j})* != b_{j} b_{i} at coordinate {k}"));
                    }
                    if self.lengths[k] > self.lengths[i] + self.lengths[j] && self.c(i, j, k) != zero {
                        return bad(format!("b_{i} b_{j} has a component on b_{k} beyond its grade"));
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    for r in 0..d {
                        let left: C64 = (0..d).map(|k| self.c(i, j, k) * self.c(k, l, r)).sum();
                        let right: C64 = (0..d).map(|k| self.c(j, l, k) * self.c(i, k, r)).sum();
                        if (left - right).norm() > 1e-10 {
                            return bad(format!("not associative at (b_{i} b_{j}) b_{l}, coordinate {r}"));
                        }
                    }
                }
            }
        }
        // Gram matrix of the trace form; orthonormality makes it the
        // identity, which is positive definite.
        let gram_ok = (0..d).all(|i| (0..d).all(|j| near(self.c(i, j, 0), if i == j { one } else { zero })));
        if !gram_ok {
            return bad("trace is not faithful".into());
        }
        Ok(())
    }

    /// Coefficients of `b_i b_j`.
    pub fn product(&self, i: usize, j: usize) -> Vec<C64> {
        (0..self.dim()).map(|k| self.c(i, j, k)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let d = self.dim();
        let structure = (0..d)
            .map(|i| (0..d).map(|j| (0..d).map(|k| [self.c(i, j, k).re, self.c(i, j, k).im]).collect()).collect())
            .collect();
        Ok(serde_json::to_string_pretty(&AlgebraJson {
            name: self.name.clone(),
            dimension: d,
            lengths: self.lengths.clone(),
            structure,
            constant: self.constant,
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: AlgebraJson = serde_json::from_str(text)?;
        if j.lengths.len() != j.dimension || j.structure.len() != j.dimension {
            return Err(Error::InvalidAlgebra("dimension does not match lengths or structure".into()));
        }
        let mut tensor = Vec::with_capacity(j.dimension.pow(3));
        for row in &j.structure {
            if row.len() != j.dimension || row.iter().any(|c| c.len() != j.dimension) {
                return Err(Error::InvalidAlgebra("ragged structure tensor".into()));
            }
            tensor.extend(row.iter().flatten().map(|[re, im]| C64::new(*re, *im)));
        }
        let a = ComponentAlgebra::new(j.name, j.lengths, tensor)?;
        match j.constant {
            Some(c) => a.with_constant(c.value, c.provenance),
            None => Ok(a),
        }
    }
}

/// The one-dimensional algebra `C`.
pub fn trivial_component() -> ComponentAlgebra {
    ComponentAlgebra::new("C", vec![0], vec![C64::new(1.0, 0.0)]).expect("valid")
}

/// The group algebra of `Z/p` graded by word length in a generator `u`,
/// with basis `1`, then for each `a < p/2` the pair `(u^a + u^-a)/sqrt 2`,
/// `(u^a - u^-a)/(i sqrt 2)`, then `u^(p/2)` when `p` is even.
pub fn component_from_cyclic(p: usize) -> Result<ComponentAlgebra> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("cyclic order must be at least 2, got {p}")));
    }
    let zero = C64::new(0.0, 0.0);
    let mut basis: Vec<Vec<C64>> = vec![];
    let mut lengths = vec![];
    let mut e0 = vec![zero; p];
    e0[0] = C64::new(1.0, 0.0);
    basis.push(e0);
    lengths.push(0);
    for a in 1..p.div_ceil(2) {
        let mut cos = vec![zero; p];
        cos[a] = C64::new(1.0 / SQRT_2, 0.0);
        cos[p - a] = C64::new(1.0 / SQRT_2, 0.0);
        let mut sin = vec![zero; p];
        sin[a] = C64::new(0.0, -1.0 / SQRT_2);
        sin[p - a] = C64::new(0.0, 1.0 / SQRT_2);
        basis.push(cos);
        basis.push(sin);
        lengths.extend([a, a]);
    }
    if p.is_multiple_of(2) {
        let mut mid = vec![zero; p];
        mid[p / 2] = C64::new(1.0, 0.0);
        basis.push(mid);
        lengths.push(p / 2);
    }
    let d = basis.len();
    let mut tensor = vec![zero; d * d * d];
    for i in 0..d {
        for j in 0..d {
            let mut prod = vec![zero; p];
            for (g, x) in basis[i].iter().enumerate() {
                for (h, y) in basis[j].iter().enumerate() {
                    prod[(g + h) % p] += x * y;
                }
            }
            for k in 0..d {
                let v: C64 = basis[k].iter().zip(&prod).map(|(b, w)| b.conj() * w).sum();
                // Snap roundoff so that exact zeros stay exact.
                let v = C64::new(snap(v.re), snap(v.im));
                tensor[(i * d + j) * d + k] = v;
            }
        }
    }
    ComponentAlgebra::new(format!("Z/{p}"), lengths, tensor)
}

fn snap(x: f64) -> f64 {
    if x.abs() < 1e-14 {
        0.0
    } else {
        x
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GradeRatio {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentConstant {
    pub algebra: String,
    /// Largest ratio over all grade triples; a certified lower bound for the
    /// optimal constant.
    pub value: f64,
    pub triples: Vec<GradeRatio>,
    /// Unit element of grade `witness_grade` attaining `value`.
    pub witness: Vec<[f64; 2]>,
    pub witness_grade: usize,
}

/// The trilinear table of `P_m (b *) P_n` for `b` of grade `k`.
pub fn component_table(a: &ComponentAlgebra, k: usize, m: usize, n: usize) -> Result<TriTable> {
    let (gk, gm, gn) = (a.grade(k), a.grade(m), a.grade(n));
    let mut terms = vec![];
    for (yi, &y) in gk.iter().enumerate() {
        for (zi, &z) in gn.iter().enumerate() {
            for (xi, &x) in gm.iter().enumerate() {
                let c = a.c(y, z, x);
                if c != C64::new(0.0, 0.0) {
                    terms.push(Term {
                        y: yi as u32,
                        z: zi as u32,
                        x: xi as u32,
                        coeff: c,
                    });
                }
            }
        }
    }
    TriTable::new(gk.len(), gm.len(), gn.len(), false, terms)
}

/// Searches every grade triple for the largest `|P_m b P_n| / |b|_2`.
pub fn component_haagerup_constant(a: &ComponentAlgebra, strategy: Strategy, opts: NormOptions) -> Result<ComponentConstant> {
    if a.dim() > MAX_SEARCH_DIM {
        return Err(Error::Budget {
            what: format!("constant search for {}", a.name()),
            needed: a.dim(),
            budget: MAX_SEARCH_DIM,
        });
    }
    let top = a.max_grade();
    let mut triples = vec![];
    let mut best: Option<(f64, usize, Vec<C64>)> = None;
    for k in 0..=top {
        for m in 0..=top {
            for n in 0..=top {
                let table = component_table(a, k, m, n)?;
                let r = maximize_table(&table, strategy, opts)?;
                triples.push(GradeRatio { k, m, n, ratio: r.ratio });
                if best.as_ref().is_none_or(|b| r.ratio > b.0) {
                    best = Some((r.ratio, k, r.witness));
                }
            }
        }
    }
    let (value, witness_grade, witness) = best.expect("grade 0 exists");
    Ok(ComponentConstant {
        algebra: a.name().to_string(),
        value,
        triples,
        witness: witness.iter().map(|z| [z.re, z.im]).collect(),
        witness_grade,
    })
}
