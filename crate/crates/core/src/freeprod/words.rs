use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::freeprod::ComponentAlgebra;
use crate::util::C64;

/// Largest basis accepted by [`FreeProduct::basis`].
pub const BASIS_BUDGET: usize = 20_000;

/// A non-unit basis element `b_idx` of component `comp` (0 or 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub comp: u8,
    pub idx: usize,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.comp == 0 { 'a' } else { 'b' }, self.idx)
    }
}

/// A reduced word: consecutive letters lie in different components.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord(pub Vec<Letter>);

impl FreeWord {
    pub fn one() -> Self {
        FreeWord(vec![])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0].comp != w[1].comp)
    }

    /// The adjoint; letters are self-adjoint, so this reverses the word.
    pub fn star(&self) -> Self {
        FreeWord(self.0.iter().rev().copied().collect())
    }

    /// Component of the first letter.
    pub fn first_comp(&self) -> Option<u8> {
        self.0.first().map(|l| l.comp)
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        FreeWord(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl Serialize for FreeWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A finitely supported element of the free product.
pub type FreeVector = BTreeMap<FreeWord, C64>;

/// The reduced free product of two component algebras, with length additive
/// over the letters of a reduced word.
#[derive(Clone, Debug)]
pub struct FreeProduct {
    comps: [ComponentAlgebra; 2],
}

impl FreeProduct {
    pub fn new(a1: ComponentAlgebra, a2: ComponentAlgebra) -> Self {
        FreeProduct { comps: [a1, a2] }
    }

    pub fn component(&self, i: u8) -> &ComponentAlgebra {
        &self.comps[i as usize]
    }

    pub fn letter_len(&self, l: Letter) -> usize {
        self.comps[l.comp as usize].len_of(l.idx)
    }

    pub fn word_len(&self, w: &FreeWord) -> usize {
        w.0.iter().map(|&l| self.letter_len(l)).sum()
    }

    /// Checks that `w` is reduced and uses valid non-unit letters.
    pub fn check_word(&self, w: &FreeWord) -> Result<()> {
        for l in &w.0 {
            if l.comp > 1 || l.idx == 0 || l.idx >= self.comps[l.comp as usize].dim() {
                return Err(Error::InvalidParameter(format!("letter {l} is not a basis letter")));
            }
        }
        if !w.is_reduced() {
            return Err(Error::InvalidParameter(format!("word {w} is not reduced")));
        }
        Ok(())
    }

    /// All reduced words of length `m`, sorted.
    pub fn basis(&self, m: usize) -> Result<Vec<FreeWord>> {
        let mut out = vec![];
        let mut stack = vec![];
        self.extend_words(m, None, &mut stack, &mut out)?;
        out.sort();
        Ok(out)
    }

    fn extend_words(&self, rest: usize, prev: Option<u8>, stack: &mut Vec<Letter>, out: &mut Vec<FreeWord>) -> Result<()> {
        if rest == 0 {
            if out.len() == BASIS_BUDGET {
                return Err(Error::Budget {
                    what: "free product basis".into(),
                    needed: BASIS_BUDGET + 1,
                    budget: BASIS_BUDGET,
                });
            }
            out.push(FreeWord(stack.clone()));
            return Ok(());
        }
        for comp in 0..2u8 {
            if prev == Some(comp) {
                continue;
            }
            let a = &self.comps[comp as usize];
            for idx in 1..a.dim() {
                let len = a.len_of(idx);
                if len <= rest {
                    stack.push(Letter { comp, idx });
                    self.extend_words(rest - len, Some(comp), stack, out)?;
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    /// The product `u v` of two reduced words, expanded in the word basis.
    ///
    /// At each junction the two facing letters either sit in different
    /// components and concatenate, or multiply inside their component: the
    /// non-unit part of the product becomes a single middle letter and the
    /// unit part, weighted by its trace coefficient, exposes the next pair.
    pub fn product(&self, u: &FreeWord, v: &FreeWord) -> FreeVector {
        let mut out = FreeVector::new();
        let (mut i, mut j) = (u.0.len(), 0);
        let mut acc = C64::new(1.0, 0.0);
        loop {
            if i == 0 || j == v.0.len() || u.0[i - 1].comp != v.0[j].comp {
                let w = FreeWord(u.0[..i].iter().chain(&v.0[j..]).copied().collect());
                *out.entry(w).or_default() += acc;
                break;
            }
            let (a, b) = (u.0[i - 1], v.0[j]);
            let alg = &self.comps[a.comp as usize];
            for k in 1..alg.dim() {
                let c = alg.c(a.idx, b.idx, k);
                if c != C64::new(0.0, 0.0) {
                    let mut w = u.0[..i - 1].to_vec();
                    w.push(Letter { comp: a.comp, idx: k });
                    w.extend_from_slice(&v.0[j + 1..]);
                    *out.entry(FreeWord(w)).or_default() += acc * c;
                }
            }
            let c0 = alg.c(a.idx, b.idx, 0);
            if c0 == C64::new(0.0, 0.0) {
                break;
            }
            acc *= c0;
            i -= 1;
            j += 1;
        }
        out.retain(|_, c| *c != C64::new(0.0, 0.0));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freeprod::component_from_cyclic;

    fn fp() -> FreeProduct {
        FreeProduct::new(component_from_cyclic(3).unwrap(), component_from_cyclic(4).unwrap())
    }

    fn add_into(out: &mut FreeVector, v: FreeVector, c: C64) {
        for (w, x) in v {
            *out.entry(w).or_default() += c * x;
        }
    }

    /// `w l` for a single letter, recursing on the trailing letter.
    fn times_letter(fp: &FreeProduct, w: &FreeWord, l: Letter) -> FreeVector {
        let mut out = FreeVector::new();
        match w.0.last() {
            Some(&last) if last.comp == l.comp => {
                let head = FreeWord(w.0[..w.0.len() - 1].to_vec());
                let alg = fp.component(l.comp);
                for k in 0..alg.dim() {
                    let c = alg.c(last.idx, l.idx, k);
                    if c == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut word = head.clone();
                    if k > 0 {
                        word.0.push(Letter { comp: l.comp, idx: k });
                    }
                    *out.entry(word).or_default() += c;
                }
            }
            _ => {
                let mut word = w.clone();
                word.0.push(l);
                out.insert(word, C64::new(1.0, 0.0));
            }
        }
        out
    }

    fn oracle(fp: &FreeProduct, u: &FreeWord, v: &FreeWord) -> FreeVector {
        let mut acc: FreeVector = [(u.clone(), C64::new(1.0, 0.0))].into();
        for &l in &v.0 {
            let mut next = FreeVector::new();
            for (w, c) in acc {
                add_into(&mut next, times_letter(fp, &w, l), c);
            }
            acc = next;
        }
        acc.retain(|_, c| c.norm() > 1e-15);
        acc
    }

    #[test]
    fn basis_counts() {
        let c2 = component_from_cyclic(2).unwrap();
        let d = FreeProduct::new(c2.clone(), c2);
        for m in 1..=6 {
            assert_eq!(d.basis(m).unwrap().len(), 2);
        }
        let f = fp();
        for m in 0..=4 {
            let b = f.basis(m).unwrap();
            assert!(b.iter().all(|w| f.word_len(w) == m && w.is_reduced()));
        }
        assert_eq!(f.basis(0).unwrap(), vec![FreeWord::one()]);
    }

    #[test]
    fn basis_budget() {
        let f = FreeProduct::new(component_from_cyclic(7).unwrap(), component_from_cyclic(7).unwrap());
        assert!(matches!(f.basis(14), Err(Error::Budget { .. })));
    }

    #[test]
    fn product_matches_letterwise_oracle() {
        let f = fp();
        let words: Vec<FreeWord> = (0..=3).flat_map(|m| f.basis(m).unwrap()).collect();
        for u in &words {
            for v in &words {
                let got = f.product(u, v);
                let want = oracle(&f, u, v);
                let keys: std::collections::BTreeSet<_> = got.keys().chain(want.keys()).collect();
                for w in keys {
                    let d = got.get(w).copied().unwrap_or_default() - want.get(w).copied().unwrap_or_default();
                    assert!(d.norm() < 1e-13, "{u} * {v} at {w}");
                }
            }
        }
    }

    #[test]
    fn product_with_unit_and_star() {
        let f = fp();
        for w in f.basis(3).unwrap() {
            assert_eq!(f.product(&w, &FreeWord::one()), [(w.clone(), C64::new(1.0, 0.0))].into());
            // The coefficient of 1 in w* w is the squared norm.
            assert!((f.product(&w.star(), &w)[&FreeWord::one()] - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }
}
