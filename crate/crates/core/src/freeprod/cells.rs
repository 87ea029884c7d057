use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::freeprod::{FreeProduct, FreeWord, Letter};

/// The cell of `B_m` containing a row `x` of the block `P_m (y* .) P_n` with
/// `y` of length `k`. All lengths are doubled so that the split point
/// `k - q`, `q = (k + n - m) / 2`, stays an integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind")]
pub enum CellLabel {
    /// `x = s* r t` with `r` straddling the split point.
    P { s: FreeWord, t: FreeWord },
    /// `x = s* r1 r2 t` with `s* r1` ending exactly at the split point.
    Q { s: FreeWord, t: FreeWord },
    /// `m + k = n`: `x = r t`.
    PT { t: FreeWord },
    /// `m + n = k`: `x = s* r`.
    PS { s: FreeWord },
}

impl fmt::Display for CellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellLabel::P { s, t } => write!(f, "P({s},{t})"),
            CellLabel::Q { s, t } => write!(f, "Q({s},{t})"),
            CellLabel::PT { t } => write!(f, "PT({t})"),
            CellLabel::PS { s } => write!(f, "PS({s})"),
        }
    }
}

fn word(letters: &[Letter]) -> FreeWord {
    FreeWord(letters.to_vec())
}

fn reversed(letters: &[Letter]) -> FreeWord {
    FreeWord(letters.iter().rev().copied().collect())
}

/// Checks `k, m, n >= 1` and `|m - n| <= k <= m + n`.
pub fn check_triple(k: usize, m: usize, n: usize) -> Result<()> {
    if k == 0 || m == 0 || n == 0 {
        return Err(Error::Constraint(format!("cells need k, m, n >= 1, got ({k},{m},{n})")));
    }
    if m.abs_diff(n) > k || k > m + n {
        return Err(Error::Constraint(format!("need |m-n| <= k <= m+n, got ({k},{m},{n})")));
    }
    Ok(())
}

/// Assigns `x in B_m` to its cell for the pair `(k, n)`.
pub fn classify_cell(fp: &FreeProduct, x: &FreeWord, k: usize, n: usize) -> Result<CellLabel> {
    let m = fp.word_len(x);
    check_triple(k, m, n)?;
    let l = x.letters();
    if m + k == n {
        return Ok(CellLabel::PT { t: word(&l[1..]) });
    }
    if m + n == k {
        return Ok(CellLabel::PS { s: reversed(&l[..l.len() - 1]) });
    }
    // 2(k - q) = k + m - n, strictly between 0 and 2m here.
    let split = k + m - n;
    let mut prefix = 0;
    for j in 0..l.len() {
        let next = prefix + 2 * fp.letter_len(l[j]);
        if prefix < split && split < next {
            return Ok(CellLabel::P { s: reversed(&l[..j]), t: word(&l[j + 1..]) });
        }
        if next == split {
            return Ok(CellLabel::Q { s: reversed(&l[..j]), t: word(&l[j + 2..]) });
        }
        prefix = next;
    }
    unreachable!("split point lies inside the word")
}

/// The two stems `y' = w u`, `z' = w v` left after removing the outer parts:
/// they share `w` and differ by at most one letter each, lying in a common
/// component when both are present. Returns that component.
fn stem_component(y: &[Letter], z: &[Letter]) -> Option<u8> {
    match y.len() as isize - z.len() as isize {
        0 if !y.is_empty() => {
            let (w, u, v) = (&y[..y.len() - 1], y[y.len() - 1], z[z.len() - 1]);
            (w == &z[..z.len() - 1] && u.comp == v.comp).then_some(u.comp)
        }
        1 => (&y[..z.len()] == z).then(|| y[z.len()].comp),
        -1 => (&z[..y.len()] == y).then(|| z[y.len()].comp),
        _ => None,
    }
}

fn strip_suffix<'a>(w: &'a [Letter], suffix: &[Letter]) -> Option<&'a [Letter]> {
    w.len().checked_sub(suffix.len()).filter(|&c| &w[c..] == suffix).map(|c| &w[..c])
}

/// Whether `x` receiving a contribution from `y* z` has the shape predicted
/// for its cell: `y = w u s`, `z = w v t` with the middle letter of `x`
/// coming from `u v`.
pub fn cell_form_holds(label: &CellLabel, x: &FreeWord, y: &FreeWord, z: &FreeWord) -> bool {
    let (xl, yl, zl) = (x.letters(), y.letters(), z.letters());
    let stem = |ys: Option<&[Letter]>, zs: Option<&[Letter]>, r: Letter| match (ys, zs) {
        (Some(ys), Some(zs)) => stem_component(ys, zs) == Some(r.comp),
        _ => false,
    };
    match label {
        CellLabel::P { s, t } => stem(strip_suffix(yl, &s.0), strip_suffix(zl, &t.0), xl[s.0.len()]),
        CellLabel::Q { s, t } => {
            let (r1, r2) = (xl[s.0.len()], xl[s.0.len() + 1]);
            let r2t: Vec<Letter> = std::iter::once(r2).chain(t.0.iter().copied()).collect();
            let r1s: Vec<Letter> = std::iter::once(r1).chain(s.0.iter().copied()).collect();
            stem(strip_suffix(yl, &s.0), strip_suffix(zl, &r2t), r1)
                || stem(strip_suffix(yl, &r1s), strip_suffix(zl, &t.0), r2)
        }
        CellLabel::PT { t } => stem(Some(yl), strip_suffix(zl, &t.0), xl[0]),
        CellLabel::PS { s } => stem(strip_suffix(yl, &s.0), Some(zl), xl[xl.len() - 1]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freeprod::component_from_cyclic;

    fn fp() -> FreeProduct {
        FreeProduct::new(component_from_cyclic(3).unwrap(), component_from_cyclic(2).unwrap())
    }

    #[test]
    fn p_and_q_cells() {
        let fp = fp();
        let x = fp.basis(3).unwrap().into_iter().find(|w| w.0.len() == 3).unwrap();
        // split 2(k-q) = k + m - n = 3 falls inside the second letter.
        assert!(matches!(classify_cell(&fp, &x, 2, 2).unwrap(), CellLabel::P { .. }));
        // split = 2 lands on the end of the first letter.
        assert!(matches!(classify_cell(&fp, &x, 1, 2).unwrap(), CellLabel::Q { .. }));
        assert!(matches!(classify_cell(&fp, &x, 1, 4).unwrap(), CellLabel::PT { .. }));
        assert!(matches!(classify_cell(&fp, &x, 4, 1).unwrap(), CellLabel::PS { .. }));
        assert!(classify_cell(&fp, &x, 1, 1).is_err());
    }

    #[test]
    fn stems() {
        let a = |i| Letter { comp: 0, idx: i };
        let b = |i| Letter { comp: 1, idx: i };
        assert_eq!(stem_component(&[b(1), a(1)], &[b(1), a(2)]), Some(0));
        assert_eq!(stem_component(&[b(1)], &[b(1), a(2)]), Some(0));
        assert_eq!(stem_component(&[b(1), a(1)], &[a(2)]), None);
        assert_eq!(stem_component(&[], &[]), None);
    }
}
