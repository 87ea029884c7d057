use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::groups::{Ball, Element, GroupModel, ModelKind};
use crate::util::{self, C64};

const TEXT_HEADER: &str = "fcstar-vector 1";

/// A finitely supported element of the group algebra, stored by sphere
/// components: `components[k]` holds the coefficients of `a_k = P_k(a)` in
/// the ordering of `E_k`.
///
/// The component list is never empty and its last entry is nonzero unless
/// the whole vector is zero, so `top_degree` is the largest `k` with
/// `a_k != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredVector {
    kind: ModelKind,
    fingerprint: String,
    components: Vec<Vec<C64>>,
}

impl FilteredVector {
    pub fn zero(model: &GroupModel) -> Result<Self> {
        Ok(FilteredVector {
            kind: model.kind(),
            fingerprint: model.fingerprint(),
            components: vec![vec![C64::new(0.0, 0.0); model.sphere(0)?.len()]],
        })
    }

    /// Builds a vector from explicit components, padding or trimming as
    /// needed. Each component must have length `|E_k|`.
    pub fn from_components(model: &GroupModel, mut components: Vec<Vec<C64>>) -> Result<Self> {
        if components.is_empty() {
            return Self::zero(model);
        }
        for (k, c) in components.iter().enumerate() {
            let len = model.sphere(k)?.len();
            if c.len() != len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    got: c.len(),
                });
            }
        }
        while components.len() > 1 && components.last().unwrap().iter().all(|z| *z == C64::new(0.0, 0.0)) {
            components.pop();
        }
        Ok(FilteredVector {
            kind: model.kind(),
            fingerprint: model.fingerprint(),
            components,
        })
    }

    /// Sums the given coefficients; repeated elements accumulate.
    pub fn from_terms(model: &GroupModel, terms: &[(Element, C64)]) -> Result<Self> {
        let mut components: Vec<Vec<C64>> = vec![];
        for (x, c) in terms {
            let k = model.length(x)?;
            while components.len() <= k {
                components.push(vec![C64::new(0.0, 0.0); model.sphere(components.len())?.len()]);
            }
            let i = model.sphere(k)?.position(x).expect("element lies on the sphere of its length");
            components[k][i] += c;
        }
        Self::from_components(model, components)
    }

    pub fn delta(model: &GroupModel, x: &Element, c: C64) -> Result<Self> {
        Self::from_terms(model, &[(x.clone(), c)])
    }

    /// Coefficients given in the global ordering of `ball`.
    pub fn from_ball_coefficients(model: &GroupModel, ball: &Ball, coeffs: &[C64]) -> Result<Self> {
        if coeffs.len() != ball.len() {
            return Err(Error::DimensionMismatch {
                expected: ball.len(),
                got: coeffs.len(),
            });
        }
        let comps = (0..=ball.radius()).map(|k| coeffs[ball.range(k)].to_vec()).collect();
        Self::from_components(model, comps)
    }

    /// Gaussian coefficients on every element of `B_top`, optionally
    /// symmetrized to be self-adjoint.
    pub fn random(model: &GroupModel, top: usize, seed: u64, self_adjoint: bool) -> Result<Self> {
        let mut rng = util::rng(seed, 0);
        let comps = (0..=top)
            .map(|k| Ok(util::gaussian_vec(&mut rng, model.sphere(k)?.len())))
            .collect::<Result<Vec<_>>>()?;
        let f = Self::from_components(model, comps)?;
        if self_adjoint {
            let g = f.adjoint(model)?;
            Ok(f.add(&g)?.scale(C64::new(0.5, 0.0)))
        } else {
            Ok(f)
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub(crate) fn check_model(&self, model: &GroupModel) -> Result<()> {
        if model.fingerprint() != self.fingerprint {
            return Err(Error::InvalidParameter(format!(
                "vector belongs to {} but model is {}",
                self.kind,
                model.kind()
            )));
        }
        Ok(())
    }

    pub fn top_degree(&self) -> usize {
        self.components.len() - 1
    }

    /// Coefficients of `a_k`, or `None` past the top degree.
    pub fn component(&self, k: usize) -> Option<&[C64]> {
        self.components.get(k).map(|c| c.as_slice())
    }

    pub fn components(&self) -> &[Vec<C64>] {
        &self.components
    }

    /// The vector `a_k` alone.
    pub fn only(&self, model: &GroupModel, k: usize) -> Result<Self> {
        let mut comps = (0..k)
            .map(|j| Ok(vec![C64::new(0.0, 0.0); model.sphere(j)?.len()]))
            .collect::<Result<Vec<_>>>()?;
        comps.push(match self.component(k) {
            Some(c) => c.to_vec(),
            None => vec![C64::new(0.0, 0.0); model.sphere(k)?.len()],
        });
        Self::from_components(model, comps)
    }

    /// Degrees carrying a nonzero component.
    pub fn support_degrees(&self) -> Vec<usize> {
        (0..self.components.len())
            .filter(|&k| self.components[k].iter().any(|z| *z != C64::new(0.0, 0.0)))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.support_degrees().is_empty()
    }

    /// `|a|_2`, the norm in the regular representation.
    pub fn norm2(&self) -> f64 {
        self.component_norms().iter().map(|n| n * n).sum::<f64>().sqrt()
    }

    /// `|a_k|_2` for each `k` up to the top degree.
    pub fn component_norms(&self) -> Vec<f64> {
        self.components.iter().map(|c| util::norm2(c)).collect()
    }

    /// `sum_x |a(x)|`.
    pub fn norm1(&self) -> f64 {
        self.components.iter().flatten().map(|z| z.norm()).sum()
    }

    /// `sum_x l(x) |a(x)|`.
    pub fn weighted_norm1(&self) -> f64 {
        self.components
            .iter()
            .enumerate()
            .map(|(k, c)| k as f64 * c.iter().map(|z| z.norm()).sum::<f64>())
            .sum()
    }

    /// Nonzero coefficients as `(degree, index in E_k, value)`.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.components.iter().enumerate().flat_map(|(k, c)| {
            c.iter()
                .enumerate()
                .filter(|(_, z)| **z != C64::new(0.0, 0.0))
                .map(move |(i, z)| (k, i, *z))
        })
    }

    pub fn terms(&self, model: &GroupModel) -> Result<Vec<(Element, C64)>> {
        self.check_model(model)?;
        self.nonzeros()
            .map(|(k, i, z)| Ok((model.sphere(k)?.elements[i].clone(), z)))
            .collect()
    }

    /// Coefficient at `x`.
    pub fn coefficient(&self, model: &GroupModel, x: &Element) -> Result<C64> {
        let k = model.length(x)?;
        Ok(match self.component(k) {
            Some(c) => c[model.sphere(k)?.position(x).unwrap()],
            None => C64::new(0.0, 0.0),
        })
    }

    /// Coefficients in the global ordering of a ball of radius `radius`,
    /// which must be at least the top degree.
    pub fn ball_coefficients(&self, radius: usize) -> Result<Vec<C64>> {
        if radius < self.top_degree() {
            return Err(Error::InvalidParameter(format!(
                "radius {radius} below top degree {}",
                self.top_degree()
            )));
        }
        Ok(self.components.iter().flatten().copied().collect())
    }

    /// `a*(x) = conj(a(x^-1))`.
    pub fn adjoint(&self, model: &GroupModel) -> Result<Self> {
        self.check_model(model)?;
        let mut comps = self.components.clone();
        for (k, comp) in self.components.iter().enumerate() {
            let sphere = model.sphere(k)?;
            for (i, z) in comp.iter().enumerate() {
                let inv = model.invert(&sphere.elements[i]);
                comps[k][sphere.position(&inv).unwrap()] = z.conj();
            }
        }
        Self::from_components(model, comps)
    }

    /// Largest `|a(x) - conj(a(x^-1))|`.
    pub fn self_adjoint_defect(&self, model: &GroupModel) -> Result<f64> {
        let adj = self.adjoint(model)?;
        Ok(self
            .components
            .iter()
            .flatten()
            .zip(adj.components.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn is_self_adjoint(&self, model: &GroupModel, tol: f64) -> Result<bool> {
        Ok(self.self_adjoint_defect(model)? <= tol)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        out.components.iter_mut().flatten().for_each(|z| *z *= c);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.fingerprint != other.fingerprint {
            return Err(Error::InvalidParameter("vectors over different models".into()));
        }
        let (long, short) = if self.components.len() >= other.components.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = long.clone();
        for (a, b) in out.components.iter_mut().zip(&short.components) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        while out.components.len() > 1 && out.components.last().unwrap().iter().all(|z| *z == C64::new(0.0, 0.0)) {
            out.components.pop();
        }
        Ok(out)
    }

    /// Text encoding: a header, the model, its fingerprint, then one
    /// `normal-form re im` line per nonzero coefficient in ball order.
    pub fn to_text(&self, model: &GroupModel) -> Result<String> {
        let mut s = format!("{TEXT_HEADER}\nmodel {}\nfingerprint {}\n", self.kind, self.fingerprint);
        for (x, z) in self.terms(model)? {
            writeln!(s, "{x} {:?} {:?}", z.re, z.im).unwrap();
        }
        Ok(s)
    }

    pub fn from_text(model: &GroupModel, text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let bad = |what: &str| Error::Parse(format!("vector text: {what}"));
        if lines.next() != Some(TEXT_HEADER) {
            return Err(bad("missing header"));
        }
        let kind = lines.next().and_then(|l| l.strip_prefix("model ")).ok_or_else(|| bad("missing model"))?;
        let fp = lines
            .next()
            .and_then(|l| l.strip_prefix("fingerprint "))
            .ok_or_else(|| bad("missing fingerprint"))?;
        if kind != model.kind().to_string() || fp != model.fingerprint() {
            return Err(bad(&format!("written for {kind} ({fp}), reading as {}", model.kind())));
        }
        let mut terms = vec![];
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let mut parts = line.split_whitespace();
            let (Some(x), Some(re), Some(im), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
                return Err(bad(&format!("malformed line '{line}'")));
            };
            let re: f64 = re.parse().map_err(|_| bad(&format!("bad real part in '{line}'")))?;
            let im: f64 = im.parse().map_err(|_| bad(&format!("bad imaginary part in '{line}'")))?;
            terms.push((x.parse::<Element>()?, C64::new(re, im)));
        }
        Self::from_terms(model, &terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::make_model;

    fn model(s: &str) -> GroupModel {
        make_model(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn parseval_and_components() {
        let m = model("free(2)");
        let f = FilteredVector::random(&m, 3, 11, false).unwrap();
        assert_eq!(f.top_degree(), 3);
        let direct: f64 = f.components().iter().flatten().map(|z| z.norm_sqr()).sum();
        assert!((f.norm2().powi(2) - direct).abs() < 1e-12 * direct);
        let parts = (0..=3).map(|k| f.only(&m, k).unwrap()).collect::<Vec<_>>();
        let mut sum = FilteredVector::zero(&m).unwrap();
        for p in &parts {
            assert_eq!(p.support_degrees(), vec![p.top_degree()]);
            sum = sum.add(p).unwrap();
        }
        assert_eq!(sum, f);
    }

    #[test]
    fn adjoint_is_involutive_and_symmetrization_is_self_adjoint() {
        let m = model("heisenberg");
        let f = FilteredVector::random(&m, 2, 3, false).unwrap();
        assert_eq!(f.adjoint(&m).unwrap().adjoint(&m).unwrap(), f);
        assert!(!f.is_self_adjoint(&m, 1e-9).unwrap());
        let g = FilteredVector::random(&m, 2, 3, true).unwrap();
        assert!(g.is_self_adjoint(&m, 0.0).unwrap());
    }

    #[test]
    fn terms_round_trip_through_text() {
        let m = model("zd(2)");
        let f = FilteredVector::random(&m, 2, 5, true).unwrap();
        let text = f.to_text(&m).unwrap();
        assert!(text.starts_with("fcstar-vector 1\nmodel zd(2)\n"));
        assert_eq!(FilteredVector::from_text(&m, &text).unwrap(), f);
        let other = model("zd(3)");
        assert!(FilteredVector::from_text(&other, &text).is_err());
    }

    #[test]
    fn trailing_zero_components_are_trimmed() {
        let m = model("zd(1)");
        let f = FilteredVector::from_terms(
            &m,
            &[(Element(vec![2]), C64::new(1.0, 0.0)), (Element(vec![2]), C64::new(-1.0, 0.0))],
        )
        .unwrap();
        assert_eq!(f.top_degree(), 0);
        assert!(f.is_zero());
    }
}
