//! Finitely generated group models: normal forms, word length, spheres and
//! balls, the four-point hyperbolicity defect, geodesic splitting and growth.

pub mod cache;
mod delta;
mod growth;
mod model;
mod split;

use std::sync::Arc;

pub use delta::{four_point_delta, DeltaMode, DeltaReport, DELTA_BUDGET};
pub use growth::{growth_exponent, GrowthClass, GrowthReport};
pub use model::{
    make_model, Element, GroupModel, ModelKind, SphereIndex, DEFAULT_SPHERE_BUDGET,
    NORMAL_FORM_VERSION,
};
pub use split::{geodesic_split, split_parameters, SplitParameters};

use crate::error::Result;

/// The sphere `E_k`.
pub fn sphere(model: &GroupModel, k: usize) -> Result<Arc<SphereIndex>> {
    model.sphere(k)
}

/// `|B_0|, ..., |B_{p_max}|`.
pub fn ball_sizes(model: &GroupModel, p_max: usize) -> Result<Vec<usize>> {
    let mut total = 0;
    (0..=p_max)
        .map(|p| {
            total += model.sphere(p)?.len();
            Ok(total)
        })
        .collect()
}

/// The ball `B_R` as consecutive spheres, giving every element a global
/// position ordered by length and then by normal form.
#[derive(Debug, Clone)]
pub struct Ball {
    spheres: Vec<Arc<SphereIndex>>,
    offsets: Vec<usize>,
}

impl Ball {
    pub fn new(model: &GroupModel, radius: usize) -> Result<Self> {
        let spheres = model.spheres_upto(radius)?;
        let mut offsets = Vec::with_capacity(spheres.len() + 1);
        let mut acc = 0;
        for s in &spheres {
            offsets.push(acc);
            acc += s.len();
        }
        offsets.push(acc);
        Ok(Ball { spheres, offsets })
    }

    pub fn radius(&self) -> usize {
        self.spheres.len() - 1
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sphere(&self, k: usize) -> &SphereIndex {
        &self.spheres[k]
    }

    /// Global index range of `E_k` inside the ball.
    pub fn range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn degree_of(&self, pos: usize) -> usize {
        self.offsets.partition_point(|&o| o <= pos) - 1
    }

    pub fn element(&self, pos: usize) -> &Element {
        let k = self.degree_of(pos);
        &self.spheres[k].elements[pos - self.offsets[k]]
    }

    /// Global position of `x`, searching only spheres with radius in `lo..=hi`.
    pub fn locate_in(&self, x: &Element, lo: usize, hi: usize) -> Option<usize> {
        let hi = hi.min(self.radius());
        (lo..=hi).find_map(|k| self.spheres[k].position(x).map(|i| self.offsets[k] + i))
    }

    pub fn locate(&self, x: &Element) -> Option<usize> {
        self.locate_in(x, 0, self.radius())
    }

    /// Length of every ball element in global order.
    pub fn degrees(&self) -> Vec<usize> {
        (0..self.spheres.len())
            .flat_map(|k| std::iter::repeat_n(k, self.spheres[k].len()))
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.spheres.iter().flat_map(|s| s.elements.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds() -> Vec<ModelKind> {
        vec![
            ModelKind::Free(1),
            ModelKind::Free(2),
            ModelKind::Free(3),
            ModelKind::Zd(1),
            ModelKind::Zd(2),
            ModelKind::Zd(3),
            ModelKind::Heisenberg,
            ModelKind::Cyclic(2),
            ModelKind::Cyclic(5),
            ModelKind::Cyclic(6),
            ModelKind::FreeProductCyclic(3, 2),
            ModelKind::FreeProductCyclic(4, 5),
            ModelKind::DihedralInfinity,
        ]
    }

    #[test]
    fn sphere_zero_is_identity() {
        for kind in kinds() {
            let g = make_model(kind).unwrap();
            let e = g.sphere(0).unwrap();
            assert_eq!(e.elements, vec![g.identity()]);
        }
    }

    #[test]
    fn sphere_sizes_match_closed_forms() {
        let f2 = make_model(ModelKind::Free(2)).unwrap();
        assert_eq!(f2.sphere(2).unwrap().len(), 12);
        for n in 1..=3u32 {
            let g = make_model(ModelKind::Free(n)).unwrap();
            for k in 1..=5u32 {
                let expected = 2 * n * (2 * n - 1).pow(k - 1);
                assert_eq!(g.sphere(k as usize).unwrap().len(), expected as usize);
            }
        }
        let z2 = make_model(ModelKind::Zd(2)).unwrap();
        assert_eq!(z2.sphere(3).unwrap().len(), 12);
        for k in 1..=15 {
            assert_eq!(z2.sphere(k).unwrap().len(), 4 * k);
        }
    }

    #[test]
    fn ball_sizes_examples() {
        let z2 = make_model(ModelKind::Zd(2)).unwrap();
        assert_eq!(ball_sizes(&z2, 2).unwrap(), vec![1, 5, 13]);
        let f2 = make_model(ModelKind::Free(2)).unwrap();
        assert_eq!(ball_sizes(&f2, 2).unwrap(), vec![1, 5, 17]);
        let h = make_model(ModelKind::Heisenberg).unwrap();
        assert_eq!(ball_sizes(&h, 0).unwrap(), vec![1]);
    }

    #[test]
    fn spheres_agree_with_closed_form_lengths() {
        for kind in kinds() {
            if kind == ModelKind::Heisenberg {
                continue;
            }
            let g = make_model(kind).unwrap();
            for k in 0..=5 {
                for x in &g.sphere(k).unwrap().elements {
                    assert_eq!(g.length(x).unwrap(), k, "{kind} {x}");
                }
            }
        }
    }

    #[test]
    fn spheres_are_disjoint_and_sorted() {
        for kind in kinds() {
            let g = make_model(kind).unwrap();
            let ball = Ball::new(&g, 4).unwrap();
            let mut all: Vec<&Element> = ball.elements().collect();
            let n = all.len();
            all.sort();
            all.dedup();
            assert_eq!(all.len(), n, "{kind}");
            for k in 0..=4 {
                let s = g.sphere(k).unwrap();
                assert!(s.elements.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn length_axioms_exhaustive_on_small_balls() {
        for kind in kinds() {
            let g = make_model(kind).unwrap();
            let r = if kind == ModelKind::Free(3) { 3 } else { 4 };
            let ball = Ball::new(&g, r).unwrap();
            let elems: Vec<&Element> = ball.elements().collect();
            for x in &elems {
                let lx = g.length(x).unwrap();
                assert_eq!(g.length(&g.invert(x)).unwrap(), lx);
                assert_eq!(g.multiply(x, &g.invert(x)), g.identity());
                assert_eq!(lx == 0, g.is_identity(x));
                for y in &elems {
                    let xy = g.multiply(x, y);
                    assert!(g.length(&xy).unwrap() <= lx + g.length(y).unwrap());
                }
            }
        }
    }

    #[test]
    fn heisenberg_commutator_length_by_bfs() {
        let h = make_model(ModelKind::Heisenberg).unwrap();
        // z = x y x^-1 y^-1 needs four letters.
        assert_eq!(h.length(&Element(vec![0, 0, 1])).unwrap(), 4);
        assert_eq!(h.length(&Element(vec![0, 0, -1])).unwrap(), 4);
        // x^a y^b has length |a| + |b|.
        assert_eq!(h.length(&Element(vec![2, -3, 0])).unwrap(), 5);
    }

    #[test]
    fn ball_positions() {
        let g = make_model(ModelKind::Free(2)).unwrap();
        let ball = Ball::new(&g, 2).unwrap();
        assert_eq!(ball.len(), 17);
        for pos in 0..ball.len() {
            let x = ball.element(pos).clone();
            assert_eq!(ball.locate(&x), Some(pos));
            assert_eq!(ball.degree_of(pos), g.length(&x).unwrap());
        }
        assert_eq!(ball.range(1), 1..5);
    }
}
