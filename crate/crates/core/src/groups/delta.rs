use rand::Rng;
use serde::{Deserialize, Serialize};

use super::model::{Element, GroupModel};
use super::Ball;
use crate::error::{Error, Result};
use crate::par;
use crate::util::rng;

/// Largest number of triples an exhaustive scan will visit.
pub const DELTA_BUDGET: usize = 2_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaReport {
    pub radius: usize,
    pub mode: DeltaMode,
    /// Largest four-point defect found, floored at zero.
    pub delta: usize,
    /// Quadruple `(x, y, z, w)` attaining `delta`; `x` is the identity.
    pub witness: [Element; 4],
    pub evaluated: u64,
}

/// Four-point hyperbolicity defect of the word metric on `B_R`.
///
/// By left invariance every quadruple is a translate of one whose first
/// point is the identity, so quadruples are based at `e` and the other three
/// points range over `B_R`. The defect of `(e, y, z, w)` is
/// `l(y) + rho(z, w) - max(l(z) + rho(y, w), l(w) + rho(y, z))`.
/// Exhaustive mode returns the exact maximum over these quadruples; sampled
/// mode returns a lower bound.
pub fn four_point_delta(model: &GroupModel, radius: usize, mode: DeltaMode) -> Result<DeltaReport> {
    let ball = Ball::new(model, radius)?;
    let n = ball.len();
    let points: Vec<Element> = ball.elements().cloned().collect();
    let lengths = ball.degrees();
    let inverses: Vec<Element> = points.iter().map(|x| model.invert(x)).collect();
    // Sphere lengths up to 2R are needed for pairwise distances.
    model.sphere(2 * radius)?;
    let dist_row = |i: usize| -> Result<Vec<usize>> {
        points
            .iter()
            .map(|y| model.length(&model.multiply(&inverses[i], y)))
            .collect()
    };
    let defect = |dist: &[Vec<usize>], y: usize, z: usize, w: usize| -> i64 {
        let lhs = lengths[y] + dist[z][w];
        let a = lengths[z] + dist[y][w];
        let b = lengths[w] + dist[y][z];
        lhs as i64 - a.max(b) as i64
    };

    let e = model.identity();
    match mode {
        DeltaMode::Exhaustive => {
            let triples = n.saturating_mul(n).saturating_mul(n);
            if triples > DELTA_BUDGET {
                return Err(Error::Budget {
                    what: format!("exhaustive four-point scan of B_{radius}"),
                    needed: triples,
                    budget: DELTA_BUDGET,
                });
            }
            let dist = par::map_range(n, dist_row).into_iter().collect::<Result<Vec<_>>>()?;
            // Best per first coordinate, then the first maximum in index order.
            let per_y = par::map_range(n, |y| {
                let mut best = (0i64, (0usize, 0usize, 0usize));
                for z in 0..n {
                    for w in 0..n {
                        let d = defect(&dist, y, z, w);
                        if d > best.0 {
                            best = (d, (y, z, w));
                        }
                    }
                }
                best
            });
            let mut best = (0i64, (0usize, 0usize, 0usize));
            for b in per_y {
                if b.0 > best.0 {
                    best = b;
                }
            }
            let (y, z, w) = best.1;
            Ok(DeltaReport {
                radius,
                mode,
                delta: best.0 as usize,
                witness: [e, points[y].clone(), points[z].clone(), points[w].clone()],
                evaluated: triples as u64,
            })
        }
        DeltaMode::Sampled { trials, seed } => {
            let mut r = rng(seed, 0);
            let mut best = (0i64, (0usize, 0usize, 0usize));
            for _ in 0..trials {
                let (y, z, w) = (r.random_range(0..n), r.random_range(0..n), r.random_range(0..n));
                let d = |a: usize, b: usize| -> Result<usize> {
                    model.length(&model.multiply(&inverses[a], &points[b]))
                };
                let lhs = lengths[y] + d(z, w)?;
                let rhs = (lengths[z] + d(y, w)?).max(lengths[w] + d(y, z)?);
                let v = lhs as i64 - rhs as i64;
                if v > best.0 {
                    best = (v, (y, z, w));
                }
            }
            let (y, z, w) = best.1;
            Ok(DeltaReport {
                radius,
                mode,
                delta: best.0 as usize,
                witness: [e, points[y].clone(), points[z].clone(), points[w].clone()],
                evaluated: trials,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_model, ModelKind};

    fn quad_defect(g: &GroupModel, q: &[Element; 4]) -> i64 {
        let d = |a: &Element, b: &Element| g.distance(a, b).unwrap() as i64;
        d(&q[0], &q[1]) + d(&q[2], &q[3])
            - (d(&q[0], &q[2]) + d(&q[1], &q[3])).max(d(&q[0], &q[3]) + d(&q[1], &q[2]))
    }

    #[test]
    fn free_group_is_a_tree() {
        let g = make_model(ModelKind::Free(2)).unwrap();
        for r in 0..=3 {
            let rep = four_point_delta(&g, r, DeltaMode::Exhaustive).unwrap();
            assert_eq!(rep.delta, 0);
        }
    }

    #[test]
    fn z2_defect_at_radius_four() {
        let g = make_model(ModelKind::Zd(2)).unwrap();
        let rep = four_point_delta(&g, 4, DeltaMode::Exhaustive).unwrap();
        assert_eq!(rep.delta, 4);
        assert_eq!(quad_defect(&g, &rep.witness), 4);
        let witness = [
            Element(vec![0, 0]),
            Element(vec![2, 2]),
            Element(vec![2, 0]),
            Element(vec![0, 2]),
        ];
        assert_eq!(quad_defect(&g, &witness), 4);
    }

    #[test]
    fn degenerate_quadruple() {
        let g = make_model(ModelKind::Zd(2)).unwrap();
        let x = Element(vec![1, 1]);
        assert_eq!(quad_defect(&g, &[x.clone(), x.clone(), x.clone(), x]), 0);
        let rep = four_point_delta(&g, 0, DeltaMode::Exhaustive).unwrap();
        assert_eq!(rep.delta, 0);
    }

    #[test]
    fn monotone_in_radius() {
        let g = make_model(ModelKind::Zd(2)).unwrap();
        let ds: Vec<usize> = (0..=4)
            .map(|r| four_point_delta(&g, r, DeltaMode::Exhaustive).unwrap().delta)
            .collect();
        assert!(ds.windows(2).all(|w| w[0] <= w[1]), "{ds:?}");
    }

    #[test]
    fn sampled_is_a_lower_bound_and_deterministic() {
        let g = make_model(ModelKind::Zd(2)).unwrap();
        let mode = DeltaMode::Sampled { trials: 5000, seed: 7 };
        let a = four_point_delta(&g, 4, mode).unwrap();
        let b = four_point_delta(&g, 4, mode).unwrap();
        assert_eq!(a.delta, b.delta);
        assert_eq!(a.witness, b.witness);
        assert!(a.delta <= 4);
        assert_eq!(quad_defect(&g, &a.witness), a.delta as i64);
    }

    #[test]
    fn heisenberg_and_dihedral() {
        let d = make_model(ModelKind::DihedralInfinity).unwrap();
        assert_eq!(four_point_delta(&d, 4, DeltaMode::Exhaustive).unwrap().delta, 0);
        let h = make_model(ModelKind::Heisenberg).unwrap();
        let rep = four_point_delta(&h, 2, DeltaMode::Exhaustive).unwrap();
        assert_eq!(quad_defect(&h, &rep.witness), rep.delta as i64);
    }
}
