use crate::error::{Error, Result};
use crate::filtration::FilteredVector;
use crate::groups::{Ball, GroupModel};
use crate::linop::{SparseMatrix, Term, TriTable};
use crate::par;
use crate::util::C64;

/// The trilinear table of left convolution from `E_n` to `E_m` by symbols on
/// `E_k`: one term per `(y, z)` with `y z` in `E_m`.
pub fn block_table(model: &GroupModel, k: usize, m: usize, n: usize) -> Result<TriTable> {
    let (ek, em, en) = (model.sphere(k)?, model.sphere(m)?, model.sphere(n)?);
    if m.abs_diff(n) > k || m > k + n {
        return TriTable::new(ek.len(), em.len(), en.len(), false, vec![]);
    }
    let columns = par::map_range(en.len(), |zi| {
        let z = &en.elements[zi];
        ek.elements
            .iter()
            .enumerate()
            .filter_map(|(yi, y)| {
                em.position(&model.multiply(y, z)).map(|xi| Term {
                    y: yi as u32,
                    z: zi as u32,
                    x: xi as u32,
                    coeff: C64::new(1.0, 0.0),
                })
            })
            .collect::<Vec<_>>()
    });
    TriTable::new(ek.len(), em.len(), en.len(), false, columns.concat())
}

/// The matrix of `P_m (f *) P_n` in the sphere bases: entry `(x, z)` is
/// `sum { f(y) : y in E_k, y z = x }`.
pub fn conv_block(model: &GroupModel, f: &FilteredVector, m: usize, n: usize) -> Result<SparseMatrix> {
    f.check_model(model)?;
    let k = single_degree(f)?;
    block_table(model, k, m, n)?.block(f.component(k).unwrap())
}

/// The unique degree carrying `f`; the zero vector counts as degree 0.
fn single_degree(f: &FilteredVector) -> Result<usize> {
    match f.support_degrees().as_slice() {
        [] => Ok(0),
        [k] => Ok(*k),
        ks => Err(Error::InvalidParameter(format!(
            "expected a single sphere component, found degrees {ks:?}"
        ))),
    }
}

/// Left convolution by `f` compressed to `l2(B_R)`, in the global ordering of
/// `ball`.
pub fn ball_operator(model: &GroupModel, f: &FilteredVector, ball: &Ball) -> Result<SparseMatrix> {
    f.check_model(model)?;
    if ball.radius() < f.top_degree() {
        return Err(Error::InvalidParameter(format!(
            "radius {} below top degree {}",
            ball.radius(),
            f.top_degree()
        )));
    }
    let support = f
        .nonzeros()
        .map(|(k, i, c)| Ok((k, model.sphere(k)?.elements[i].clone(), c)))
        .collect::<Result<Vec<_>>>()?;
    let degrees = ball.degrees();
    let columns = par::map_range(ball.len(), |zi| {
        let z = ball.element(zi);
        let dz = degrees[zi];
        support
            .iter()
            .filter_map(|(k, y, c)| {
                ball.locate_in(&model.multiply(y, z), dz.abs_diff(*k), dz + k)
                    .map(|xi| (xi, zi, *c))
            })
            .collect::<Vec<_>>()
    });
    SparseMatrix::from_triplets(ball.len(), ball.len(), columns.concat())
}

/// The trilinear table of `a -> W o (a *)` on `l2(B_R)` for symbols on
/// `B_K`, where `W` multiplies entry `(x, z)` by `weight(l(x), l(z))`.
/// Terms with zero weight are dropped.
pub fn ball_table(
    model: &GroupModel,
    symbols: &Ball,
    ball: &Ball,
    weight: impl Fn(usize, usize) -> f64 + Sync + Send,
) -> Result<TriTable> {
    if ball.radius() < symbols.radius() {
        return Err(Error::InvalidParameter(format!(
            "radius {} below symbol radius {}",
            ball.radius(),
            symbols.radius()
        )));
    }
    let sym_deg = symbols.degrees();
    let degrees = ball.degrees();
    let columns = par::map_range(ball.len(), |zi| {
        let z = ball.element(zi);
        let dz = degrees[zi];
        symbols
            .elements()
            .enumerate()
            .filter_map(|(yi, y)| {
                let dy = sym_deg[yi];
                let xi = ball.locate_in(&model.multiply(y, z), dz.abs_diff(dy), dz + dy)?;
                let w = weight(degrees[xi], dz);
                (w != 0.0).then(|| Term {
                    y: yi as u32,
                    z: zi as u32,
                    x: xi as u32,
                    coeff: C64::new(w, 0.0),
                })
            })
            .collect::<Vec<_>>()
    });
    TriTable::new(symbols.len(), ball.len(), ball.len(), false, columns.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_model, Element};

    fn model(s: &str) -> GroupModel {
        make_model(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn generator_block_is_partial_isometry_like() {
        let m = model("free(2)");
        let g = m.sphere(1).unwrap().elements[0].clone();
        let f = FilteredVector::delta(&m, &g, C64::new(1.0, 0.0)).unwrap();
        let b = conv_block(&m, &f, 4, 3).unwrap();
        for j in 0..b.cols() {
            assert!((0..b.rows()).filter(|&i| b.get(i, j) != C64::new(0.0, 0.0)).count() <= 1);
        }
    }

    #[test]
    fn far_apart_spheres_give_zero_block() {
        let m = model("zd(2)");
        let f = FilteredVector::random(&m, 2, 1, false).unwrap().only(&m, 2).unwrap();
        let b = conv_block(&m, &f, 5, 2).unwrap();
        assert!(b.is_zero());
        assert_eq!((b.rows(), b.cols()), (20, 8));
    }

    #[test]
    fn multi_component_rejected() {
        let m = model("zd(1)");
        let f = FilteredVector::random(&m, 2, 1, false).unwrap();
        assert!(conv_block(&m, &f, 2, 2).is_err());
    }

    #[test]
    fn blocks_of_ball_operator_match_conv_blocks() {
        let m = model("dihedral-infinity");
        let f = FilteredVector::random(&m, 2, 9, false).unwrap();
        let ball = Ball::new(&m, 5).unwrap();
        let full = ball_operator(&m, &f, &ball).unwrap();
        for mm in 0..=5 {
            for n in 0..=5 {
                let mut sum = SparseMatrix::zeros(ball.range(mm).len(), ball.range(n).len());
                for k in 0..=2 {
                    let fk = f.only(&m, k).unwrap();
                    sum = sum.add(&conv_block(&m, &fk, mm, n).unwrap()).unwrap();
                }
                let sub = full.submatrix(ball.range(mm), ball.range(n));
                assert!(sub.max_abs_diff(&sum).unwrap() < 1e-14);
            }
        }
    }

    #[test]
    fn ball_table_reproduces_ball_operator() {
        let m = model("heisenberg");
        let symbols = Ball::new(&m, 2).unwrap();
        let ball = Ball::new(&m, 4).unwrap();
        let f = FilteredVector::random(&m, 2, 4, false).unwrap();
        let table = ball_table(&m, &symbols, &ball, |_, _| 1.0).unwrap();
        let a = table.block(&f.ball_coefficients(2).unwrap()).unwrap();
        let b = ball_operator(&m, &f, &ball).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-14);
        let x = Element(vec![1, 0, 0]);
        assert!(ball.locate(&x).is_some());
    }
}
