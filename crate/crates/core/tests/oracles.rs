mod common;

use common::*;
use fcstar::filtration::{ball_operator, conv_block, FilteredVector};
use fcstar::groups::{ball_sizes, Ball};
use fcstar::linop::{op_norm, NormOptions, SparseMatrix};
use fcstar::util::{self, C64};

#[test]
fn op_norm_matches_dense_eigensolver() {
    for (seed, (rows, cols)) in [(3, 5), (7, 7), (12, 4), (1, 9), (20, 20)].into_iter().enumerate() {
        let mut rng = util::rng(seed as u64, 0);
        let dense: Vec<Vec<C64>> = (0..rows).map(|_| util::gaussian_vec(&mut rng, cols)).collect();
        let entries = dense
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, v)| (i, j, *v)))
            .collect();
        let a = SparseMatrix::new(rows, cols, entries).unwrap();
        let est = op_norm(&a, NormOptions::default()).unwrap();
        let exact = dense_norm(&dense);
        assert!((est.value - exact).abs() <= 1e-9 * exact, "{rows}x{cols}: {} vs {exact}", est.value);
        assert!(est.upper_bound >= exact * (1.0 - 1e-12));
    }
}

#[test]
fn block_norms_match_dense_eigensolver() {
    for spec in ["free(2)", "zd(2)", "heisenberg", "dihedral-infinity", "zd(3)"] {
        let g = model(spec);
        for (k, m, n) in [(1, 1, 2), (2, 2, 2), (2, 3, 1), (1, 2, 2)] {
            let f = FilteredVector::random(&g, k, 40 + k as u64, false).unwrap().only(&g, k).unwrap();
            let block = conv_block(&g, &f, m, n).unwrap();
            let est = op_norm(&block, NormOptions::default()).unwrap().value;
            let exact = dense_norm(&block.to_dense());
            assert!((est - exact).abs() <= 1e-9 * exact.max(1.0), "{spec} ({k},{m},{n}): {est} vs {exact}");
        }
    }
}

#[test]
fn ball_operator_matches_group_law() {
    for spec in ["free(2)", "zd(2)", "heisenberg", "cyclic(7)", "fpc(3,2)"] {
        let g = model(spec);
        let f = FilteredVector::random(&g, 2, 9, false).unwrap();
        let ball = Ball::new(&g, 4).unwrap();
        let a = ball_operator(&g, &f, &ball).unwrap();
        assert_eq!(max_diff(&a, &weighted_compression(&g, &f, 4, |_, _| 1.0)), 0.0, "{spec}");
    }
}

/// `|B_p|` in `Z^d` is `sum_j 2^j C(d, j) C(p, j)`.
fn lattice_ball(d: u64, p: u64) -> u64 {
    let binom = |n: u64, k: u64| (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
    (0..=d.min(p)).map(|j| (1u64 << j) * binom(d, j) * binom(p, j)).sum()
}

#[test]
fn ball_sizes_match_closed_forms() {
    for d in 1..=4u64 {
        let sizes = ball_sizes(&model(&format!("zd({d})")), 8).unwrap();
        for (p, &b) in sizes.iter().enumerate() {
            assert_eq!(b as u64, lattice_ball(d, p as u64), "zd({d}) p={p}");
        }
    }
    for r in 1..=3u64 {
        let sizes = ball_sizes(&model(&format!("free({r})")), 6).unwrap();
        for (p, &b) in sizes.iter().enumerate() {
            // 1 + 2r ((2r-1)^p - 1) / (2r - 2), with the r = 1 limit 2p + 1.
            let expect = if r == 1 {
                2 * p as u64 + 1
            } else {
                1 + 2 * r * ((2 * r - 1).pow(p as u32) - 1) / (2 * r - 2)
            };
            assert_eq!(b as u64, expect, "free({r}) p={p}");
        }
    }
    let dinf = ball_sizes(&model("dihedral-infinity"), 10).unwrap();
    assert!(dinf.iter().enumerate().all(|(p, &b)| b == 2 * p + 1));
}
