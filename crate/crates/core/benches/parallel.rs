use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fcstar::filtration::{ball_table, FilteredVector};
use fcstar::groups::{make_model, Ball, GroupModel};
use fcstar::haagerup::{haagerup_scan, Strategy};
use fcstar::linop::{op_norm, NormOptions};
use fcstar::par;

fn model(spec: &str) -> GroupModel {
    make_model(spec.parse().unwrap()).unwrap()
}

fn modes() -> [(&'static str, bool); 2] {
    [("parallel", true), ("sequential", false)]
}

fn scan(c: &mut Criterion) {
    let g = model("free(2)");
    let strategy = Strategy::Combined { trials: 50, starts: 8, iters: 20, seed: 1 };
    let mut group = c.benchmark_group("haagerup_scan_free2_max3");
    group.sample_size(10);
    for (name, on) in modes() {
        group.bench_function(BenchmarkId::new(name, 3), |b| {
            par::set_parallel(on);
            b.iter(|| haagerup_scan(&g, black_box(3), strategy, NormOptions::default()).unwrap());
        });
    }
    group.finish();
    par::set_parallel(true);
}

fn commutator(c: &mut Criterion) {
    let g = model("free(2)");
    let symbols = Ball::new(&g, 3).unwrap();
    let ball = Ball::new(&g, 7).unwrap();
    let f = FilteredVector::random(&g, 3, 9, true).unwrap();
    let coeffs = f.ball_coefficients(3).unwrap();
    let mut group = c.benchmark_group("commutator_norm_free2_r7");
    group.sample_size(10);
    for (name, on) in modes() {
        group.bench_function(BenchmarkId::new(name, ball.len()), |b| {
            par::set_parallel(on);
            b.iter(|| {
                let t = ball_table(&g, &symbols, &ball, |dx, dz| dx as f64 - dz as f64).unwrap();
                op_norm(&t.block(&coeffs).unwrap(), NormOptions::default()).unwrap().value
            });
        });
    }
    group.finish();
    par::set_parallel(true);
}

criterion_group!(benches, scan, commutator);
criterion_main!(benches);
