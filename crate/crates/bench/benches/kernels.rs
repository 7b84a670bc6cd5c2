use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lp_tile_core::carleson::random_carleson;
use lp_tile_core::projections::square_sharp;
use lp_tile_core::rng::{gaussian_signal, random_sign, trial_rng};
use lp_tile_core::sweep::{random_family, OmegaFamily};
use lp_tile_core::{dft, op_norm_p, var_q, Multiplier, NormConfig, C64};

fn bench_dft(c: &mut Criterion) {
    let mut g = c.benchmark_group("dft");
    for n in [1024usize, 16384] {
        let f = gaussian_signal(&mut trial_rng(1, 0), n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| b.iter(|| dft(black_box(f))));
    }
    g.finish();
}

fn bench_square_sharp(c: &mut Criterion) {
    let mut g = c.benchmark_group("square_sharp");
    for n in [1024usize, 4096] {
        let mut rng = trial_rng(2, 0);
        let f = gaussian_signal(&mut rng, n);
        let omega = random_family(&mut rng, n, OmegaFamily::RandomPartition).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &(f, omega), |b, (f, omega)| {
            b.iter(|| square_sharp(black_box(f), omega).unwrap())
        });
    }
    g.finish();
}

fn bench_var_q(c: &mut Criterion) {
    let mut g = c.benchmark_group("var_q");
    for len in [256usize, 1024] {
        let f = gaussian_signal(&mut trial_rng(3, 0), len);
        let m: Vec<C64> = f.samples().to_vec();
        g.bench_with_input(BenchmarkId::from_parameter(len), &m, |b, m| b.iter(|| var_q(black_box(m), 2.0).unwrap()));
    }
    g.finish();
}

fn bench_cm_norm(c: &mut Criterion) {
    let mut g = c.benchmark_group("cm_norm");
    for depth in [10u32, 14] {
        let alpha = random_carleson(&mut trial_rng(4, 0), depth);
        g.bench_with_input(BenchmarkId::from_parameter(depth), &alpha, |b, a| b.iter(|| black_box(a).cm_norm()));
    }
    g.finish();
}

fn bench_op_norm_p(c: &mut Criterion) {
    let mut g = c.benchmark_group("op_norm_p");
    g.sample_size(10);
    let n = 1024;
    let mut rng = trial_rng(5, 0);
    let m = Multiplier::from_fft_order((0..n).map(|_| C64::new(random_sign(&mut rng), 0.0)).collect()).unwrap();
    let cfg = NormConfig { restarts: 4, iters: 50, ..NormConfig::default() };
    g.bench_function(BenchmarkId::new("sign", n), |b| b.iter(|| op_norm_p(black_box(&m), 4.0, cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, bench_dft, bench_square_sharp, bench_var_q, bench_cm_norm, bench_op_norm_p);
criterion_main!(benches);
