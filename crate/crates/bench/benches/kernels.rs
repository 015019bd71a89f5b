use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use qframe::consistency::{find_strong_violation_with, SearchConfig};
use qframe::{
    brute_force_minimum, complexity, entropy, minimize_complexity, Distribution, SolverConfig,
};
use qframe_bench::{q, truths};

const SIZES: [usize; 4] = [2, 4, 8, 16];

fn quantities(c: &mut Criterion) {
    let mut group = c.benchmark_group("quantities");
    let xs = truths(&SIZES, 1);
    let ys = truths(&SIZES, 2);
    for ((x, y), n) in xs.iter().zip(&ys).zip(SIZES) {
        group.bench_with_input(BenchmarkId::new("entropy", n), x, |b, x| {
            b.iter(|| entropy(q(0.5), black_box(x)))
        });
        group.bench_with_input(BenchmarkId::new("complexity", n), &(x, y), |b, (x, y)| {
            b.iter(|| complexity(q(2.0), black_box(x), black_box(y)).unwrap())
        });
    }
    group.finish();
}

fn solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("solver");
    let config = SolverConfig::default();
    for (x, n) in truths(&SIZES, 3).iter().zip(SIZES) {
        for qv in [0.5, 2.0] {
            group.bench_with_input(BenchmarkId::new(format!("q={qv}"), n), x, |b, x| {
                b.iter(|| minimize_complexity(q(qv), black_box(x), &config).unwrap())
            });
        }
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let x = Distribution::from_probs(&[0.2, 0.3, 0.5]).unwrap();
    c.bench_function("brute_force n=3 step=0.01", |b| {
        b.iter(|| brute_force_minimum(q(1.0), black_box(&x), 0.01).unwrap())
    });
}

fn search(c: &mut Criterion) {
    let config = SearchConfig {
        trials: 1000,
        ..SearchConfig::default()
    };
    c.bench_function("strong_search q=0.5 1000 trials", |b| {
        b.iter(|| find_strong_violation_with(q(0.5), black_box(&config)))
    });
}

criterion_group!(benches, quantities, solver, oracle, search);
criterion_main!(benches);
