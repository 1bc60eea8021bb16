use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use qgeom_core::algebra::{commutator_residual, highest_weight_state};
use qgeom_core::noise::generate_timeseries;
use qgeom_core::spectrum::{autocorrelation, welch};
use qgeom_core::{AlgebraRep, Axis, PlanckScale, Spin};

fn algebra(c: &mut Criterion) {
    let scale = PlanckScale::codata();
    let mut group = c.benchmark_group("algebra");
    for twice in [20u64, 100, 400] {
        let spin = Spin::from_twice(twice);
        group.bench_with_input(BenchmarkId::new("build", twice), &spin, |b, &spin| {
            b.iter(|| AlgebraRep::build(black_box(spin), &scale).unwrap())
        });
        let rep = AlgebraRep::build(spin, &scale).unwrap();
        group.bench_with_input(
            BenchmarkId::new("commutator_residual", twice),
            &rep,
            |b, rep| b.iter(|| commutator_residual(black_box(rep))),
        );
    }
    let rep = AlgebraRep::build(Spin::integer(50), &scale).unwrap();
    let axis = Axis::normalized([1.0, 2.0, 3.0]).unwrap();
    group.bench_function("highest_weight_state/j50", |b| {
        b.iter(|| highest_weight_state(black_box(&rep), &axis).unwrap())
    });
    group.finish();
}

fn noise(c: &mut Criterion) {
    let scale = PlanckScale::codata();
    let mut group = c.benchmark_group("noise");
    group.sample_size(20);
    let n = 250_000u64;
    group.throughput(Throughput::Elements(n));
    group.bench_function("generate_40m_25MHz", |b| {
        b.iter(|| generate_timeseries(40.0, 25e6, 0.01, black_box(7), &scale).unwrap())
    });
    let series = generate_timeseries(40.0, 25e6, 0.01, 7, &scale).unwrap();
    group.bench_function("welch_4096", |b| {
        b.iter(|| welch(black_box(series.samples()), 25e6, 4096, 0.5).unwrap())
    });
    group.bench_function("autocorrelation_64_lags", |b| {
        b.iter(|| autocorrelation(black_box(series.samples()), 25e6, 64.0 / 25e6).unwrap())
    });
    group.finish();
}

criterion_group!(benches, algebra, noise);
criterion_main!(benches);
