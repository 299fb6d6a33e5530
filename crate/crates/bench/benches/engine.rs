use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use toric_nl::cohomology::cohomology;
use toric_nl::lattice::{hermite_normal_form, smith_normal_form};
use toric_nl::nl::nl_bounds;
use toric_nl::regularity::oda_window_check;
use toric_nl_bench::{dense_matrix, entry};

fn normal_forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("normal_forms");
    for n in [4usize, 8, 12] {
        let a = dense_matrix(n);
        group.bench_with_input(BenchmarkId::new("smith", n), &a, |b, a| {
            b.iter(|| smith_normal_form(black_box(a)))
        });
        group.bench_with_input(BenchmarkId::new("hermite", n), &a, |b, a| {
            b.iter(|| hermite_normal_form(black_box(a)))
        });
    }
    group.finish();
}

fn line_bundle_cohomology(c: &mut Criterion) {
    let mut group = c.benchmark_group("cohomology");
    for name in ["p3", "blowup-p3-line", "quadric-cone-resolution"] {
        let e = entry(name);
        let v = &e.variety;
        let d = v.sub(&e.eta, &v.scale(2, &v.anticanonical()));
        group.bench_function(name, |b| b.iter(|| cohomology(v, black_box(&d)).unwrap()));
    }
    group.finish();
}

fn oda_window(c: &mut Criterion) {
    let mut group = c.benchmark_group("oda_window");
    group.sample_size(10);
    for name in ["p1xp2", "wp1122"] {
        let e = entry(name);
        group.bench_function(name, |b| {
            b.iter(|| oda_window_check(&e.variety, black_box(2)).unwrap())
        });
    }
    group.finish();
}

fn bounds(c: &mut Criterion) {
    let e = entry("p3");
    let mut group = c.benchmark_group("nl_bounds");
    group.sample_size(10);
    group.bench_function("p3_n2", |b| {
        b.iter(|| nl_bounds(&e.variety, &e.eta, black_box(2)).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    normal_forms,
    line_bundle_cohomology,
    oda_window,
    bounds
);
criterion_main!(benches);
