use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use logistic_horizon::{
    estimate_scd, eulerian_row, fit_logistic_nlls, poly_roots, polyfit_estimate, ConstantMode,
    EulerianTriangle, SelectionPolicy,
};
use logistic_horizon_bench::{clean_series, noisy_series};

fn eulerian(c: &mut Criterion) {
    c.bench_function("eulerian_triangle_30", |b| {
        b.iter(|| EulerianTriangle::new(black_box(30)).unwrap())
    });
    c.bench_function("eulerian_row_cached_20", |b| {
        b.iter(|| eulerian_row(black_box(20)).unwrap())
    });
}

fn roots(c: &mut Criterion) {
    let mut group = c.benchmark_group("poly_roots");
    for n in [3usize, 8, 16, 24] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| poly_roots(black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn estimators(c: &mut Criterion) {
    let clean = clean_series(40);
    let noisy = noisy_series(40, 5.0, 42);
    c.bench_function("estimate_scd_40", |b| {
        b.iter(|| {
            estimate_scd(
                black_box(&clean),
                ConstantMode::Exact,
                SelectionPolicy::FirstLocalMax,
            )
        })
    });
    c.bench_function("polyfit_quartic_40", |b| {
        b.iter(|| polyfit_estimate(black_box(&clean), 4, ConstantMode::Exact))
    });
    c.bench_function("fit_logistic_nlls_40", |b| {
        b.iter(|| fit_logistic_nlls(black_box(&noisy)))
    });
}

criterion_group!(benches, eulerian, roots, estimators);
criterion_main!(benches);
