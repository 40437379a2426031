//! Parallel vs sequential timing of the verification work loads. The
//! sequential path is always compiled; the rayon path is benchmarked when
//! the `parallel` feature (default) is on.

use criterion::{criterion_group, criterion_main, Criterion};
use qcoloring::chebyshev::CoeffTable;
use qcoloring::measure::CylinderMeasure;
use qcoloring::verify::{
    check_coeff_identities, check_consistency, check_rationality_positivity, check_symmetries,
    ExecMode,
};
use std::hint::black_box;

fn modes() -> Vec<(&'static str, ExecMode)> {
    let mut v = vec![("seq", ExecMode::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("par", ExecMode::Parallel));
    v
}

fn bench_coeff_identities(c: &mut Criterion) {
    let mut group = c.benchmark_group("coeff_identities_q7_mn20_jkl10");
    group.sample_size(10);
    for (name, mode) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| {
                let table = CoeffTable::new(7).unwrap();
                let report = check_coeff_identities(&table, 20, 10, mode);
                assert!(report.passed());
                black_box(report.checks_run)
            })
        });
    }
    group.finish();
}

fn bench_rationality_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("rationality_scan_q6_len5");
    group.sample_size(10);
    for (name, mode) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| {
                // fresh measure each iteration: cold memo is the workload
                let m = CylinderMeasure::new(6).unwrap();
                let report = check_rationality_positivity(&m, 5, mode);
                assert!(report.passed());
                black_box(report.checks_run)
            })
        });
    }
    group.finish();
}

fn bench_consistency(c: &mut Criterion) {
    let mut group = c.benchmark_group("consistency_q5_len5");
    group.sample_size(10);
    for (name, mode) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| {
                let m = CylinderMeasure::new(5).unwrap();
                let report = check_consistency(&m, 5, mode);
                assert!(report.passed());
                black_box(report.checks_run)
            })
        });
    }
    group.finish();
}

fn bench_symmetries(c: &mut Criterion) {
    let mut group = c.benchmark_group("symmetries_q4_len6");
    group.sample_size(10);
    for (name, mode) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| {
                let m = CylinderMeasure::new(4).unwrap();
                let report = check_symmetries(&m, 6, 20, 7, mode);
                assert!(report.passed());
                black_box(report.checks_run)
            })
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_coeff_identities,
    bench_rationality_scan,
    bench_consistency,
    bench_symmetries
);
criterion_main!(benches);
