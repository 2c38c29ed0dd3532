use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use modsetlab::sets::{self, Kernel};
use modsetlab_bench::fixture;

fn sumset_kernels(c: &mut Criterion) {
    let n = 10007usize;
    let mut group = c.benchmark_group("sumset_n10007");
    // |A| around 40, 100, 250, 625, 1250, 2500
    for density in [0.004, 0.01, 0.025, 0.0625, 0.125, 0.25] {
        let a = fixture(n, density, 1);
        for kernel in [Kernel::Dense, Kernel::Sparse] {
            group.bench_with_input(
                BenchmarkId::new(format!("{kernel:?}"), a.len()),
                &a,
                |b, a| b.iter(|| sets::sumset_with(black_box(a), kernel)),
            );
        }
    }
    group.finish();
}

fn difference_kernels(c: &mut Criterion) {
    let n = 1_000_003usize;
    let mut group = c.benchmark_group("difference_n1000003");
    group.sample_size(10);
    for density in [0.0002, 0.001, 0.004] {
        let a = fixture(n, density, 2);
        for kernel in [Kernel::Dense, Kernel::Sparse] {
            group.bench_with_input(
                BenchmarkId::new(format!("{kernel:?}"), a.len()),
                &a,
                |b, a| b.iter(|| sets::difference_set_with(black_box(a), kernel)),
            );
        }
    }
    group.finish();
}

criterion_group!(benches, sumset_kernels, difference_kernels);
criterion_main!(benches);
