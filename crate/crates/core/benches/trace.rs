//! Whole-trace evaluation, threaded vs forced-sequential chain passes.
//!
//! The separable fourth-order path fans its ~10² cumulative-integral
//! chains over rayon; the runtime switch lets both modes run in one
//! process so the comparison shares every other cost.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nonmarkov_core::spectral::SpectralParams;
use nonmarkov_core::tcl::{self, TclOrder};

fn bench_trace(c: &mut Criterion) {
    let params = SpectralParams::new(1.0, 0.2, 2.0, 100.0).unwrap();
    let mut group = c.benchmark_group("tcl4_trace");
    group.sample_size(20);
    for points in [100_usize, 400] {
        let grid = tcl::time_grid(30.0, points);
        for (mode, seq) in [("parallel", false), ("sequential", true)] {
            group.bench_with_input(BenchmarkId::new(mode, points), &grid, |b, grid| {
                nonmarkov_core::exec::set_sequential(seq);
                b.iter(|| tcl::evaluate_trace(black_box(&params), grid, TclOrder::Tcl4).unwrap());
            });
        }
    }
    nonmarkov_core::exec::set_sequential(false);
    group.finish();
}

fn bench_second_order(c: &mut Criterion) {
    let params = SpectralParams::new(1.0, 0.2, 2.0, 100.0).unwrap();
    let grid = tcl::time_grid(30.0, 400);
    let mut group = c.benchmark_group("tcl2_trace");
    group.sample_size(30);
    for (mode, seq) in [("parallel", false), ("sequential", true)] {
        group.bench_function(mode, |b| {
            nonmarkov_core::exec::set_sequential(seq);
            b.iter(|| tcl::evaluate_trace(black_box(&params), &grid, TclOrder::Tcl2).unwrap());
        });
    }
    nonmarkov_core::exec::set_sequential(false);
    group.finish();
}

criterion_group!(benches, bench_trace, bench_second_order);
criterion_main!(benches);
