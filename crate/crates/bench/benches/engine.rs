use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use daisen_bench::{intervals, store};
use daisen_core::layout::{layout_window, Culling, Viewport};
use daisen_core::sim::{default_config, simulate_to_memory};
use daisen_core::{assign_rows, build_color_key, compute_series, MetricKind};

fn rows(c: &mut Criterion) {
    let mut group = c.benchmark_group("assign_rows");
    for n in [100, 1_000, 10_000] {
        let items = intervals(n);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &items, |b, items| b.iter(|| assign_rows(black_box(items))));
    }
    group.finish();
}

fn queries(c: &mut Criterion) {
    let store = store(200_000);
    let colors = build_color_key(store.tasks(), 16);
    let unit = "GPU1.Unit003";
    let mut group = c.benchmark_group("store");
    for (label, t0, t1) in [("full", 0.0, 1e-3), ("zoom", 4e-4, 4.1e-4)] {
        group.bench_function(BenchmarkId::new("query_window", label), |b| {
            b.iter(|| store.query_window(black_box(unit), t0, t1).unwrap().len())
        });
        group.bench_function(BenchmarkId::new("layout_window", label), |b| {
            let culling = Culling { min_px: 1.0, px_per_second: 1000.0 / (t1 - t0) };
            b.iter(|| layout_window(&store, unit, Viewport::new(t0, t1).unwrap(), culling, &colors).unwrap().bars.len())
        });
        group.bench_function(BenchmarkId::new("compute_series", label), |b| {
            b.iter(|| compute_series(&store, unit, MetricKind::BufferPressure, t0, t1, 500).unwrap())
        });
    }
    group.finish();
}

fn simulator(c: &mut Criterion) {
    let cfg = default_config();
    c.bench_function("simulate/dispatch_bound", |b| b.iter(|| simulate_to_memory(black_box(&cfg)).unwrap().0));
}

criterion_group!(benches, rows, queries, simulator);
criterion_main!(benches);
