use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use loadmatch_bench::sparse_graph;
use loadmatch_core::balanced_loads;
use loadmatch_core::limitdist::approximate_loads;

fn loads(c: &mut Criterion) {
    let mut g = c.benchmark_group("balanced_loads");
    g.sample_size(10);
    for n in [1_000, 10_000] {
        let graph = sparse_graph(n, 2.0);
        g.bench_with_input(BenchmarkId::new("exact", n), &graph, |b, gr| b.iter(|| balanced_loads(gr)));
        g.bench_with_input(BenchmarkId::new("rebalancing", n), &graph, |b, gr| {
            b.iter(|| approximate_loads(gr, 1e-6).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, loads);
criterion_main!(benches);
