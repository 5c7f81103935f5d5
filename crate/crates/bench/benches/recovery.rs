use criterion::{criterion_group, criterion_main, Criterion};
use loadmatch_bench::dense_pair;
use loadmatch_core::recovery::{iterative_matching, AlgoConfig};

fn recover(c: &mut Criterion) {
    let cfg = AlgoConfig::new(1.0, 0.1, 0.25, 5.0).unwrap();
    let mut g = c.benchmark_group("iterative_matching");
    g.sample_size(10);
    for n in [6, 7] {
        let pair = dense_pair(n, 1);
        g.bench_function(format!("n={n}"), |b| b.iter(|| iterative_matching(&pair.g1, &pair.g2, &cfg).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, recover);
criterion_main!(benches);
