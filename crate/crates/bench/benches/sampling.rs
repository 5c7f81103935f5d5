use criterion::{criterion_group, criterion_main, Criterion};
use loadmatch_core::limitdist::sample_gnp;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gnp(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_gnp");
    g.sample_size(20);
    g.bench_function("n=1e5 lambda=2", |b| {
        b.iter(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            sample_gnp(100_000, 2.0 / 100_000.0, &mut rng)
        })
    });
    g.finish();
}

criterion_group!(benches, gnp);
criterion_main!(benches);
