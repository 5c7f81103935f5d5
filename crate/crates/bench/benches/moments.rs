use criterion::{criterion_group, criterion_main, Criterion};
use loadmatch_core::moments::{closed_form_moment, exact_dp_moment, monte_carlo_moment, ChainKind, MomentParams};

fn moments(c: &mut Criterion) {
    let m = MomentParams::new(0.3, 0.6, 1.0, 0.5, 0.1).unwrap();
    c.bench_function("closed_form k=12", |b| b.iter(|| closed_form_moment(ChainKind::ConfinedChain, 12, &m)));
    c.bench_function("dp k=12", |b| b.iter(|| exact_dp_moment(ChainKind::ConfinedChain, 12, &m)));
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    g.bench_function("1e5 draws k=12", |b| {
        b.iter(|| monte_carlo_moment(ChainKind::Cycle, 12, &m, 100_000, 7).unwrap())
    });
    g.finish();
}

criterion_group!(benches, moments);
criterion_main!(benches);
