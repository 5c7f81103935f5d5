//! Shared fixtures for the benchmarks under `benches/`.

use loadmatch_core::limitdist::trial_graph;
use loadmatch_core::model::{sample_correlated_pair, CorrelatedPair};
use loadmatch_core::{Graph, ModelParams};

/// `G(n, λ/n)` on a fixed stream.
pub fn sparse_graph(n: usize, lambda: f64) -> Graph {
    trial_graph(n, lambda, 0xbe7c, 0)
}

/// A correlated pair dense enough that recovery rounds select vertices.
pub fn dense_pair(n: usize, seed: u64) -> CorrelatedPair {
    let params = ModelParams::forced(n, 0.6, 0.9).expect("valid parameters");
    sample_correlated_pair(&params, seed, false)
}
