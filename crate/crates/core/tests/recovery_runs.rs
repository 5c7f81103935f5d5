use loadmatch_core::balance::{balanced_loads, load_level_set};
use loadmatch_core::intersect::{intersection_graph, Matching};
use loadmatch_core::model::{sample_correlated_pair, CorrelatedPair, ModelParams};
use loadmatch_core::rational::rat;
use loadmatch_core::recovery::{
    audit_rounds, correct_set, heavy_light_sets, iterative_matching, near_maximizer_gap, AlgoConfig,
    RecoveryResult,
};
use loadmatch_core::VertexSet;
use proptest::prelude::*;

fn run(params: &ModelParams, cfg: &AlgoConfig, seed: u64) -> (CorrelatedPair, RecoveryResult) {
    let pair = sample_correlated_pair(params, seed, false);
    let r = iterative_matching(&pair.g1, &pair.g2, cfg).unwrap();
    (pair, r)
}

fn check_trial(pair: &CorrelatedPair, r: &RecoveryResult, cfg: &AlgoConfig) {
    r.check_structure().unwrap();
    for k in 1..r.rounds.len() {
        assert!(r.u_k(k - 1).is_subset(&r.u_k(k)));
    }
    assert!(r.rounds.iter().all(|t| t.level_set_ok));
    let cor = correct_set(r, &pair.pi_star);
    assert!(cor.is_subset(&r.u_n));
    let (heavy, _) = heavy_light_sets(&pair.pi_star, &pair.g1, &pair.g2, cfg.alpha, cfg.epsilon).unwrap();
    // the heavy set is the exact level set of the threshold used for the gap
    let h = pair.true_intersection();
    let t = cfg.heavy_threshold();
    assert_eq!(heavy, load_level_set(&balanced_loads(&h), t, false));
    let gap = near_maximizer_gap(&pair.pi_star, &pair.g1, &pair.g2, &cor, &heavy, t.recip()).unwrap();
    assert!(gap >= rat(0, 1));
    for a in audit_rounds(&pair.g1, &pair.g2, r, cfg, &pair.pi_star).unwrap() {
        if a.item_iii {
            assert_eq!(a.constraint_ek, Some(true), "round {}", a.k);
        }
    }
}

#[test]
fn structural_invariants_dense_regime() {
    let params = ModelParams::forced(7, 0.6, 0.9).unwrap();
    let cfg = AlgoConfig::new(1.0, 0.1, 0.25, 5.0).unwrap();
    for seed in 0..60 {
        let (pair, r) = run(&params, &cfg, seed);
        check_trial(&pair, &r, &cfg);
    }
}

#[test]
fn structural_invariants_model_regime() {
    let params = ModelParams::derive(7, 0.8, 1.3).unwrap();
    assert!(params.s < 1.0);
    let cfg = AlgoConfig::from_params(&params, 0.1, 0.25).unwrap();
    for seed in 0..40 {
        let (pair, r) = run(&params, &cfg, seed);
        check_trial(&pair, &r, &cfg);
    }
}

#[test]
fn deterministic_reruns() {
    let params = ModelParams::forced(6, 0.6, 0.9).unwrap();
    let cfg = AlgoConfig::new(1.0, 0.1, 0.25, 5.0).unwrap();
    for seed in 0..10 {
        let (_, a) = run(&params, &cfg, seed);
        let (_, b) = run(&params, &cfg, seed);
        assert_eq!(a, b);
        assert_eq!(a.to_report(), b.to_report());
    }
}

#[test]
fn better_than_random_with_full_correlation() {
    // s = 1: the expected overlap of a uniform matching restricted to U_N is |U_N| / n
    let params = ModelParams::forced(7, 0.6, 1.0).unwrap();
    let cfg = AlgoConfig::new(1.0, 0.1, 0.25, 5.0).unwrap();
    let trials = 200;
    let mut excess = Vec::with_capacity(trials);
    for seed in 0..trials as u64 {
        let (pair, r) = run(&params, &cfg, seed);
        let cor = correct_set(&r, &pair.pi_star).len() as f64;
        excess.push(cor - r.u_n.len() as f64 / 7.0);
    }
    let mean = excess.iter().sum::<f64>() / trials as f64;
    let var = excess.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0);
    let se = (var / trials as f64).sqrt();
    assert!(mean + 3.0 * se >= 0.0, "mean excess {mean}, se {se}");
    assert!(mean > 0.0);
}

#[test]
fn truth_is_found_when_graphs_are_identical_and_rigid() {
    // an asymmetric graph with a dense core: any maximizer must match the core
    let g = loadmatch_core::Graph::from_edges(
        6,
        [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5)],
    )
    .unwrap();
    let cfg = AlgoConfig::new(1.0, 0.1, 0.25, 2.0).unwrap();
    let r = iterative_matching(&g, &g, &cfg).unwrap();
    assert_eq!(r.u_n, VertexSet::from([0, 1, 2, 3]));
    let h = intersection_graph(&g, &g, &r.pi_tilde.first_extension(), &r.u_n).unwrap();
    assert_eq!(h.edge_count(), 6);
    let pi = Matching::identity(6);
    assert_eq!(correct_set(&r, &pi), r.u_n);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariants_hold_for_random_instances(seed in any::<u64>(), p in 0.3f64..0.9, s in 0.5f64..1.0) {
        let params = ModelParams::forced(6, p, s).unwrap();
        let cfg = AlgoConfig::new(1.0, 0.1, 0.3, 4.0).unwrap();
        let (pair, r) = run(&params, &cfg, seed);
        check_trial(&pair, &r, &cfg);
    }
}
