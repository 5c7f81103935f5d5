use loadmatch_core::balance::{
    balanced_allocation, balanced_loads, ft_max_set, ft_value, is_balanced, load_level_set,
};
use loadmatch_core::oracles::{ft_bruteforce, loads_qp_oracle, nonisomorphic_graphs};
use loadmatch_core::graph::pair_from_index;
use loadmatch_core::rational::{rat, to_f64};
use loadmatch_core::{Graph, Rational, VertexSet};
use proptest::prelude::*;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let edges = bits
                .into_iter()
                .enumerate()
                .filter(|(_, b)| *b)
                .map(|(k, _)| pair_from_index(k));
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

fn arb_t() -> impl Strategy<Value = Rational> {
    (1i64..=14, 1i64..=14).prop_map(|(a, b)| rat(a, b))
}

#[test]
fn exact_loads_match_qp_on_small_graphs() {
    for n in 1..=6 {
        for g in nonisomorphic_graphs(n).unwrap() {
            let p = balanced_loads(&g);
            let q = loads_qp_oracle(&g, 1e-13).unwrap();
            for v in 0..n {
                assert!((to_f64(&p.loads[v]) - q[v]).abs() < 1e-7, "{g:?}");
            }
        }
    }
}

#[test]
fn load_one_characterization_small() {
    for n in 1..=6 {
        for g in nonisomorphic_graphs(n).unwrap() {
            let p = balanced_loads(&g);
            let below: VertexSet = (0..n).filter(|&v| p.loads[v] < rat(1, 1)).collect();
            let above = load_level_set(&p, rat(1, 1), true);
            assert_eq!(below, g.tree_components());
            assert_eq!(above, g.two_cores_of_nonsimple_components());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conservation_and_validity(g in arb_graph(12)) {
        let p = balanced_loads(&g);
        prop_assert!(p.validate(&g).is_ok());
        let total: Rational = p.loads.iter().sum();
        prop_assert_eq!(total, rat(g.edge_count() as i64, 1));
    }

    #[test]
    fn variational_maximizer(g in arb_graph(10), t in arb_t()) {
        let set = ft_max_set(&g, t).unwrap();
        let (val, brute) = ft_bruteforce(&g, t).unwrap();
        prop_assert_eq!(&set, &brute);
        prop_assert_eq!(ft_value(&g, t, &set).unwrap(), val);
        let p = balanced_loads(&g);
        prop_assert_eq!(load_level_set(&p, t.recip(), false), set);
    }

    #[test]
    fn superset_clause(g in arb_graph(10), t in arb_t(), w in any::<u64>()) {
        let u = ft_max_set(&g, t).unwrap();
        let w = VertexSet::from_bits(w & ((1u64 << g.n()) - 1), g.n());
        prop_assert!(ft_value(&g, t, &u.union(&w)).unwrap() >= ft_value(&g, t, &w).unwrap());
    }

    #[test]
    fn edge_addition_is_monotone(g in arb_graph(12), i in 0usize..12, j in 0usize..12) {
        let (i, j) = (i % g.n(), j % g.n());
        prop_assume!(i != j);
        let before = balanced_loads(&g);
        let after = balanced_loads(&g.with_edge(i, j).unwrap());
        for v in 0..g.n() {
            prop_assert!(after.loads[v] >= before.loads[v]);
        }
    }

    #[test]
    fn relabeling_permutes_loads(g in arb_graph(10), seed in any::<u64>()) {
        let n = g.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let p = balanced_loads(&g);
        let q = balanced_loads(&g.relabel(&perm));
        for v in 0..n {
            prop_assert_eq!(p.loads[v], q.loads[perm[v]]);
        }
    }

    #[test]
    fn reconstructed_allocation_balanced(g in arb_graph(12)) {
        let p = balanced_loads(&g);
        let a = balanced_allocation(&g, &p).unwrap();
        prop_assert_eq!(a.loads(&g).unwrap(), p.loads.clone());
        prop_assert!(is_balanced(&g, &a).unwrap().balanced);
    }

    #[test]
    fn markov_count(g in arb_graph(12), c in arb_t()) {
        let p = balanced_loads(&g);
        let count = load_level_set(&p, c, false).len() as i64;
        prop_assert!(rat(count, 1) * c <= rat(g.edge_count() as i64, 1));
    }

    #[test]
    fn profile_text_round_trip(g in arb_graph(12)) {
        let p = balanced_loads(&g);
        let text = p.to_text();
        let back = loadmatch_core::LoadProfile::parse_text(&text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        prop_assert_eq!(back, p);
    }
}
