//! Invariant suites run by `loadmatch verify <suite>`. Each property yields
//! one JSONL record; `--mutate <suite|all>` corrupts the suite's solver so
//! the harness itself can be checked.

use loadmatch_core::balance::{ft_max_set, ft_value, load_level_set};
use loadmatch_core::graph::pair_from_index;
use loadmatch_core::intersect::Matching;
use loadmatch_core::limitdist::{approximate_loads, exact_load_values, max_load_samples, trial_graph, LoadValue};
use loadmatch_core::model::{pair_ratio_identity, posterior_exact, sample_correlated_pair};
use loadmatch_core::moments::{closed_form_moment, exact_dp_moment, ChainKind, MomentParams};
use loadmatch_core::oracles::{connected_nonisomorphic_graphs, ft_bruteforce, loads_qp_oracle};
use loadmatch_core::orbits::{decompose_orbits, OrbitDecomposition};
use loadmatch_core::rational::{format_rational, int, rat, to_f64};
use loadmatch_core::recovery::{correct_set, iterative_matching, AlgoConfig, RecoveryResult};
use loadmatch_core::{balanced_loads, Graph, ModelParams, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::commands::{out_dir, write};
use crate::config::{meta, ExperimentConfig};
use crate::CliError;

pub const SUITES: [&str; 5] = ["balance", "orbits", "model", "recovery", "limit"];

#[derive(Clone, Debug, PartialEq)]
pub struct Property {
    pub name: String,
    pub witness: Option<String>,
}

impl Property {
    fn check(name: &str, witness: Option<String>) -> Self {
        Property {
            name: name.into(),
            witness,
        }
    }

    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({ "name": self.name, "status": if self.passed() { "pass" } else { "fail" } });
        if let Some(w) = &self.witness {
            v["witness"] = json!(w);
        }
        v
    }
}

/// Runs one suite. The JSONL goes to stdout, and to `verify_<suite>.jsonl`
/// when `--out` was given.
pub fn run_verify(suite: &str, cfg: ExperimentConfig) -> Result<(), CliError> {
    if !SUITES.contains(&suite) {
        return Err(CliError::Usage(format!("unknown suite {suite}; expected one of {}", SUITES.join(", "))));
    }
    let mutate = match cfg.mutate.as_deref() {
        None => false,
        Some(m) if m == suite || m == "all" => true,
        Some(m) if SUITES.contains(&m) => false,
        Some(m) => return Err(CliError::Usage(format!("unknown mutation target {m}"))),
    };
    let dir = cfg.out.is_some().then(|| out_dir(&cfg)).transpose()?;
    let props = run_suite(suite, cfg.seed(), mutate);
    let mut body = String::new();
    for p in &props {
        body.push_str(&p.to_json().to_string());
        body.push('\n');
    }
    print!("{body}");
    if let Some(dir) = dir {
        let mut cfg = cfg.clone();
        cfg.seed.get_or_insert(0);
        write(&dir, &format!("verify_{suite}.jsonl"), &format!("{}\n{body}", meta(&cfg, "verify")))?;
    }
    match props.iter().find(|p| !p.passed()) {
        Some(p) => Err(CliError::Invariant(format!("property {} failed", p.name))),
        None => Ok(()),
    }
}

pub fn run_suite(suite: &str, seed: u64, mutate: bool) -> Vec<Property> {
    match suite {
        "balance" => balance_suite(seed, mutate),
        "orbits" => orbits_suite(seed, mutate),
        "model" => model_suite(seed, mutate),
        "recovery" => recovery_suite(seed, mutate),
        "limit" => limit_suite(seed, mutate),
        _ => unreachable!("suite names are checked by the caller"),
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let q = rng.random_range(0.15..0.7);
    let edges: Vec<_> = (0..n * (n - 1) / 2)
        .filter(|_| rng.random_bool(q))
        .map(pair_from_index)
        .collect();
    Graph::from_edges(n, edges).expect("valid pairs")
}

fn show(g: &Graph) -> String {
    format!("n={} edges={:?}", g.n(), g.edges())
}

fn first_failure<T>(items: impl IntoIterator<Item = T>, f: impl FnMut(T) -> Option<String>) -> Option<String> {
    items.into_iter().find_map(f)
}

fn balance_suite(seed: u64, mutate: bool) -> Vec<Property> {
    let solve = |g: &Graph| {
        let mut loads = balanced_loads(g).loads;
        if mutate && g.edge_count() > 0 {
            loads[0] += rat(1, 2);
        }
        loads
    };
    let mut rng = rng_for(seed, 0);
    let graphs: Vec<Graph> = (0..120)
        .map(|_| {
            let n = rng.random_range(2..=10);
            random_graph(&mut rng, n)
        })
        .collect();
    let mut out = Vec::new();

    out.push(Property::check(
        "conservation",
        first_failure(&graphs, |g| {
            let sum: Rational = solve(g).iter().sum();
            (sum != int(g.edge_count() as i64)).then(|| format!("{} load sum {sum}", show(g)))
        }),
    ));
    out.push(Property::check(
        "qp_oracle_agreement",
        first_failure(&graphs, |g| {
            let q = loads_qp_oracle(g, 1e-13).ok()?;
            let e = solve(g);
            (0..g.n())
                .find(|&v| (to_f64(&e[v]) - q[v]).abs() > 1e-7)
                .map(|v| format!("{} vertex {v}: exact {} qp {}", show(g), e[v], q[v]))
        }),
    ));
    out.push(Property::check(
        "variational_maximizer",
        first_failure(graphs.iter().take(60).enumerate(), |(i, g)| {
            let t = rat(1 + (i as i64 % 7), 1 + (i as i64 % 4));
            let set = ft_max_set(g, t).ok()?;
            let (val, brute) = ft_bruteforce(g, t).ok()?;
            let got = ft_value(g, t, &set).ok()?;
            (got != val || set != brute).then(|| format!("{} t={t}: flow {got} brute {val}", show(g)))
        }),
    ));
    let small: Vec<Graph> = (2..=6).flat_map(|n| connected_nonisomorphic_graphs(n).unwrap_or_default()).collect();
    out.push(Property::check(
        "load_one_levels",
        first_failure(&small, |g| {
            let profile = loadmatch_core::LoadProfile {
                loads: solve(g),
                blocks: Vec::new(),
            };
            let below = load_level_set(&profile, int(1), false);
            let below: Vec<usize> = (0..g.n()).filter(|v| !below.contains(*v)).collect();
            let above = load_level_set(&profile, int(1), true);
            (below != g.tree_components().as_slice() || above != g.two_cores_of_nonsimple_components())
                .then(|| show(g))
        }),
    ));
    out.push(Property::check(
        "edge_addition_monotone",
        first_failure(graphs.iter().take(100), |g| {
            let n = g.n();
            let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
            if i == j || g.has_edge(i, j) {
                return None;
            }
            let before = solve(g);
            let after = solve(&g.with_edge(i, j).ok()?);
            (0..n)
                .find(|&v| after[v] < before[v])
                .map(|v| format!("{} + ({i},{j}): vertex {v} {} -> {}", show(g), before[v], after[v]))
        }),
    ));
    out
}

fn orbits_suite(seed: u64, mutate: bool) -> Vec<Property> {
    let decompose = |a: &Matching, b: &Matching| -> OrbitDecomposition {
        let mut d = decompose_orbits(a, b).expect("sizes agree");
        if mutate {
            d.orbits.pop();
        }
        d
    };
    let mut rng = rng_for(seed, 1);
    let mut random_perm = |n: usize| {
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(&mut rng);
        Matching::new(v).expect("permutation")
    };
    let pairs: Vec<(Matching, Matching)> = (0..150)
        .map(|i| {
            let n = 2 + i % 30;
            (random_perm(n), random_perm(n))
        })
        .collect();
    let decomps: Vec<_> = pairs.iter().map(|(a, b)| (a, b, decompose(a, b))).collect();
    let mut out = Vec::new();
    out.push(Property::check(
        "pair_partition",
        first_failure(&decomps, |(a, _, d)| {
            let n = a.n();
            (d.pair_count() != n * (n - 1) / 2).then(|| format!("n={n}: {} pairs covered", d.pair_count()))
        }),
    ));
    out.push(Property::check(
        "successor_and_length_laws",
        first_failure(&decomps, |(a, b, d)| {
            d.check_laws()
                .err()
                .map(|e| format!("pi*={:?} pi={:?}: {e}", a.image(), b.image()))
        }),
    ));
    out.push(Property::check(
        "census_counts_vertices",
        first_failure(&decomps, |(a, _, d)| {
            let total: usize = d.census.iter().sum();
            (total != a.n()).then(|| format!("n={} census total {total}", a.n()))
        }),
    ));
    let grid = [0.2, 0.5, 0.8];
    let mut cf = None;
    'grid: for &p in &grid {
        for &s in &grid {
            for &theta in &[-0.5, 0.7, 1.5] {
                let mp = match MomentParams::new(p, s, theta, 0.8, 0.1) {
                    Ok(m) => m,
                    Err(_) => continue,
                };
                for kind in [ChainKind::Cycle, ChainKind::FreeChain, ChainKind::ConfinedChain] {
                    for k in 1..=8 {
                        let (Ok(c), Ok(d)) = (closed_form_moment(kind, k, &mp), exact_dp_moment(kind, k, &mp)) else {
                            continue;
                        };
                        let c = if mutate { c * 1.01 } else { c };
                        if (c - d).abs() > 1e-9 * d.abs() {
                            cf = Some(format!("{kind:?} k={k} p={p} s={s} theta={theta}: {c} vs {d}"));
                            break 'grid;
                        }
                    }
                }
            }
        }
    }
    out.push(Property::check("closed_form_matches_dp", cf));
    out
}

fn model_suite(seed: u64, mutate: bool) -> Vec<Property> {
    let mut out = Vec::new();
    let mut worst = None;
    'sweep: for &p in &[0.05, 0.2, 0.4, 0.6, 0.8] {
        for &s in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let mut params = ModelParams::forced(20, p, s).expect("in range");
            if mutate {
                params.big_p *= 1.001;
            }
            for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
                let (l, r) = pair_ratio_identity(a, b, &params).expect("nondegenerate");
                if (l - r).abs() > 1e-12 * r.abs() {
                    worst = Some(format!("p={p} s={s} bits=({a},{b}): {l} vs {r}"));
                    break 'sweep;
                }
            }
        }
    }
    out.push(Property::check("pair_ratio_identity", worst));

    let params = ModelParams::forced(6, 0.5, 0.7).expect("in range");
    out.push(Property::check(
        "posterior_weight_ratios",
        first_failure(0..5u64, |t| {
            let pair = sample_correlated_pair(&params, seed.wrapping_add(t), false);
            let tab = posterior_exact(&pair.g1, &pair.g2, &params).ok()?;
            let lp = params.big_p.ln();
            (1..tab.perms.len()).find_map(|k| {
                let got = tab.log_weights[k] - tab.log_weights[0];
                let want = (tab.edge_counts[k] as f64 - tab.edge_counts[0] as f64) * lp;
                ((got - want).abs() > 1e-9).then(|| format!("seed {} perm {k}: {got} vs {want}", seed.wrapping_add(t)))
            })
        }),
    ));
    out.push(Property::check(
        "sampler_deterministic",
        first_failure(0..5u64, |t| {
            let a = sample_correlated_pair(&params, seed.wrapping_add(t), false);
            let b = sample_correlated_pair(&params, seed.wrapping_add(t), false);
            (a != b).then(|| format!("seed {}", seed.wrapping_add(t)))
        }),
    ));
    out.push(Property::check(
        "intersection_inside_both",
        first_failure(0..20u64, |t| {
            let pair = sample_correlated_pair(&params, seed.wrapping_add(t), false);
            let h = pair.true_intersection();
            h.edges()
                .iter()
                .find(|&&(i, j)| {
                    !pair.g1.has_edge(i, j) || !pair.g2.has_edge(pair.pi_star.apply(i), pair.pi_star.apply(j))
                })
                .map(|e| format!("seed {} edge {e:?}", seed.wrapping_add(t)))
        }),
    ));
    out
}

fn recovery_suite(seed: u64, mutate: bool) -> Vec<Property> {
    let params = ModelParams::forced(7, 0.6, 0.9).expect("in range");
    let cfg = AlgoConfig::new(1.0, 0.1, 0.25, 5.0).expect("valid");
    let solve = |g1: &Graph, g2: &Graph| -> RecoveryResult {
        let mut r = iterative_matching(g1, g2, &cfg).expect("n within limits");
        if mutate {
            let extra = (0..r.n).find(|&v| !r.u_n.contains(v)).unwrap_or(0);
            r.u_n.insert(extra);
        }
        r
    };
    let trials: Vec<_> = (0..20u64)
        .map(|t| {
            let pair = sample_correlated_pair(&params, seed.wrapping_add(t), false);
            let r = solve(&pair.g1, &pair.g2);
            (t, pair, r)
        })
        .collect();
    let mut out = Vec::new();
    out.push(Property::check(
        "structure",
        first_failure(&trials, |(t, _, r)| r.check_structure().err().map(|e| format!("trial {t}: {e}"))),
    ));
    out.push(Property::check(
        "correct_set_inside_u_n",
        first_failure(&trials, |(t, pair, r)| {
            (!correct_set(r, &pair.pi_star).is_subset(&r.u_n)).then(|| format!("trial {t}"))
        }),
    ));
    out.push(Property::check(
        "level_set_consistency",
        first_failure(&trials, |(t, _, r)| {
            r.rounds.iter().find(|k| !k.level_set_ok).map(|k| format!("trial {t} round {}", k.k))
        }),
    ));
    out.push(Property::check(
        "deterministic",
        first_failure(trials.iter().take(5), |(t, pair, r)| {
            (solve(&pair.g1, &pair.g2) != *r).then(|| format!("trial {t}"))
        }),
    ));
    out
}

fn limit_suite(seed: u64, mutate: bool) -> Vec<Property> {
    let approx = |g: &Graph| -> Vec<f64> {
        let v = approximate_loads(g, 1e-6).expect("converges");
        v.iter().map(|x| x.to_f64() + if mutate { 1e-3 } else { 0.0 }).collect()
    };
    let n = 2000;
    let mut out = Vec::new();
    out.push(Property::check(
        "tier_agreement",
        first_failure(0..2u64, |t| {
            let g = trial_graph(n, 2.0, seed, t);
            let a = approx(&g);
            let e: Vec<f64> = exact_load_values(&g).iter().map(LoadValue::to_f64).collect();
            (0..n)
                .find(|&v| (a[v] - e[v]).abs() > 1e-6)
                .map(|v| format!("trial {t} vertex {v}: approx {} exact {}", a[v], e[v]))
        }),
    ));
    out.push(Property::check(
        "max_load_is_densest_density",
        match max_load_samples(n, 2.0, 2, seed) {
            Ok(s) => first_failure(s.iter().enumerate(), |(t, (m, d))| {
                (m != d).then(|| format!("trial {t}: max load {} density {}", format_rational(m), format_rational(d)))
            }),
            Err(e) => Some(e.to_string()),
        },
    ));
    out.push(Property::check(
        "load_one_masses",
        first_failure(0..2u64, |t| {
            let g = trial_graph(n, 2.0, seed, t);
            let loads = exact_load_values(&g);
            let below = (0..n).filter(|&v| loads[v].to_f64() < 1.0).count();
            let trees = g.tree_components().len();
            (below != trees).then(|| format!("trial {t}: {below} below 1, {trees} tree vertices"))
        }),
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn healthy_suites_pass() {
        for s in ["balance", "orbits", "model", "recovery"] {
            let props = run_suite(s, 7, false);
            assert!(props.iter().all(Property::passed), "{s}: {props:?}");
        }
    }

    #[test]
    fn mutations_are_caught() {
        for s in ["balance", "orbits", "model", "recovery"] {
            let props = run_suite(s, 7, true);
            let failed: Vec<_> = props.iter().filter(|p| !p.passed()).collect();
            assert!(!failed.is_empty(), "{s}");
            assert!(failed.iter().all(|p| p.witness.as_ref().is_some_and(|w| !w.is_empty())));
        }
    }

    #[test]
    fn unknown_suite_is_usage() {
        let err = run_verify("nope", ExperimentConfig::default()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
