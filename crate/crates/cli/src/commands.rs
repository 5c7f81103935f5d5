//! The experiment subcommands. Each resolves its defaults into the config
//! first so that the echo in every output names the values actually used.

use std::path::{Path, PathBuf};

use loadmatch_core::balance::{balanced_loads, load_level_set};
use loadmatch_core::limitdist::{
    empirical_with_maxima, f_lambda, giant_fraction, trial_graph, two_core_fraction, EcdfOptions,
    LoadValue, EXACT_CROSSOVER, REBALANCE_TOL,
};
use loadmatch_core::oracles::{admissibility_check, event_d_check, AdmissibilityParams};
use loadmatch_core::rational::{format_rational, int, to_f64};
use loadmatch_core::recovery::{
    audit_rounds, bayes_optimal_estimate, correct_set, heavy_light_sets, iterative_matching,
    near_maximizer_gap, posterior_marginals, AlgoConfig, BAYES_MAX_N, DEFAULT_N_MAX,
};
use loadmatch_core::model::sample_correlated_pair;
use loadmatch_core::{Graph, ModelParams, Rational};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{meta, ExperimentConfig};
use crate::CliError;

/// Fails before any work is done if the output directory is missing.
pub(crate) fn out_dir(cfg: &ExperimentConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.out_dir();
    if !dir.is_dir() {
        return Err(CliError::Io(format!("output directory {} does not exist", dir.display())));
    }
    Ok(dir)
}

pub(crate) fn write(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_json(dir: &Path, name: &str, v: &Value) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    write(dir, name, &s)
}

/// `meta` with the command's fields appended.
fn document(cfg: &ExperimentConfig, command: &str, body: Value) -> Value {
    let mut m = meta(cfg, command);
    if let (Some(m), Value::Object(b)) = (m.as_object_mut(), body) {
        m.extend(b);
    }
    m
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn edges_json(g: &Graph) -> Value {
    json!(g.edges().iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>())
}

fn rational_json(r: &Rational) -> Value {
    json!({ "exact": format_rational(r), "value": to_f64(r) })
}

/// `p` and `s` set directly when both are given, otherwise derived from
/// `(n, alpha, lambda)`.
fn model_params(cfg: &ExperimentConfig) -> Result<ModelParams, CliError> {
    let n = cfg.n.expect("resolved");
    match (cfg.p, cfg.s) {
        (Some(p), Some(s)) => ModelParams::forced(n, p, s).map_err(usage),
        (None, None) => ModelParams::derive_with(
            n,
            cfg.alpha.expect("resolved"),
            cfg.lambda.expect("resolved"),
            cfg.rho_hat,
            cfg.a,
        )
        .map_err(usage),
        _ => Err(CliError::Usage("--p and --s must be given together".into())),
    }
}

fn model_defaults(cfg: &mut ExperimentConfig, n: usize) {
    cfg.n.get_or_insert(n);
    if cfg.p.is_none() && cfg.s.is_none() {
        cfg.alpha.get_or_insert(0.8);
        cfg.lambda.get_or_insert(1.3);
    }
    cfg.seed.get_or_insert(0);
}

fn read_graph(path: &str) -> Result<Graph, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    Graph::parse_edge_list(&text).map_err(|e| CliError::Usage(format!("{path}: {e}")))
}

/// Seed of trial `t` under `root`.
pub fn trial_seed(root: u64, t: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(t);
    rng.next_u64()
}

fn x_key(x: f64) -> String {
    format!("{x}")
}

pub fn mu_lambda(mut cfg: ExperimentConfig) -> Result<(), CliError> {
    let n = *cfg.n.get_or_insert(100_000);
    let lambda = *cfg.lambda.get_or_insert(2.0);
    let trials = *cfg.trials.get_or_insert(3);
    let crossover = *cfg.crossover.get_or_insert(EXACT_CROSSOVER);
    let seed = *cfg.seed.get_or_insert(0);
    let xs = cfg.x_points.get_or_insert_with(|| vec![0.0, 0.5, 1.0, 1.5, 2.0]).clone();
    if n == 0 || trials == 0 || !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(CliError::Usage(format!("need n > 0, trials > 0, lambda >= 0 (got {n}, {trials}, {lambda})")));
    }
    let dir = out_dir(&cfg)?;
    let opts = EcdfOptions {
        crossover,
        tol: REBALANCE_TOL,
    };
    let (ecdf, maxima) = empirical_with_maxima(n, lambda, trials, seed, opts).map_err(usage)?;
    let mut max_vals: Vec<f64> = maxima.iter().map(LoadValue::to_f64).collect();
    max_vals.sort_by(f64::total_cmp);
    let rho = max_vals[(max_vals.len() - 1) / 2];
    let mut f_at = Map::new();
    for &x in &xs {
        f_at.insert(x_key(x), json!(f_lambda(&ecdf, x)));
    }
    let one = int(1);
    let summary = document(
        &cfg,
        "mu-lambda",
        json!({
            "lambda": lambda,
            "n": n,
            "trials": trials,
            "F_at": f_at,
            "rho_estimate": rho,
            "max_loads": max_vals,
            "mass_below_1": ecdf.mass_below(one),
            "mass_above_1": ecdf.mass_above(one),
            "mass_at_0": ecdf.mass_at(int(0)),
            "giant_oracle": giant_fraction(lambda),
            "two_core_oracle": two_core_fraction(lambda),
        }),
    );
    let csv = format!("# {}\n{}", meta(&cfg, "mu-lambda"), ecdf.to_csv());
    write(&dir, "mu_lambda.csv", &csv)?;
    write_json(&dir, "mu_lambda.json", &summary)
}

struct TrialOutcome {
    record: Value,
    report: String,
    u_n: usize,
    u_cor: usize,
    bayes: Option<f64>,
    problem: Option<String>,
}

pub fn recover(mut cfg: ExperimentConfig) -> Result<(), CliError> {
    model_defaults(&mut cfg, 7);
    let eps = *cfg.epsilon.get_or_insert(0.1);
    let eta = *cfg.eta.get_or_insert(0.25);
    let trials = *cfg.trials.get_or_insert(100);
    let n_max = *cfg.n_max.get_or_insert(DEFAULT_N_MAX);
    let n = cfg.n.expect("resolved");
    if n > n_max {
        return Err(CliError::Usage(format!("n = {n} exceeds n_max = {n_max}")));
    }
    let params = model_params(&cfg)?;
    let algo = AlgoConfig::new(cfg.alpha.unwrap_or(params.alpha), eps, eta, cfg.a.unwrap_or(params.a))
        .map_err(usage)?
        .with_n_max(n_max);
    let dir = out_dir(&cfg)?;
    let root = cfg.seed();
    let outcomes: Vec<TrialOutcome> = (0..trials as u64)
        .into_par_iter()
        .map(|t| recover_trial(&params, &algo, t, trial_seed(root, t)))
        .collect::<Result<_, _>>()?;

    let header = meta(&cfg, "recover");
    let mut jsonl = format!("{header}\n");
    let mut report = format!("# {header}\n");
    for o in &outcomes {
        jsonl.push_str(&o.record.to_string());
        jsonl.push('\n');
        report.push_str(&o.report);
    }
    let tf = trials.max(1) as f64;
    let nonempty: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.u_n > 0).collect();
    let cor_ratio = (!nonempty.is_empty()).then(|| {
        nonempty.iter().map(|o| o.u_cor as f64 / o.u_n as f64).sum::<f64>() / nonempty.len() as f64
    });
    let bayes: Vec<f64> = outcomes.iter().filter_map(|o| o.bayes).collect();
    let problems: Vec<&String> = outcomes.iter().filter_map(|o| o.problem.as_ref()).collect();
    let summary = document(
        &cfg,
        "recover",
        json!({
            "trials": trials,
            "p": params.p,
            "s": params.s,
            "a": algo.a,
            "n_rounds": algo.n_rounds,
            "intervals": algo.intervals.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
            "mean_u_n": outcomes.iter().map(|o| o.u_n as f64).sum::<f64>() / tf,
            "mean_u_cor": outcomes.iter().map(|o| o.u_cor as f64).sum::<f64>() / tf,
            "mean_cor_ratio": cor_ratio,
            "trials_with_nonempty_u_n": nonempty.len(),
            "mean_bayes_overlap": (!bayes.is_empty()).then(|| bayes.iter().sum::<f64>() / bayes.len() as f64),
            "invariant_failures": problems.len(),
        }),
    );
    write(&dir, "recover.jsonl", &jsonl)?;
    write_json(&dir, "recover_summary.json", &summary)?;
    write(&dir, "recover_report.txt", &report)?;
    match problems.first() {
        Some(p) => Err(CliError::Invariant(p.to_string())),
        None => Ok(()),
    }
}

fn recover_trial(params: &ModelParams, algo: &AlgoConfig, t: u64, seed: u64) -> Result<TrialOutcome, CliError> {
    let pair = sample_correlated_pair(params, seed, false);
    let (g1, g2, pi_star) = (&pair.g1, &pair.g2, &pair.pi_star);
    let r = iterative_matching(g1, g2, algo).map_err(usage)?;
    let mut problem = r.check_structure().err();
    let cor = correct_set(&r, pi_star);
    if !cor.is_subset(&r.u_n) {
        problem.get_or_insert_with(|| "correct set not inside U_N".into());
    }
    let (heavy, light) = heavy_light_sets(pi_star, g1, g2, algo.alpha, algo.epsilon)
        .map_err(|e| CliError::Invariant(e.to_string()))?;
    let thr = algo.heavy_threshold();
    let level = load_level_set(&balanced_loads(&pair.true_intersection()), thr, false);
    let heavy_is_level = heavy == level;
    let gap = near_maximizer_gap(pi_star, g1, g2, &cor, &heavy, thr.recip())
        .map_err(|e| CliError::Invariant(e.to_string()))?;
    if heavy_is_level && gap < int(0) {
        problem.get_or_insert_with(|| format!("negative near-maximizer gap {gap}"));
    }
    let audits = audit_rounds(g1, g2, &r, algo, pi_star).map_err(|e| CliError::Invariant(e.to_string()))?;
    let item_iii = audits.iter().filter(|a| a.item_iii).count();
    let ek_fail: Vec<usize> = audits
        .iter()
        .filter(|a| a.constraint_ek == Some(false))
        .map(|a| a.k)
        .collect();
    if let Some(k) = ek_fail.first() {
        problem.get_or_insert_with(|| format!("edge-count constraint fails in round {k}"));
    }
    let bayes = if params.n <= BAYES_MAX_N && (params.s == 1.0 || !params.is_degenerate()) {
        Some(bayes_optimal_estimate(g1, g2, params).map_err(usage)?.1)
    } else {
        None
    };
    if let Some(p) = &mut problem {
        *p = format!("trial {t}: {p}");
    }
    let record = json!({
        "trial": t,
        "seed": seed,
        "u_n_size": r.u_n.len(),
        "u_cor_size": cor.len(),
        "overlap": cor.len() as f64 / params.n as f64,
        "u_n": r.u_n.as_slice(),
        "pi_tilde": r.pi_tilde.pairs(),
        "heavy_size": heavy.len(),
        "light_size": light.len(),
        "heavy_is_level_set": heavy_is_level,
        "near_maximizer_gap": rational_json(&gap),
        "bayes_expected_overlap": bayes,
        "level_set_ok": r.rounds.iter().all(|k| k.level_set_ok),
        "round0_bound_ok": r.round0_bound_ok,
        "item_iii_rounds": item_iii,
        "constraint_ek_failures": ek_fail,
    });
    Ok(TrialOutcome {
        record,
        report: format!("trial {t} seed {seed}\n{}", r.to_report()),
        u_n: r.u_n.len(),
        u_cor: cor.len(),
        bayes,
        problem,
    })
}

pub fn posterior(mut cfg: ExperimentConfig) -> Result<(), CliError> {
    model_defaults(&mut cfg, 6);
    let n = cfg.n.expect("resolved");
    if n > BAYES_MAX_N {
        return Err(CliError::Usage(format!("n = {n} exceeds {BAYES_MAX_N}")));
    }
    let params = model_params(&cfg)?;
    let dir = out_dir(&cfg)?;
    let pair = sample_correlated_pair(&params, cfg.seed(), false);
    let m = posterior_marginals(&pair.g1, &pair.g2, &params).map_err(usage)?;
    let (est, expected) = bayes_optimal_estimate(&pair.g1, &pair.g2, &params).map_err(usage)?;
    let realized = (0..n).filter(|&i| est.apply(i) == pair.pi_star.apply(i)).count();
    let doc = document(
        &cfg,
        "posterior",
        json!({
            "n": n,
            "p": params.p,
            "s": params.s,
            "pi_star": pair.pi_star.image(),
            "g1": edges_json(&pair.g1),
            "g2": edges_json(&pair.g2),
            "marginals": m,
            "bayes_estimate": est.image(),
            "expected_overlap": expected,
            "realized_overlap": realized,
        }),
    );
    write_json(&dir, "posterior.json", &doc)
}

pub fn sample(mut cfg: ExperimentConfig) -> Result<(), CliError> {
    model_defaults(&mut cfg, 10);
    let params = model_params(&cfg)?;
    let dir = out_dir(&cfg)?;
    let pair = sample_correlated_pair(&params, cfg.seed(), false);
    let h = pair.true_intersection();
    let loads: Vec<String> = balanced_loads(&h).loads.iter().map(format_rational).collect();
    let doc = document(
        &cfg,
        "sample",
        json!({
            "params": {
                "n": params.n, "alpha": params.alpha, "lambda": params.lambda,
                "p": params.p, "s": params.s,
                "big_p": params.big_p, "big_q": params.big_q, "big_r": params.big_r,
                "gamma": params.gamma, "rho_hat": params.rho_hat, "a": params.a,
            },
            "pi_star": pair.pi_star.image(),
            "g1": edges_json(&pair.g1),
            "g2": edges_json(&pair.g2),
            "intersection": edges_json(&h),
            "intersection_loads": loads,
        }),
    );
    write_json(&dir, "sample.json", &doc)
}

/// The graph named by `--graph`, or the true intersection of a sampled pair.
fn subject_graph(cfg: &mut ExperimentConfig, default_n: usize) -> Result<Graph, CliError> {
    match cfg.graph.clone() {
        Some(path) => {
            cfg.seed.get_or_insert(0);
            read_graph(&path)
        }
        None => {
            model_defaults(cfg, default_n);
            let params = model_params(cfg)?;
            Ok(sample_correlated_pair(&params, cfg.seed(), false).true_intersection())
        }
    }
}

pub fn admissible_check(mut cfg: ExperimentConfig) -> Result<(), CliError> {
    let eps = *cfg.epsilon.get_or_insert(0.1);
    let h = subject_graph(&mut cfg, 10)?;
    let mut ap = AdmissibilityParams::defaults(h.n(), eps).map_err(usage)?;
    macro_rules! take {
        ($($f:ident),*) => { $( ap.$f = *cfg.$f.get_or_insert(ap.$f); )* };
    }
    take!(
        max_degree_cap, d_n, neighborhood_radius, small_subgraph_cap, cycle_count_base,
        cycle_length_cap, c_param, exclude_self, node_budget
    );
    if let Some(alpha) = cfg.alpha {
        ap.validate(alpha, eps).map_err(usage)?;
    }
    let dir = out_dir(&cfg)?;
    let rep = admissibility_check(&h, &ap).map_err(usage)?;
    let violation = rep.first_violation.as_ref().map(|v| json!({ "tag": v.tag(), "detail": format!("{v:?}") }));
    let doc = document(
        &cfg,
        "admissible-check",
        json!({
            "n": h.n(),
            "edges": h.edge_count(),
            "graph": edges_json(&h),
            "ok": rep.ok,
            "first_violation": violation,
        }),
    );
    write_json(&dir, "admissible.json", &doc)
}

pub fn event_d(mut cfg: ExperimentConfig) -> Result<(), CliError> {
    let g = match cfg.graph.clone() {
        Some(path) => read_graph(&path)?,
        None => {
            let n = *cfg.n.get_or_insert(16);
            let lambda = *cfg.lambda.get_or_insert(2.0);
            if n == 0 || !(lambda >= 0.0 && lambda.is_finite()) {
                return Err(CliError::Usage(format!("n = {n}, lambda = {lambda}")));
            }
            trial_graph(n, lambda, *cfg.seed.get_or_insert(0), 0)
        }
    };
    cfg.seed.get_or_insert(0);
    let d = *cfg.d.get_or_insert(2.0);
    let delta = *cfg.delta.get_or_insert(0.1);
    if !(d >= 0.0 && delta >= 0.0) {
        return Err(CliError::Usage(format!("d = {d}, delta = {delta}")));
    }
    let dir = out_dir(&cfg)?;
    let res = event_d_check(&g, d, delta, cfg.seed());
    let doc = document(
        &cfg,
        "event-d",
        json!({
            "n": g.n(),
            "edges": g.edge_count(),
            "holds": res.holds,
            "sampled": res.sampled,
            "witness": res.witness.as_ref().map(|w| w.as_slice().to_vec()),
        }),
    );
    write_json(&dir, "event_d.json", &doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trial_seeds_differ_and_repeat() {
        assert_eq!(trial_seed(5, 3), trial_seed(5, 3));
        assert_ne!(trial_seed(5, 3), trial_seed(5, 4));
        assert_ne!(trial_seed(5, 3), trial_seed(6, 3));
    }

    #[test]
    fn partial_p_s_rejected() {
        let cfg = ExperimentConfig {
            n: Some(5),
            p: Some(0.5),
            ..Default::default()
        };
        assert!(matches!(model_params(&cfg), Err(CliError::Usage(_))));
    }

    #[test]
    fn missing_dir_is_io() {
        let cfg = ExperimentConfig {
            out: Some("/nonexistent/loadmatch".into()),
            ..Default::default()
        };
        assert!(matches!(out_dir(&cfg), Err(CliError::Io(_))));
    }
}
