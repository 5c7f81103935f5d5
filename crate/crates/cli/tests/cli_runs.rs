use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn loadmatch(args: &[&str], out: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_loadmatch"));
    c.args(args);
    if let Some(d) = out {
        c.arg("--out").arg(d);
    }
    c.output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn jsonl(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn exit_codes() {
    assert_eq!(loadmatch(&["--help"], None).status.code(), Some(0));
    assert_eq!(loadmatch(&["recover", "--bogus"], None).status.code(), Some(1));
    assert_eq!(loadmatch(&["verify", "nonsense"], None).status.code(), Some(1));
    assert_eq!(loadmatch(&["recover", "--n", "12"], None).status.code(), Some(1));
    assert_eq!(loadmatch(&["sample", "--p", "0.5"], None).status.code(), Some(1));
    let missing = Path::new("/nonexistent/loadmatch-out");
    let o = loadmatch(&["mu-lambda", "--n", "100"], Some(missing));
    assert_eq!(o.status.code(), Some(2));
    assert!(!missing.exists());
    let o = loadmatch(&["sample", "--config", "/nonexistent/cfg.json"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_merging() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"n": 5, "bogus": true}"#).unwrap();
    let o = loadmatch(&["sample", "--config", cfg.to_str().unwrap()], Some(dir.path()));
    assert_eq!(o.status.code(), Some(1));

    std::fs::write(&cfg, r#"{"format_version": "1", "n": 5, "alpha": 0.7, "seed": 4}"#).unwrap();
    let o = loadmatch(&["sample", "--config", cfg.to_str().unwrap(), "--n", "6"], Some(dir.path()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("sample.json"));
    assert_eq!(v["format_version"], "1");
    assert_eq!(v["command"], "sample");
    assert_eq!(v["seed"], 4);
    assert_eq!(v["config"]["n"], 6);
    assert_eq!(v["config"]["alpha"], 0.7);
    assert_eq!(v["config"]["lambda"], 1.3);
    assert!(v["config"].get("out").is_none());
    assert_eq!(v["pi_star"].as_array().unwrap().len(), 6);
}

#[test]
fn mu_lambda_at_zero_has_no_load() {
    let dir = tempfile::tempdir().unwrap();
    let o = loadmatch(&["mu-lambda", "--n", "500", "--lambda", "0", "--trials", "2"], Some(dir.path()));
    assert!(o.status.success());
    let v = json(&dir.path().join("mu_lambda.json"));
    assert_eq!(v["F_at"]["0"], 0.0);
    assert_eq!(v["mass_above_1"], 0.0);
    assert_eq!(v["mass_at_0"], 1.0);
    let csv = std::fs::read_to_string(dir.path().join("mu_lambda.csv")).unwrap();
    assert!(csv.starts_with("# {"));
    assert!(csv.lines().nth(1).unwrap().starts_with("load,"));
}

#[test]
fn recover_sparse_limit_selects_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let o = loadmatch(&["recover", "--lambda", "0.01", "--trials", "10", "--seed", "2"], Some(dir.path()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let recs = jsonl(&dir.path().join("recover.jsonl"));
    assert_eq!(recs.len(), 11);
    assert_eq!(recs[0]["command"], "recover");
    assert!(recs[1..].iter().all(|r| r["u_n_size"] == 0));
    assert_eq!(recs[5]["trial"], 4);
}

#[test]
fn recover_full_correlation_keeps_correct_set_inside() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["recover", "--p", "0.6", "--s", "1", "--alpha", "1", "--a", "5", "--trials", "30"];
    let o = loadmatch(&args, Some(dir.path()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let recs = jsonl(&dir.path().join("recover.jsonl"));
    for r in &recs[1..] {
        assert!(r["u_cor_size"].as_u64() <= r["u_n_size"].as_u64());
        assert!(r["near_maximizer_gap"]["value"].as_f64().unwrap() >= 0.0);
    }
    let s = json(&dir.path().join("recover_summary.json"));
    assert!(s["mean_cor_ratio"].as_f64().unwrap() > 0.0);
    assert_eq!(s["invariant_failures"], 0);
}

#[test]
fn verify_suites_and_mutation() {
    for suite in ["balance", "orbits", "model", "recovery", "limit"] {
        let o = loadmatch(&["verify", suite], None);
        assert!(o.status.success(), "{suite}: {}", String::from_utf8_lossy(&o.stdout));
    }
    let dir = tempfile::tempdir().unwrap();
    let o = loadmatch(&["verify", "model", "--mutate", "model"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(3));
    let recs = jsonl(&dir.path().join("verify_model.jsonl"));
    let failed: Vec<_> = recs[1..].iter().filter(|r| r["status"] == "fail").collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|r| r["witness"].is_string()));
    // a mutation aimed at another suite leaves this one alone
    assert!(loadmatch(&["verify", "orbits", "--mutate", "model"], None).status.success());
    assert_eq!(loadmatch(&["verify", "orbits", "--mutate", "nope"], None).status.code(), Some(1));
}

#[test]
fn graph_file_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    // two triangles sharing a vertex
    std::fs::write(&g, "5 6\n0 1\n1 2\n0 2\n2 3\n3 4\n2 4\n").unwrap();
    let gs = g.to_str().unwrap();
    let o = loadmatch(&["admissible-check", "--graph", gs, "--small-subgraph-cap", "6", "--max-degree-cap", "10"], Some(dir.path()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("admissible.json"));
    assert_eq!(v["ok"], false);
    assert!(v["first_violation"]["tag"].is_string());

    let o = loadmatch(&["event-d", "--graph", gs, "--d", "0.5", "--delta", "0"], Some(dir.path()));
    assert!(o.status.success());
    let v = json(&dir.path().join("event_d.json"));
    assert_eq!(v["holds"], false);
    assert!(v["witness"].is_array());
    let o = loadmatch(&["event-d", "--graph", gs, "--d", "4", "--delta", "0"], Some(dir.path()));
    assert!(o.status.success());
    assert_eq!(json(&dir.path().join("event_d.json"))["holds"], true);
}

#[test]
fn posterior_rows_are_distributions() {
    let dir = tempfile::tempdir().unwrap();
    let o = loadmatch(&["posterior", "--n", "5", "--seed", "9"], Some(dir.path()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("posterior.json"));
    for row in v["marginals"].as_array().unwrap() {
        let s: f64 = row.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
        assert!((s - 1.0).abs() < 1e-9);
    }
    assert!(v["expected_overlap"].as_f64().unwrap() >= 1.0 - 1e-9);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["recover", "--trials", "15", "--seed", "21"];
    assert!(loadmatch(&args, Some(a.path())).status.success());
    let mut with_threads = args.to_vec();
    with_threads.extend(["--threads", "2"]);
    assert!(loadmatch(&with_threads, Some(b.path())).status.success());
    for f in ["recover.jsonl", "recover_summary.json", "recover_report.txt"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}
