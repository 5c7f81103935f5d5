//! Flat experiment configuration: a JSON file merged with command-line
//! flags, flags winning.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Sets p directly (with --s) instead of deriving it from alpha.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// The recovery constant A.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_hat: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Points x at which F(x) is reported.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_points: Option<Vec<f64>>,
    /// Largest n solved exactly by mu-lambda.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossover: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Edge-list file used instead of a sampled graph.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree_cap: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_n: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neighborhood_radius: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub small_subgraph_cap: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_count_base: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_length_cap: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_param: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exclude_self: Option<bool>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_budget: Option<u64>,
    /// Deliberately corrupts a solver inside `verify`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutate: Option<String>,
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format_version: Option<String>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if let Some(v) = &cfg.format_version {
            if v != FORMAT_VERSION {
                return Err(CliError::Usage(format!("unsupported format_version {v}")));
            }
        }
        Ok(cfg)
    }

    /// `self` with every field set in `top` replaced.
    pub fn overlay(mut self, top: &ExperimentConfig) -> Self {
        overlay!(
            self, top, n, alpha, lambda, p, s, epsilon, eta, a, rho_hat, trials, seed, x_points,
            crossover, n_max, graph, d, delta, max_degree_cap, d_n, neighborhood_radius,
            small_subgraph_cap, cycle_count_base, cycle_length_cap, c_param, exclude_self,
            node_budget, mutate, out, threads
        );
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.out.clone().unwrap_or_else(|| ".".into()))
    }

    /// The resolved configuration as echoed into outputs. Where files go
    /// and how many threads ran do not affect results, so they are left
    /// out; reruns into different directories stay byte-identical.
    pub fn echo(&self) -> serde_json::Value {
        let mut c = self.clone();
        c.out = None;
        c.threads = None;
        c.format_version = None;
        c.seed = Some(self.seed());
        serde_json::to_value(c).expect("plain data")
    }
}

/// Header fields shared by every output file.
pub fn meta(cfg: &ExperimentConfig, command: &str) -> serde_json::Value {
    serde_json::json!({
        "format_version": FORMAT_VERSION,
        "command": command,
        "seed": cfg.seed(),
        "config": cfg.echo(),
    })
}

pub fn require<T: Copy>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("missing parameter {name}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let err = serde_json::from_str::<ExperimentConfig>(r#"{"n": 3, "bogus": 1}"#);
        assert!(err.is_err());
        let ok: ExperimentConfig = serde_json::from_str(r#"{"n": 3, "lambda": 2.0}"#).unwrap();
        assert_eq!(ok.n, Some(3));
    }

    #[test]
    fn flags_override_file() {
        let file = ExperimentConfig {
            n: Some(5),
            lambda: Some(1.0),
            ..Default::default()
        };
        let flags = ExperimentConfig {
            n: Some(7),
            ..Default::default()
        };
        let c = file.overlay(&flags);
        assert_eq!((c.n, c.lambda), (Some(7), Some(1.0)));
    }

    #[test]
    fn echo_omits_paths_and_threads() {
        let c = ExperimentConfig {
            out: Some("/tmp/x".into()),
            threads: Some(4),
            n: Some(3),
            ..Default::default()
        };
        let e = c.echo();
        assert!(e.get("out").is_none() && e.get("threads").is_none());
        assert_eq!(e["seed"], 0);
        assert_eq!(e["n"], 3);
    }
}
