//! The correlated Erdős–Rényi model: parameters, the derived constants
//! `P`, `Q`, `R`, seeded sampling, the exact posterior at tiny `n` and the
//! per-pair likelihood-ratio identity.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{pair_from_index, pair_index, Graph, GraphError};
use crate::intersect::{intersection_graph, Matching, MatchingError, PartialMatching};
use crate::VertexSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("s = {0} exceeds 1")]
    SOutOfRange(f64),
    #[error("s = 1 (or p s = 1) leaves P, Q, R undefined")]
    DegenerateS,
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("n = {n} exceeds the enumeration limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

/// Parameters of the model plus every derived constant.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub p: f64,
    pub s: f64,
    pub big_p: f64,
    pub big_q: f64,
    pub big_r: f64,
    pub gamma: f64,
    pub rho_hat: f64,
    pub a: f64,
}

/// Safety margin added to the smallest admissible `A`.
pub const A_MARGIN: f64 = 1.0;

/// `(P, Q, R)`; non-finite when `s = 1` or `ps = 1`.
pub fn pqr(p: f64, s: f64) -> (f64, f64, f64) {
    let w = 1.0 - 2.0 * p * s + p * s * s;
    let big_p = w / (p * (1.0 - s) * (1.0 - s));
    let big_q = (1.0 - s) * (1.0 - p * s) / w;
    let big_r = w / ((1.0 - p * s) * (1.0 - p * s));
    (big_p, big_q, big_r)
}

/// Smallest `A` with `1 - γ(A - ϱ - 1) < 0` is the open bound
/// `ϱ + 1 + 1/γ`; the default adds [`A_MARGIN`].
pub fn default_a(gamma: f64, rho_hat: f64) -> f64 {
    rho_hat + 1.0 + 1.0 / gamma + A_MARGIN
}

/// Crude stand-in for `ϱ(λ)` used when no Monte Carlo estimate is given:
/// it over-estimates the maximal subgraph density at the sparse scales
/// considered here.
pub fn fallback_rho_hat(lambda: f64) -> f64 {
    lambda.max(1.0)
}

impl ModelParams {
    /// `p = n^(-α)`, `s = sqrt(λ / (n p))`.
    pub fn derive(n: usize, alpha: f64, lambda: f64) -> Result<Self, ModelError> {
        Self::derive_with(n, alpha, lambda, None, None)
    }

    /// As [`derive`](Self::derive) with an optional `ϱ` estimate and an
    /// optional explicit `A`.
    pub fn derive_with(
        n: usize,
        alpha: f64,
        lambda: f64,
        rho_hat: Option<f64>,
        a_override: Option<f64>,
    ) -> Result<Self, ModelError> {
        if n < 2 {
            return Err(ModelError::Invalid(format!("n = {n} < 2")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(ModelError::Invalid(format!("alpha = {alpha} not in (0, 1]")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(ModelError::Invalid(format!("lambda = {lambda} not positive")));
        }
        let p = (n as f64).powf(-alpha);
        let s = (lambda / (n as f64 * p)).sqrt();
        if s > 1.0 {
            return Err(ModelError::SOutOfRange(s));
        }
        if s == 1.0 {
            return Err(ModelError::DegenerateS);
        }
        Self::assemble(n, alpha, lambda, p, s, rho_hat, a_override)
    }

    /// Parameters with `p` and `s` set directly; `s = 1` is allowed (useful
    /// for sampling), in which case `P`, `Q`, `R` are not finite.
    pub fn forced(n: usize, p: f64, s: f64) -> Result<Self, ModelError> {
        if !(p > 0.0 && p <= 1.0) || !(s > 0.0 && s <= 1.0) {
            return Err(ModelError::Invalid(format!("p = {p}, s = {s} not in (0, 1]")));
        }
        let alpha = if n >= 2 { (-(p.ln()) / (n as f64).ln()).clamp(0.0, 1.0) } else { 1.0 };
        let lambda = n as f64 * p * s * s;
        Self::assemble(n, alpha, lambda, p, s, None, None)
    }

    fn assemble(
        n: usize,
        alpha: f64,
        lambda: f64,
        p: f64,
        s: f64,
        rho_hat: Option<f64>,
        a_override: Option<f64>,
    ) -> Result<Self, ModelError> {
        let (big_p, big_q, big_r) = pqr(p, s);
        let gamma = alpha.min(0.5);
        let rho_hat = rho_hat.unwrap_or_else(|| fallback_rho_hat(lambda));
        let a = match a_override {
            Some(a) => {
                if gamma > 0.0 && 1.0 - gamma * (a - rho_hat - 1.0) >= 0.0 {
                    return Err(ModelError::Invalid(format!(
                        "A = {a} violates 1 - gamma (A - rho - 1) < 0"
                    )));
                }
                a
            }
            None if gamma > 0.0 => default_a(gamma, rho_hat),
            None => f64::INFINITY,
        };
        Ok(ModelParams {
            n,
            alpha,
            lambda,
            p,
            s,
            big_p,
            big_q,
            big_r,
            gamma,
            rho_hat,
            a,
        })
    }

    pub fn is_degenerate(&self) -> bool {
        self.s >= 1.0 || self.p * self.s >= 1.0
    }

    pub fn require_nondegenerate(&self) -> Result<(), ModelError> {
        if self.is_degenerate() {
            Err(ModelError::DegenerateS)
        } else {
            Ok(())
        }
    }

    /// Flat `key = value` block.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.fields() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("n", self.n.to_string()),
            ("alpha", format!("{:?}", self.alpha)),
            ("lambda", format!("{:?}", self.lambda)),
            ("p", format!("{:?}", self.p)),
            ("s", format!("{:?}", self.s)),
            ("P", format!("{:?}", self.big_p)),
            ("Q", format!("{:?}", self.big_q)),
            ("R", format!("{:?}", self.big_r)),
            ("gamma", format!("{:?}", self.gamma)),
            ("rho_hat", format!("{:?}", self.rho_hat)),
            ("A", format!("{:?}", self.a)),
        ]
    }

    pub fn parse_text(text: &str) -> Result<Self, ModelError> {
        let mut map = std::collections::BTreeMap::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ModelError::Parse(format!("bad line {line:?}")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| -> Result<f64, ModelError> {
            map.get(k)
                .ok_or_else(|| ModelError::Parse(format!("missing {k}")))?
                .parse::<f64>()
                .map_err(|_| ModelError::Parse(format!("bad value for {k}")))
        };
        let n = map
            .get("n")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| ModelError::Parse("missing n".into()))?;
        let out = ModelParams {
            n,
            alpha: get("alpha")?,
            lambda: get("lambda")?,
            p: get("p")?,
            s: get("s")?,
            big_p: get("P")?,
            big_q: get("Q")?,
            big_r: get("R")?,
            gamma: get("gamma")?,
            rho_hat: get("rho_hat")?,
            a: get("A")?,
        };
        if map.len() != 11 {
            return Err(ModelError::Parse("unexpected keys".into()));
        }
        Ok(out)
    }
}

/// Random streams of one sample; each indicator family reads its own
/// stream at a position fixed by the pair index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    I = 0,
    J1 = 1,
    J2 = 2,
    PiStar = 3,
}

fn uniform_from(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// The indicator of `pair` in `stream`, read by seeking; agrees with the
/// sequential sampler.
pub fn indicator(seed: u64, stream: Stream, pair: usize, prob: f64) -> bool {
    let mut rng = stream_rng(seed, stream);
    rng.set_word_pos(2 * pair as u128);
    uniform_from(rng.next_u64()) < prob
}

fn indicator_bits(seed: u64, stream: Stream, pairs: usize, prob: f64) -> Vec<bool> {
    let mut rng = stream_rng(seed, stream);
    (0..pairs).map(|_| uniform_from(rng.next_u64()) < prob).collect()
}

/// Per-pair indicator bits, indexed by pair index; `i` and `j1` use `G1`
/// labels, `j2` uses `G2` labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Indicators {
    pub i: Vec<bool>,
    pub j1: Vec<bool>,
    pub j2: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatedPair {
    pub pi_star: Matching,
    pub g1: Graph,
    pub g2: Graph,
    pub indicators: Option<Indicators>,
}

/// Samples `(π*, G1, G2)`. `(i, j)` is in `G1` iff `I_ij J1_ij = 1`; the
/// parent pair `(i, j)` appears in `G2` as `(π*(i), π*(j))` iff
/// `I_ij J2_{π*(i)π*(j)} = 1`.
pub fn sample_correlated_pair(params: &ModelParams, seed: u64, keep_indicators: bool) -> CorrelatedPair {
    let n = params.n;
    let pairs = n * n.saturating_sub(1) / 2;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut stream_rng(seed, Stream::PiStar));
    let pi_star = Matching::new(perm).expect("shuffle is a permutation");
    let i = indicator_bits(seed, Stream::I, pairs, params.p);
    let j1 = indicator_bits(seed, Stream::J1, pairs, params.s);
    let j2 = indicator_bits(seed, Stream::J2, pairs, params.s);
    let mut e1 = Vec::new();
    let mut e2 = Vec::new();
    for k in 0..pairs {
        if !i[k] {
            continue;
        }
        let (a, b) = pair_from_index(k);
        if j1[k] {
            e1.push((a, b));
        }
        let (x, y) = (pi_star.apply(a), pi_star.apply(b));
        if j2[pair_index(x.min(y), x.max(y))] {
            e2.push((x.min(y), x.max(y)));
        }
    }
    e1.sort_unstable();
    e2.sort_unstable();
    let g1 = Graph::from_edges(n, e1).expect("valid pairs");
    let g2 = Graph::from_edges(n, e2).expect("valid pairs");
    CorrelatedPair {
        pi_star,
        g1,
        g2,
        indicators: keep_indicators.then_some(Indicators { i, j1, j2 }),
    }
}

impl CorrelatedPair {
    /// `H_{π*}` over all vertices.
    pub fn true_intersection(&self) -> Graph {
        intersection_graph(&self.g1, &self.g2, &self.pi_star, &VertexSet::full(self.g1.n()))
            .expect("sizes agree")
    }

    /// `pi_star: ...` then `[g1]` and `[g2]` edge-list sections.
    pub fn to_text(&self) -> String {
        format!(
            "pi_star: {}\n[g1]\n{}[g2]\n{}",
            self.pi_star,
            self.g1.to_edge_list(),
            self.g2.to_edge_list()
        )
    }

    pub fn parse_text(text: &str) -> Result<Self, ModelError> {
        let err = |m: &str| ModelError::Parse(m.to_string());
        let rest = text.strip_prefix("pi_star:").ok_or_else(|| err("missing pi_star"))?;
        let (perm, rest) = rest.split_once('\n').ok_or_else(|| err("truncated"))?;
        let pi_star = Matching::parse(perm)?;
        let rest = rest.strip_prefix("[g1]\n").ok_or_else(|| err("missing [g1]"))?;
        let (a, b) = rest.split_once("[g2]\n").ok_or_else(|| err("missing [g2]"))?;
        Ok(CorrelatedPair {
            pi_star,
            g1: Graph::parse_edge_list(a)?,
            g2: Graph::parse_edge_list(b)?,
            indicators: None,
        })
    }
}

pub const POSTERIOR_MAX_N: usize = 10;

/// Exact posterior over all `n!` matchings, in log form.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorTable {
    pub n: usize,
    /// All permutations in lexicographic order.
    pub perms: Vec<Matching>,
    pub edge_counts: Vec<usize>,
    /// Normalized log-probabilities.
    pub log_weights: Vec<f64>,
    pub log_z: f64,
}

impl PosteriorTable {
    pub fn weight(&self, k: usize) -> f64 {
        self.log_weights[k].exp()
    }

    /// `M[i][j] = μ(π(i) = j)`.
    pub fn marginals(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.n]; self.n];
        for (k, pi) in self.perms.iter().enumerate() {
            let w = self.weight(k);
            for i in 0..self.n {
                m[i][pi.apply(i)] += w;
            }
        }
        m
    }
}

pub fn posterior_exact(g1: &Graph, g2: &Graph, params: &ModelParams) -> Result<PosteriorTable, ModelError> {
    let n = g1.n();
    if n > POSTERIOR_MAX_N {
        return Err(ModelError::TooLarge { n, limit: POSTERIOR_MAX_N });
    }
    if g2.n() != n {
        return Err(MatchingError::SizeMismatch(n, g2.n()).into());
    }
    params.require_nondegenerate()?;
    let log_p = params.big_p.ln();
    let mut perms = Vec::new();
    let mut edge_counts = Vec::new();
    for pi in PartialMatching::empty(n).extensions() {
        let c = g1
            .edges()
            .iter()
            .filter(|&&(i, j)| g2.has_edge(pi.apply(i), pi.apply(j)))
            .count();
        perms.push(pi);
        edge_counts.push(c);
    }
    let logs: Vec<f64> = edge_counts.iter().map(|&c| c as f64 * log_p).collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_z = max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
    Ok(PosteriorTable {
        n,
        perms,
        edge_counts,
        log_weights: logs.iter().map(|l| l - log_z).collect(),
        log_z,
    })
}

/// `(P^{ab} Q^{a+b} R, joint/product ratio)` for one pair with `G1` bit `a`
/// and `G2` bit `b`.
pub fn pair_ratio_identity(a: bool, b: bool, params: &ModelParams) -> Result<(f64, f64), ModelError> {
    params.require_nondegenerate()?;
    let (p, s) = (params.p, params.s);
    let (ai, bi) = (a as i32, b as i32);
    let lhs = params.big_p.powi(ai * bi) * params.big_q.powi(ai + bi) * params.big_r;
    let rhs = match (a, b) {
        (true, true) => 1.0 / p,
        (true, false) | (false, true) => (1.0 - s) / (1.0 - p * s),
        (false, false) => (1.0 - 2.0 * p * s + p * s * s) / ((1.0 - p * s) * (1.0 - p * s)),
    };
    Ok((lhs, rhs))
}
