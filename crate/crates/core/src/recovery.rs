//! The iterative matching algorithm at desk scale: exhaustive search over
//! extensions of the current partial matching, one load band per round.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::balance::{balanced_loads, ft_value, BalanceError};
use crate::graph::{pair_index, Graph, VertexSet};
use crate::intersect::{intersection_graph, intersection_graph_partial, Matching, MatchingError, PartialMatching};
use crate::model::ModelParams;
use crate::moments::truncation_l;
use crate::orbits::{constraint_check_ek, decompose_orbits_restricted, orbit_edge_counts, OrbitError};
use crate::rational::{snap_to_grid, to_f64, Rational};

pub const DEFAULT_N_MAX: usize = 8;
pub const BAYES_MAX_N: usize = 10;
/// Interval endpoints are snapped to this grid.
pub const ENDPOINT_DEN: i64 = 1_000_000;
const MAX_ROUNDS: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum RecoveryError {
    #[error("n = {n} exceeds the enumeration limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Balance(#[from] BalanceError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

/// Half-open load band `[lo, hi)`; `hi = None` is unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Option<Rational>,
}

impl Interval {
    pub fn contains(&self, x: &Rational) -> bool {
        *x >= self.lo && self.hi.is_none_or(|h| *x < h)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(h) => write!(f, "[{:.6},{:.6})", to_f64(&self.lo), to_f64(&h)),
            None => write!(f, "[{:.6},inf)", to_f64(&self.lo)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgoConfig {
    pub alpha: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub a: f64,
    /// Number of the last round; rounds run `0..=n_rounds`.
    pub n_rounds: usize,
    pub intervals: Vec<Interval>,
    pub n_max: usize,
}

impl AlgoConfig {
    pub fn new(alpha: f64, epsilon: f64, eta: f64, a: f64) -> Result<Self, RecoveryError> {
        let bad = |m: String| Err(RecoveryError::Config(m));
        if !(alpha > 0.0 && alpha <= 1.0) {
            return bad(format!("alpha = {alpha}"));
        }
        if !(epsilon > 0.0 && eta > 0.0 && a > 0.0 && a.is_finite()) {
            return bad(format!("epsilon = {epsilon}, eta = {eta}, A = {a}"));
        }
        let top = a / eta;
        let floor = 1.0 / alpha + epsilon;
        let raw = ((top - floor) / eta).ceil();
        if !(raw >= 1.0) {
            return bad(format!("A/eta = {top} must exceed 1/alpha + epsilon = {floor}"));
        }
        if raw > MAX_ROUNDS as f64 {
            return bad(format!("{raw} rounds"));
        }
        let n_rounds = raw as usize;
        // b[j] = A/eta - j*eta for j < N, b[N] = 1/alpha + epsilon
        let mut b: Vec<Rational> = (0..n_rounds)
            .map(|j| snap_to_grid(top - j as f64 * eta, ENDPOINT_DEN))
            .collect();
        b.push(snap_to_grid(floor, ENDPOINT_DEN));
        if b.windows(2).any(|w| w[0] <= w[1]) {
            return bad("interval endpoints collapse on the 1e-6 grid".into());
        }
        let mut intervals = vec![Interval { lo: b[0], hi: None }];
        for k in 1..=n_rounds {
            intervals.push(Interval {
                lo: b[k],
                hi: Some(b[k - 1]),
            });
        }
        Ok(AlgoConfig {
            alpha,
            epsilon,
            eta,
            a,
            n_rounds,
            intervals,
            n_max: DEFAULT_N_MAX,
        })
    }

    pub fn from_params(params: &ModelParams, epsilon: f64, eta: f64) -> Result<Self, RecoveryError> {
        Self::new(params.alpha, epsilon, eta, params.a)
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    /// Round whose band contains `x`, if any.
    pub fn band_of(&self, x: &Rational) -> Option<usize> {
        // lower endpoints strictly decrease with k
        let k = self.intervals.partition_point(|iv| *x < iv.lo);
        (k < self.intervals.len()).then_some(k)
    }

    /// `1/alpha + epsilon` on the endpoint grid.
    pub fn heavy_threshold(&self) -> Rational {
        self.intervals[self.n_rounds].lo
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundTrace {
    pub k: usize,
    pub interval: Interval,
    /// `π_k`, the selected extension.
    pub chosen: Matching,
    pub v_k: VertexSet,
    pub u_k_size: usize,
    /// Every vertex of `U_k` keeps load at least the band's lower endpoint
    /// in `H_π̃(U_k)`.
    pub level_set_ok: bool,
    pub extensions: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryResult {
    pub n: usize,
    pub u_n: VertexSet,
    pub pi_tilde: PartialMatching,
    pub rounds: Vec<RoundTrace>,
    /// `#{i : load ≥ A/η} ≤ |E_{π_0}| η / A` in round 0.
    pub round0_bound_ok: bool,
}

impl RecoveryResult {
    pub fn u_k(&self, k: usize) -> VertexSet {
        self.rounds[..=k]
            .iter()
            .fold(VertexSet::new(), |acc, r| acc.union(&r.v_k))
    }

    pub fn check_structure(&self) -> Result<(), String> {
        let mut seen = VertexSet::new();
        for r in &self.rounds {
            if !r.v_k.is_disjoint(&seen) {
                return Err(format!("round {} overlaps earlier rounds", r.k));
            }
            seen = seen.union(&r.v_k);
            if seen.len() != r.u_k_size {
                return Err(format!("round {} size mismatch", r.k));
            }
        }
        if seen != self.u_n {
            return Err("U_N is not the union of the V_k".into());
        }
        if self.pi_tilde.domain() != self.u_n {
            return Err("domain of the partial matching differs from U_N".into());
        }
        Ok(())
    }

    pub fn to_report(&self) -> String {
        let mut out = String::new();
        for r in &self.rounds {
            out.push_str(&format!(
                "{} {} {} interval={}\n",
                r.k,
                r.v_k.len(),
                r.u_k_size,
                r.interval
            ));
        }
        for (i, j) in self.pi_tilde.pairs() {
            out.push_str(&format!("{i} -> {j}\n"));
        }
        out
    }
}

/// Per-extension band index of every vertex (`u32::MAX` = below every band).
struct ExtensionTable {
    perms: Vec<Matching>,
    bands: Vec<Vec<u32>>,
}

fn build_table(
    g1: &Graph,
    g2: &Graph,
    base: &PartialMatching,
    cfg: &AlgoConfig,
) -> Result<ExtensionTable, RecoveryError> {
    let n = g1.n();
    let all = VertexSet::full(n);
    let perms: Vec<Matching> = base.extensions().collect();
    let keys: Vec<Vec<u32>> = perms
        .par_iter()
        .map(|pi| {
            let h = intersection_graph(g1, g2, pi, &all)?;
            Ok(h.edges().iter().map(|&(i, j)| pair_index(i, j) as u32).collect())
        })
        .collect::<Result<_, MatchingError>>()?;
    let mut unique: HashMap<&[u32], usize> = HashMap::new();
    let mut reps: Vec<&[u32]> = Vec::new();
    let slot: Vec<usize> = keys
        .iter()
        .map(|k| {
            *unique.entry(k.as_slice()).or_insert_with(|| {
                reps.push(k.as_slice());
                reps.len() - 1
            })
        })
        .collect();
    let rep_bands: Vec<Vec<u32>> = reps
        .par_iter()
        .map(|key| {
            let edges = key.iter().map(|&p| crate::graph::pair_from_index(p as usize));
            let h = Graph::from_edges(n, edges).expect("valid pairs");
            balanced_loads(&h)
                .loads
                .iter()
                .map(|x| cfg.band_of(x).map_or(u32::MAX, |k| k as u32))
                .collect()
        })
        .collect();
    Ok(ExtensionTable {
        bands: slot.iter().map(|&s| rep_bands[s].clone()).collect(),
        perms,
    })
}

fn induced_loads_ok(
    g1: &Graph,
    g2: &Graph,
    pi: &PartialMatching,
    u: &VertexSet,
    lo: Rational,
) -> Result<bool, RecoveryError> {
    let h = intersection_graph_partial(g1, g2, pi, u)?;
    let loads = balanced_loads(&h).loads;
    Ok(u.iter().all(|i| loads[i] >= lo))
}

pub fn iterative_matching(g1: &Graph, g2: &Graph, cfg: &AlgoConfig) -> Result<RecoveryResult, RecoveryError> {
    let n = g1.n();
    if n > cfg.n_max {
        return Err(RecoveryError::TooLarge { n, limit: cfg.n_max });
    }
    if g2.n() != n {
        return Err(MatchingError::SizeMismatch(n, g2.n()).into());
    }
    let mut pi_tilde = PartialMatching::empty(n);
    let mut u = VertexSet::new();
    let mut table = build_table(g1, g2, &pi_tilde, cfg)?;
    let mut rounds = Vec::with_capacity(cfg.n_rounds + 1);
    let mut round0_bound_ok = true;
    for k in 0..=cfg.n_rounds {
        let band = k as u32;
        let mut best: Option<(usize, VertexSet)> = None;
        for (idx, bands) in table.bands.iter().enumerate() {
            let v: VertexSet = (0..n)
                .filter(|&i| bands[i] == band && !u.contains(i))
                .collect();
            // larger first, then smaller under the tie order; equal sets keep
            // the earlier (lexicographically smaller) extension
            let better = match &best {
                None => true,
                Some((_, b)) => {
                    v.len() > b.len() || (v.len() == b.len() && v.cmp_size_lex(b).is_lt())
                }
            };
            if better {
                best = Some((idx, v));
            }
        }
        let (idx, v_k) = best.expect("at least one extension");
        let chosen = table.perms[idx].clone();
        if k == 0 {
            let all = VertexSet::full(n);
            let edges = intersection_graph(g1, g2, &chosen, &all)?.edge_count() as f64;
            let heavy = table.bands[idx].iter().filter(|&&b| b == 0).count() as f64;
            round0_bound_ok = heavy <= edges * cfg.eta / cfg.a + 1e-9;
        }
        let grew = !v_k.is_empty();
        u = u.union(&v_k);
        pi_tilde = PartialMatching::restrict(&chosen, &u)?;
        let level_set_ok = induced_loads_ok(g1, g2, &pi_tilde, &u, cfg.intervals[k].lo)?;
        rounds.push(RoundTrace {
            k,
            interval: cfg.intervals[k],
            chosen,
            v_k,
            u_k_size: u.len(),
            level_set_ok,
            extensions: table.perms.len(),
        });
        if grew && k < cfg.n_rounds {
            table = build_table(g1, g2, &pi_tilde, cfg)?;
        }
    }
    Ok(RecoveryResult {
        n,
        u_n: u,
        pi_tilde,
        rounds,
        round0_bound_ok,
    })
}

/// Item-(iii) for round `k`: every `W` between `U_{k-1}` and `U_k` has
/// `|E(W) \ E(U_{k-1})| ≤ u_k |W \ U_{k-1}|` in `H_π̃`. Round 0 has no
/// upper endpoint and always passes.
pub fn item_iii_holds(g1: &Graph, g2: &Graph, result: &RecoveryResult, k: usize) -> Result<bool, RecoveryError> {
    let Some(u_hi) = result.rounds[k].interval.hi else {
        return Ok(true);
    };
    let prev = if k == 0 { VertexSet::new() } else { result.u_k(k - 1) };
    let cur = result.u_k(k);
    let h = intersection_graph_partial(g1, g2, &result.pi_tilde, &cur)?;
    let base = h.edges_within(&prev) as i64;
    let new: Vec<usize> = cur.difference(&prev).iter().collect();
    if new.len() > 20 {
        return Err(RecoveryError::TooLarge { n: new.len(), limit: 20 });
    }
    for mask in 1u64..(1u64 << new.len()) {
        let w: VertexSet = prev
            .iter()
            .chain(new.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &v)| v))
            .collect();
        let extra = h.edges_within(&w) as i64 - base;
        if Rational::from_integer(extra) > u_hi * Rational::from_integer(mask.count_ones() as i64) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundAudit {
    pub k: usize,
    pub item_iii: bool,
    /// The edge-count constraint, evaluated whenever Item-(iii) holds.
    pub constraint_ek: Option<bool>,
}

/// Item-(iii) and the orbit edge-count constraint for every round `k ≥ 1`.
pub fn audit_rounds(
    g1: &Graph,
    g2: &Graph,
    result: &RecoveryResult,
    cfg: &AlgoConfig,
    pi_star: &Matching,
) -> Result<Vec<RoundAudit>, RecoveryError> {
    let l = truncation_l(cfg.alpha, cfg.epsilon);
    let mut out = Vec::new();
    for k in 1..result.rounds.len() {
        let item_iii = item_iii_holds(g1, g2, result, k)?;
        let constraint_ek = if item_iii {
            let prev = result.u_k(k - 1);
            let cur = result.u_k(k);
            let h = intersection_graph_partial(g1, g2, &result.pi_tilde, &cur)?;
            let e_prev: Vec<(usize, usize)> = h
                .edges()
                .iter()
                .copied()
                .filter(|&(i, j)| prev.contains(i) && prev.contains(j))
                .collect();
            let decomp = decompose_orbits_restricted(pi_star, &result.pi_tilde, &prev, &e_prev, &cur)?;
            let counts = orbit_edge_counts(&decomp, &h, l)?;
            let u_hi = result.rounds[k].interval.hi.expect("rounds k ≥ 1 are bounded");
            Some(constraint_check_ek(&counts, &decomp.census, u_hi))
        } else {
            None
        };
        out.push(RoundAudit {
            k,
            item_iii,
            constraint_ek,
        });
    }
    Ok(out)
}

/// Heavy (`≥ 1/α + ε`) and light (`≤ 1/α - ε`) vertices of `H_{π*}`, with
/// both thresholds on the endpoint grid.
pub fn heavy_light_sets(
    pi_star: &Matching,
    g1: &Graph,
    g2: &Graph,
    alpha: f64,
    eps: f64,
) -> Result<(VertexSet, VertexSet), RecoveryError> {
    let h = intersection_graph(g1, g2, pi_star, &VertexSet::full(g1.n()))?;
    let loads = balanced_loads(&h).loads;
    let hi = snap_to_grid(1.0 / alpha + eps, ENDPOINT_DEN);
    let lo = snap_to_grid(1.0 / alpha - eps, ENDPOINT_DEN);
    let heavy = (0..loads.len()).filter(|&i| loads[i] >= hi).collect();
    let light = (0..loads.len()).filter(|&i| loads[i] <= lo).collect();
    Ok((heavy, light))
}

pub fn correct_set(result: &RecoveryResult, pi_star: &Matching) -> VertexSet {
    result
        .pi_tilde
        .pairs()
        .into_iter()
        .filter(|&(i, j)| pi_star.apply(i) == j)
        .map(|(i, _)| i)
        .collect()
}

/// `f(U_cor ∪ U_heavy) - f(U_cor)` for `f = f_{α_ε}` on `H_{π*}`.
pub fn near_maximizer_gap(
    pi_star: &Matching,
    g1: &Graph,
    g2: &Graph,
    u_cor: &VertexSet,
    u_heavy: &VertexSet,
    alpha_eps: Rational,
) -> Result<Rational, RecoveryError> {
    let h = intersection_graph(g1, g2, pi_star, &VertexSet::full(g1.n()))?;
    let both = u_cor.union(u_heavy);
    Ok(ft_value(&h, alpha_eps, &both)? - ft_value(&h, alpha_eps, u_cor)?)
}

/// Posterior marginals `M[i][j] = μ(π(i) = j)`. With `s = 1` the posterior
/// is uniform on the matchings with the most common edges.
pub fn posterior_marginals(g1: &Graph, g2: &Graph, params: &ModelParams) -> Result<Vec<Vec<f64>>, RecoveryError> {
    let n = g1.n();
    if n > BAYES_MAX_N {
        return Err(RecoveryError::TooLarge { n, limit: BAYES_MAX_N });
    }
    if g2.n() != n {
        return Err(MatchingError::SizeMismatch(n, g2.n()).into());
    }
    let perms: Vec<Matching> = PartialMatching::empty(n).extensions().collect();
    let counts: Vec<usize> = perms
        .iter()
        .map(|pi| {
            g1.edges()
                .iter()
                .filter(|&&(i, j)| g2.has_edge(pi.apply(i), pi.apply(j)))
                .count()
        })
        .collect();
    let max = counts.iter().copied().max().unwrap_or(0);
    let log_p = params.big_p.ln();
    let logs: Vec<f64> = if log_p.is_finite() {
        counts.iter().map(|&c| (c as f64 - max as f64) * log_p).collect()
    } else {
        counts
            .iter()
            .map(|&c| if c == max { 0.0 } else { f64::NEG_INFINITY })
            .collect()
    };
    let z: f64 = logs.iter().map(|l| l.exp()).sum();
    let mut m = vec![vec![0.0; n]; n];
    for (pi, l) in perms.iter().zip(&logs) {
        let w = l.exp() / z;
        for (i, row) in m.iter_mut().enumerate() {
            row[pi.apply(i)] += w;
        }
    }
    Ok(m)
}

/// Maximum-weight assignment by DP over subsets of used columns; ties go to
/// the lexicographically smallest image array.
pub fn max_weight_assignment(m: &[Vec<f64>]) -> Matching {
    let n = m.len();
    let full = (1usize << n) - 1;
    // best[mask] = best total for rows |mask|.. given columns `mask` taken
    let mut best = vec![f64::NEG_INFINITY; 1 << n];
    best[full] = 0.0;
    for mask in (0..full).rev() {
        let row = mask.count_ones() as usize;
        if row >= n {
            continue;
        }
        let mut b = f64::NEG_INFINITY;
        for j in 0..n {
            if mask >> j & 1 == 0 {
                b = b.max(m[row][j] + best[mask | 1 << j]);
            }
        }
        best[mask] = b;
    }
    let mut image = Vec::with_capacity(n);
    let mut mask = 0usize;
    for row in 0..n {
        let target = best[mask];
        let j = (0..n)
            .filter(|&j| mask >> j & 1 == 0)
            .find(|&j| m[row][j] + best[mask | 1 << j] >= target - 1e-12)
            .expect("some column attains the optimum");
        image.push(j);
        mask |= 1 << j;
    }
    Matching::new(image).expect("assignment is a permutation")
}

/// `(π̂, Σ_i M[i][π̂(i)])` for the marginal-maximizing assignment.
pub fn bayes_optimal_estimate(g1: &Graph, g2: &Graph, params: &ModelParams) -> Result<(Matching, f64), RecoveryError> {
    let m = posterior_marginals(g1, g2, params)?;
    let pi = max_weight_assignment(&m);
    let overlap = (0..m.len()).map(|i| m[i][pi.apply(i)]).sum();
    Ok((pi, overlap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn k4_plus_one() -> Graph {
        Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn config_intervals_partition() {
        let cfg = AlgoConfig::new(1.0, 0.1, 0.5, 2.0).unwrap();
        // A/eta = 4, floor 1.1, N = ceil(2.9 / 0.5) = 6
        assert_eq!(cfg.n_rounds, 6);
        assert_eq!(cfg.intervals[0], Interval { lo: rat(4, 1), hi: None });
        assert_eq!(cfg.intervals[1].lo, rat(7, 2));
        assert_eq!(cfg.intervals[6], Interval { lo: rat(11, 10), hi: Some(rat(3, 2)) });
        assert_eq!(cfg.band_of(&rat(3, 2)), Some(5));
        assert_eq!(cfg.band_of(&rat(11, 10)), Some(6));
        assert_eq!(cfg.band_of(&rat(1, 1)), None);
        assert_eq!(cfg.band_of(&rat(100, 1)), Some(0));
        assert!(AlgoConfig::new(1.0, 0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn empty_graphs_recover_nothing() {
        let cfg = AlgoConfig::new(1.0, 0.1, 0.5, 2.0).unwrap();
        let g = Graph::empty(4);
        let r = iterative_matching(&g, &g, &cfg).unwrap();
        assert!(r.u_n.is_empty());
        assert!(r.pi_tilde.is_empty());
        assert_eq!(r.rounds.len(), 7);
        assert!(r.round0_bound_ok);
        r.check_structure().unwrap();
    }

    #[test]
    fn k4_recovered() {
        let cfg = AlgoConfig::new(1.0, 0.1, 0.25, 1.0).unwrap();
        let g = k4_plus_one();
        let r = iterative_matching(&g, &g, &cfg).unwrap();
        assert_eq!(r.u_n, VertexSet::from([0, 1, 2, 3]));
        let h = intersection_graph_partial(&g, &g, &r.pi_tilde, &r.u_n).unwrap();
        assert_eq!(h.edge_count(), 6);
        assert!(r.rounds.iter().all(|t| t.level_set_ok));
        // the lexicographically first extension mapping K4 onto K4 is the identity
        assert_eq!(r.pi_tilde.pairs(), vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
        let report = r.to_report();
        assert!(report.ends_with("0 -> 0\n1 -> 1\n2 -> 2\n3 -> 3\n"));
        assert!(report.starts_with("0 0 0 interval=[4.000000,inf)\n"));
        let pi_star = Matching::new(vec![1, 0, 2, 3, 4]).unwrap();
        assert_eq!(correct_set(&r, &pi_star), VertexSet::from([2, 3]));
        for a in audit_rounds(&g, &g, &r, &cfg, &pi_star).unwrap() {
            if a.item_iii {
                assert_eq!(a.constraint_ek, Some(true));
            }
        }
    }

    #[test]
    fn too_large_guard() {
        let cfg = AlgoConfig::new(1.0, 0.1, 0.5, 2.0).unwrap();
        let g = Graph::empty(12);
        assert!(matches!(
            iterative_matching(&g, &g, &cfg),
            Err(RecoveryError::TooLarge { n: 12, limit: 8 })
        ));
    }

    #[test]
    fn heavy_light_examples() {
        let id = Matching::identity(5);
        let e = Graph::empty(5);
        let (h, l) = heavy_light_sets(&id, &e, &e, 1.0, 0.1).unwrap();
        assert!(h.is_empty());
        assert_eq!(l, VertexSet::full(5));
        let g = k4_plus_one();
        let (h, l) = heavy_light_sets(&id, &g, &g, 1.0, 0.1).unwrap();
        assert_eq!(h, VertexSet::from([0, 1, 2, 3]));
        assert_eq!(l, VertexSet::from([4]));
        let t = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let (h, l) = heavy_light_sets(&Matching::identity(3), &t, &t, 1.0, 0.1).unwrap();
        assert!(h.is_empty() && l.is_empty());
    }

    #[test]
    fn gap_examples() {
        let g = k4_plus_one();
        let id = Matching::identity(5);
        let heavy = VertexSet::from([0, 1]);
        let cor = VertexSet::from([0, 1, 2]);
        assert_eq!(near_maximizer_gap(&id, &g, &g, &cor, &heavy, rat(10, 11)).unwrap(), rat(0, 1));
        // adding vertex 3 adds three edges and one vertex
        let gap = near_maximizer_gap(&id, &g, &g, &cor, &VertexSet::from([3]), rat(10, 11)).unwrap();
        assert_eq!(gap, rat(30, 11) - rat(1, 1));
    }

    #[test]
    fn bayes_examples() {
        let e = Graph::empty(3);
        let params = ModelParams::forced(3, 0.5, 0.5).unwrap();
        let (_, ov) = bayes_optimal_estimate(&e, &e, &params).unwrap();
        assert!((ov - 1.0).abs() < 1e-12);
        let k = Graph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let full = ModelParams::forced(3, 1.0, 1.0).unwrap();
        let (pi, ov) = bayes_optimal_estimate(&k, &k, &full).unwrap();
        assert!((ov - 1.0).abs() < 1e-12);
        assert_eq!(pi, Matching::identity(3));
        // one shared edge: 0 and 1 map into {0, 1}, 2 maps to 2
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let m = posterior_marginals(&g, &g, &params).unwrap();
        let (pi, ov) = bayes_optimal_estimate(&g, &g, &params).unwrap();
        assert_eq!(pi.apply(2), 2);
        assert!((m[0][0] - m[0][1]).abs() < 1e-12 && m[0][0] > m[0][2]);
        assert!((ov - (m[0][0] + m[1][1] + m[2][2])).abs() < 1e-12);
    }

    #[test]
    fn assignment_matches_bruteforce() {
        let m = vec![
            vec![0.1, 0.7, 0.2],
            vec![0.6, 0.3, 0.1],
            vec![0.3, 0.0, 0.7],
        ];
        let pi = max_weight_assignment(&m);
        assert_eq!(pi.image(), &[1, 0, 2]);
    }
}
