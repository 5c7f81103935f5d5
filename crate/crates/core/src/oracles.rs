//! Brute-force references and the structural checkers used on intersection
//! graphs: a quadratic-minimization load oracle, exhaustive `f_t`
//! maximization, an independent densest-subgraph solver, isomorphism-class
//! enumeration, the admissibility conditions and the edge-expansion event.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::flow::{FlowError, FlowNetwork};
use crate::graph::{pair_index, Graph, VertexSet};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("no convergence after {sweeps} sweeps (last adjustment {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },
    #[error("instance too large: {what} = {value} exceeds {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("t must be positive")]
    NonPositiveT,
    #[error("tolerance must be positive")]
    BadTolerance,
    #[error("cycle enumeration exceeded the budget of {0} search nodes")]
    CycleEnumerationBudget(u64),
    #[error("invalid admissibility parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

pub const QP_MAX_EDGES: usize = 10_000;
pub const QP_MAX_SWEEPS: usize = 2_000_000;

/// Minimizes the sum of squared loads by cyclic per-edge rebalancing.
///
/// Each edge in turn takes the split that minimizes the objective with every
/// other edge held fixed. Stops once a full sweep moves no share by more than
/// `tol`.
pub fn loads_qp_oracle(g: &Graph, tol: f64) -> Result<Vec<f64>, OracleError> {
    if !(tol > 0.0) {
        return Err(OracleError::BadTolerance);
    }
    if g.edge_count() > QP_MAX_EDGES {
        return Err(OracleError::TooLarge {
            what: "edges",
            value: g.edge_count(),
            limit: QP_MAX_EDGES,
        });
    }
    // w[e]: share of edge e=(x,y) held by y
    let mut w = vec![0.5f64; g.edge_count()];
    let mut load = vec![0.0f64; g.n()];
    for &(x, y) in g.edges() {
        load[x] += 0.5;
        load[y] += 0.5;
    }
    let mut residual = f64::INFINITY;
    for _ in 0..QP_MAX_SWEEPS {
        residual = 0.0f64;
        for (e, &(x, y)) in g.edges().iter().enumerate() {
            let lx = load[x] - (1.0 - w[e]);
            let ly = load[y] - w[e];
            let nw = ((lx + 1.0 - ly) / 2.0).clamp(0.0, 1.0);
            residual = residual.max((nw - w[e]).abs());
            w[e] = nw;
            load[x] = lx + 1.0 - nw;
            load[y] = ly + nw;
        }
        if residual < tol {
            return Ok(load);
        }
    }
    Err(OracleError::NonConvergence {
        sweeps: QP_MAX_SWEEPS,
        residual,
    })
}

pub const BRUTEFORCE_MAX_N: usize = 20;

/// Bitmask adjacency; requires `n <= 64`.
fn adjacency_masks(g: &Graph) -> Vec<u64> {
    let mut adj = vec![0u64; g.n()];
    for &(x, y) in g.edges() {
        adj[x] |= 1 << y;
        adj[y] |= 1 << x;
    }
    adj
}

/// `|E(S)|` for every subset `S` of an `n <= 20` vertex graph.
fn subset_edge_counts(g: &Graph) -> Vec<u32> {
    let adj = adjacency_masks(g);
    let n = g.n();
    let mut e = vec![0u32; 1 << n];
    for s in 1usize..(1 << n) {
        let v = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        e[s] = e[rest] + (adj[v] & rest as u64).count_ones();
    }
    e
}

/// Exhaustive maximization of `t|E(W)| - |W|`. Among maximizers the largest
/// wins, then the lexicographically smallest member list.
pub fn ft_bruteforce(g: &Graph, t: Rational) -> Result<(Rational, VertexSet), OracleError> {
    if *t.numer() <= 0 {
        return Err(OracleError::NonPositiveT);
    }
    let n = g.n();
    if n > BRUTEFORCE_MAX_N {
        return Err(OracleError::TooLarge {
            what: "n",
            value: n,
            limit: BRUTEFORCE_MAX_N,
        });
    }
    let (a, b) = (*t.numer() as i128, *t.denom() as i128);
    let e = subset_edge_counts(g);
    let mut best: Option<(i128, VertexSet)> = None;
    for s in 0usize..(1 << n) {
        let size = s.count_ones() as i128;
        let val = a * e[s] as i128 - b * size;
        let set = VertexSet::from_bits(s as u64, n);
        let better = match &best {
            None => true,
            Some((bv, bs)) => {
                val > *bv
                    || (val == *bv
                        && (set.len() > bs.len() || (set.len() == bs.len() && set < *bs)))
            }
        };
        if better {
            best = Some((val, set));
        }
    }
    let (val, set) = best.expect("at least the empty set");
    Ok((Rational::new(val as i64, *t.denom()), set))
}

/// Maximum of `|E(S)|/|S|` over nonempty `S` (0 for an edgeless graph).
///
/// Dinkelbach iteration: with the current guess `g = p/q`, a min cut in
/// the network `s -> v (qm)`, `v -> t (qm + 2p - q deg v)`, `u <-> v (q)`
/// has capacity `qmn + 2(p|S| - q|E(S)|)` for source side `S`; a cut below
/// `qmn` exhibits a denser set.
pub fn densest_density(g: &Graph) -> Result<Rational, OracleError> {
    let (n, m) = (g.n(), g.edge_count());
    if m == 0 {
        return Ok(Rational::from_integer(0));
    }
    let mut guess = Rational::new(m as i64, n as i64);
    loop {
        let (p, q) = (*guess.numer() as u64, *guess.denom() as u64);
        let mut net = FlowNetwork::new(n + 2, 0, 1)?;
        for v in 0..n {
            net.add_arc(0, 2 + v, q * m as u64)?;
            net.add_arc(2 + v, 1, q * m as u64 + 2 * p - q * g.degree(v) as u64)?;
        }
        for &(x, y) in g.edges() {
            net.add_arc(2 + x, 2 + y, q)?;
            net.add_arc(2 + y, 2 + x, q)?;
        }
        let cut = net.solve()?;
        if cut.flow_value >= q * (m * n) as u64 {
            return Ok(guess);
        }
        let s: VertexSet = (0..n).filter(|&v| cut.source_side_min[2 + v]).collect();
        let next = Rational::new(g.edges_within(&s) as i64, s.len() as i64);
        assert!(next > guess, "densest-subgraph iteration failed to improve");
        guess = next;
    }
}

pub const NONISO_MAX_N: usize = 7;

/// One representative per isomorphism class of graphs on `n <= 7` vertices,
/// in canonical form, sorted by canonical pair mask.
pub fn nonisomorphic_graphs(n: usize) -> Result<Vec<Graph>, OracleError> {
    if n > NONISO_MAX_N {
        return Err(OracleError::TooLarge {
            what: "n",
            value: n,
            limit: NONISO_MAX_N,
        });
    }
    let mut level: Vec<u64> = vec![0];
    for k in 1..=n {
        // graphs on k vertices: every (k-1)-class plus vertex k-1 joined to
        // an arbitrary neighbourhood
        let mut seen = HashSet::new();
        for &mask in &level {
            for nb in 0u64..(1 << (k - 1)) {
                let mut m = mask;
                for v in 0..k - 1 {
                    if nb >> v & 1 == 1 {
                        m |= 1 << pair_index(v, k - 1);
                    }
                }
                seen.insert(canonical_mask(k, m));
            }
        }
        level = seen.into_iter().collect();
        level.sort_unstable();
    }
    Ok(level.into_iter().map(|m| Graph::from_pair_mask(n, m)).collect())
}

/// Connected representatives only.
pub fn connected_nonisomorphic_graphs(n: usize) -> Result<Vec<Graph>, OracleError> {
    Ok(nonisomorphic_graphs(n)?
        .into_iter()
        .filter(|g| g.components().len() <= 1)
        .collect())
}

/// Canonical pair mask: minimum over all relabelings compatible with an
/// isomorphism-invariant ordered colour refinement.
fn canonical_mask(n: usize, mask: u64) -> u64 {
    let g = Graph::from_pair_mask(n, mask);
    let mut color: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&w| color[w]).collect();
                nb.sort_unstable();
                (color[v], nb)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        let next: Vec<usize> = sigs
            .iter()
            .map(|s| distinct.binary_search(s).expect("present"))
            .collect();
        let before = {
            let mut c = color.clone();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        color = next;
        if distinct.len() == before {
            break;
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| color[v]);
    for v in order {
        match classes.last_mut() {
            Some(c) if color[c[0]] == color[v] => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    // position[v] = new label; enumerate orderings inside each class
    let mut best = u64::MAX;
    let mut labels = vec![0usize; n];
    fn rec(
        classes: &mut [Vec<usize>],
        ci: usize,
        start: usize,
        labels: &mut Vec<usize>,
        g: &Graph,
        best: &mut u64,
    ) {
        if ci == classes.len() {
            let mut m = 0u64;
            for &(x, y) in g.edges() {
                m |= 1 << pair_index(labels[x].min(labels[y]), labels[x].max(labels[y]));
            }
            *best = (*best).min(m);
            return;
        }
        let len = classes[ci].len();
        permute(classes, ci, 0, len, start, labels, g, best);
    }
    #[allow(clippy::too_many_arguments)]
    fn permute(
        classes: &mut [Vec<usize>],
        ci: usize,
        i: usize,
        len: usize,
        start: usize,
        labels: &mut Vec<usize>,
        g: &Graph,
        best: &mut u64,
    ) {
        if i == len {
            for (k, &v) in classes[ci].iter().enumerate() {
                labels[v] = start + k;
            }
            rec(classes, ci + 1, start + len, labels, g, best);
            return;
        }
        for j in i..len {
            classes[ci].swap(i, j);
            permute(classes, ci, i + 1, len, start, labels, g, best);
            classes[ci].swap(i, j);
        }
    }
    rec(&mut classes, 0, 0, &mut labels, &g, &mut best);
    best
}

/// Thresholds of the admissibility conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityParams {
    pub max_degree_cap: f64,
    pub d_n: f64,
    pub neighborhood_radius: usize,
    /// Connected subgraphs with fewer vertices than this may hold at most one
    /// cycle.
    pub small_subgraph_cap: usize,
    pub cycle_count_base: f64,
    /// Longest cycle length counted by condition (iv).
    pub cycle_length_cap: usize,
    pub c_param: usize,
    /// Condition (ii) looks only at neighbours of `i`, not `i` itself.
    pub exclude_self: bool,
    pub node_budget: u64,
}

impl AdmissibilityParams {
    /// Defaults from the asymptotic definition with the smallest integer `C`
    /// satisfying `alpha (1/alpha - eps + 1/C) < 1`, i.e. `C > 1/eps`.
    pub fn defaults(n: usize, eps: f64) -> Result<Self, OracleError> {
        if !(eps > 0.0) {
            return Err(OracleError::BadParams("eps must be positive".into()));
        }
        let c = (1.0 / eps).floor() as usize + 1;
        let ln = (n.max(3) as f64).ln();
        Ok(AdmissibilityParams {
            max_degree_cap: ln,
            d_n: ln.powf(1.0 / (10.0 * c as f64)),
            neighborhood_radius: 2 * c + 2,
            small_subgraph_cap: ln.ln().floor().max(0.0) as usize,
            cycle_count_base: ln,
            cycle_length_cap: n,
            c_param: c,
            exclude_self: false,
            node_budget: 50_000_000,
        })
    }

    /// Checks `alpha (1/alpha - eps + 1/C) < 1` and positivity of the caps.
    pub fn validate(&self, alpha: f64, eps: f64) -> Result<(), OracleError> {
        if self.c_param == 0 || alpha * (1.0 / alpha - eps + 1.0 / self.c_param as f64) >= 1.0 {
            return Err(OracleError::BadParams(format!(
                "C = {} violates alpha(1/alpha - eps + 1/C) < 1",
                self.c_param
            )));
        }
        if !(self.max_degree_cap > 0.0 && self.d_n > 0.0 && self.cycle_count_base > 0.0) {
            return Err(OracleError::BadParams("caps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// (i)
    MaxDegree { vertex: usize, degree: usize },
    /// (ii)
    Neighborhood { good: usize, required: f64 },
    /// (iii): a connected vertex set spanning at least two independent cycles
    SmallSubgraph { vertices: VertexSet, edges: usize },
    /// (iv)
    CycleCount { length: usize, count: u64, bound: f64 },
}

impl Violation {
    pub fn tag(&self) -> &'static str {
        match self {
            Violation::MaxDegree { .. } => "i",
            Violation::Neighborhood { .. } => "ii",
            Violation::SmallSubgraph { .. } => "iii",
            Violation::CycleCount { .. } => "iv",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityReport {
    pub ok: bool,
    pub first_violation: Option<Violation>,
}

pub fn admissibility_check(
    h: &Graph,
    params: &AdmissibilityParams,
) -> Result<AdmissibilityReport, OracleError> {
    let v = check_degree(h, params)
        .or_else(|| check_neighborhood(h, params))
        .or_else(|| check_small_subgraphs(h, params));
    let v = match v {
        Some(v) => Some(v),
        None => check_cycle_counts(h, params)?,
    };
    Ok(AdmissibilityReport {
        ok: v.is_none(),
        first_violation: v,
    })
}

fn check_degree(h: &Graph, p: &AdmissibilityParams) -> Option<Violation> {
    (0..h.n())
        .find(|&v| h.degree(v) as f64 > p.max_degree_cap)
        .map(|vertex| Violation::MaxDegree {
            vertex,
            degree: h.degree(vertex),
        })
}

fn check_neighborhood(h: &Graph, p: &AdmissibilityParams) -> Option<Violation> {
    let n = h.n();
    let high: Vec<bool> = (0..n).map(|v| h.degree(v) as f64 > p.d_n).collect();
    let mut dist = vec![usize::MAX; n];
    let mut good = 0;
    for i in 0..n {
        let mut touched = vec![i];
        dist[i] = 0;
        let mut head = 0;
        let mut clean = p.exclude_self || !high[i];
        while clean && head < touched.len() {
            let v = touched[head];
            head += 1;
            if dist[v] == p.neighborhood_radius {
                continue;
            }
            for &w in h.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    touched.push(w);
                    if high[w] && w != i {
                        clean = false;
                    }
                }
            }
        }
        for v in touched {
            dist[v] = usize::MAX;
        }
        if clean {
            good += 1;
        }
    }
    let required = (1.0 - (-p.d_n).exp()) * n as f64;
    ((good as f64) < required).then_some(Violation::Neighborhood { good, required })
}

fn check_small_subgraphs(h: &Graph, p: &AdmissibilityParams) -> Option<Violation> {
    // a connected set with |E| >= |V| + 1 spans two independent cycles
    let max_size = p.small_subgraph_cap.saturating_sub(1);
    if max_size < 4 {
        return None;
    }
    let n = h.n();
    for v in 0..n {
        // ESU: extend only by vertices larger than the root
        let mut sub = vec![v];
        let ext: Vec<usize> = h.neighbors(v).iter().copied().filter(|&w| w > v).collect();
        if let Some(found) = esu(h, &mut sub, ext, v, max_size) {
            let vertices: VertexSet = found.into_iter().collect();
            let edges = h.edges_within(&vertices);
            return Some(Violation::SmallSubgraph { vertices, edges });
        }
    }
    None
}

fn esu(
    h: &Graph,
    sub: &mut Vec<usize>,
    mut ext: Vec<usize>,
    root: usize,
    max_size: usize,
) -> Option<Vec<usize>> {
    let set: VertexSet = sub.iter().copied().collect();
    if h.edges_within(&set) > sub.len() {
        return Some(sub.clone());
    }
    if sub.len() == max_size {
        return None;
    }
    while let Some(w) = ext.pop() {
        let mut next_ext = ext.clone();
        for &x in h.neighbors(w) {
            if x > root
                && !sub.contains(&x)
                && !next_ext.contains(&x)
                && x != w
                && !sub.iter().any(|&s| h.has_edge(s, x))
            {
                next_ext.push(x);
            }
        }
        sub.push(w);
        let r = esu(h, sub, next_ext, root, max_size);
        sub.pop();
        if r.is_some() {
            return r;
        }
    }
    None
}

fn check_cycle_counts(h: &Graph, p: &AdmissibilityParams) -> Result<Option<Violation>, OracleError> {
    let counts = count_cycles(h, p.cycle_length_cap.min(h.n()), p.node_budget)?;
    for (k, &count) in counts.iter().enumerate() {
        if k < 3 {
            continue;
        }
        let bound = p.cycle_count_base.powi(k as i32);
        if count as f64 > bound {
            return Ok(Some(Violation::CycleCount {
                length: k,
                count,
                bound,
            }));
        }
    }
    Ok(None)
}

/// `counts[k]` = number of cycles of length `k` for `3 <= k <= max_len`.
///
/// Each cycle is found from its smallest vertex in both directions, so the
/// raw count is halved.
pub fn count_cycles(h: &Graph, max_len: usize, budget: u64) -> Result<Vec<u64>, OracleError> {
    let mut counts = vec![0u64; max_len + 1];
    if max_len < 3 {
        return Ok(counts);
    }
    let mut on_path = vec![false; h.n()];
    let mut nodes = 0u64;
    for s in 0..h.n() {
        on_path[s] = true;
        // explicit stack of (vertex, next neighbour index)
        let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, idx) = (top.0, top.1);
            let nb = h.neighbors(v);
            if idx == nb.len() {
                if v != s {
                    on_path[v] = false;
                }
                stack.pop();
                continue;
            }
            top.1 += 1;
            let w = nb[idx];
            let depth = stack.len();
            if w == s && depth >= 3 {
                counts[depth] += 1;
                continue;
            }
            if w > s && !on_path[w] && depth < max_len {
                nodes += 1;
                if nodes > budget {
                    return Err(OracleError::CycleEnumerationBudget(budget));
                }
                on_path[w] = true;
                stack.push((w, 0));
            }
        }
        on_path[s] = false;
    }
    for c in counts.iter_mut() {
        *c /= 2;
    }
    Ok(counts)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventDResult {
    pub holds: bool,
    pub sampled: bool,
    /// A subset violating the bound, if one was found.
    pub witness: Option<VertexSet>,
}

pub const EVENT_D_EXHAUSTIVE_MAX_N: usize = 20;
pub const EVENT_D_SAMPLES: usize = 100_000;

/// Whether every `U` satisfies `#{edges touching U} <= D|U| + delta n / 2`.
/// Exhaustive for `n <= 20`; otherwise `EVENT_D_SAMPLES` random subsets of
/// uniformly random size.
pub fn event_d_check(g: &Graph, d: f64, delta: f64, seed: u64) -> EventDResult {
    let n = g.n();
    let m = g.edge_count();
    let slack = delta * n as f64 / 2.0;
    let bound = |size: usize| d * size as f64 + slack;
    if n <= EVENT_D_EXHAUSTIVE_MAX_N {
        let e = subset_edge_counts(g);
        let full = (1usize << n) - 1;
        for u in 0usize..(1 << n) {
            let touching = m - e[full & !u] as usize;
            if touching as f64 > bound(u.count_ones() as usize) {
                return EventDResult {
                    holds: false,
                    sampled: false,
                    witness: Some(VertexSet::from_bits(u as u64, n)),
                };
            }
        }
        return EventDResult {
            holds: true,
            sampled: false,
            witness: None,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_u = vec![false; n];
    let mut verts: Vec<usize> = (0..n).collect();
    for _ in 0..EVENT_D_SAMPLES {
        let size = rng.random_range(1..=n);
        // partial Fisher-Yates for the first `size` slots
        for i in 0..size {
            let j = rng.random_range(i..n);
            verts.swap(i, j);
        }
        for &v in &verts[..size] {
            in_u[v] = true;
        }
        let touching = g
            .edges()
            .iter()
            .filter(|&&(x, y)| in_u[x] || in_u[y])
            .count();
        let violated = touching as f64 > bound(size);
        let witness: Option<VertexSet> = violated.then(|| verts[..size].iter().copied().collect());
        for &v in &verts[..size] {
            in_u[v] = false;
        }
        if violated {
            return EventDResult {
                holds: false,
                sampled: true,
                witness,
            };
        }
    }
    EventDResult {
        holds: true,
        sampled: true,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn g(n: usize, e: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, e.iter().copied()).unwrap()
    }

    fn k4() -> Graph {
        g(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    #[test]
    fn qp_symmetric_cases() {
        let l = loads_qp_oracle(&g(2, &[(0, 1)]), 1e-12).unwrap();
        assert!(l.iter().all(|x| (x - 0.5).abs() < 1e-12));
        let l = loads_qp_oracle(&g(3, &[(0, 1), (1, 2), (0, 2)]), 1e-12).unwrap();
        assert!(l.iter().all(|x| (x - 1.0).abs() < 1e-12));
        let l = loads_qp_oracle(&g(3, &[(0, 1), (1, 2)]), 1e-13).unwrap();
        assert!(l.iter().all(|x| (x - 2.0 / 3.0).abs() < 1e-7), "{l:?}");
        assert_eq!(
            loads_qp_oracle(&k4(), 0.0).unwrap_err(),
            OracleError::BadTolerance
        );
    }

    #[test]
    fn bruteforce_maximizers() {
        let tri = g(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(ft_bruteforce(&tri, int(1)).unwrap(), (int(0), VertexSet::full(3)));
        assert_eq!(ft_bruteforce(&tri, rat(1, 2)).unwrap(), (int(0), VertexSet::new()));
        assert!(matches!(
            ft_bruteforce(&Graph::empty(21), int(1)),
            Err(OracleError::TooLarge { .. })
        ));
    }

    #[test]
    fn densest() {
        assert_eq!(densest_density(&k4()).unwrap(), rat(3, 2));
        let mut e = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        e.extend([(3, 4), (4, 5), (5, 6)]);
        assert_eq!(densest_density(&g(7, &e)).unwrap(), rat(3, 2));
        assert_eq!(densest_density(&g(3, &[(0, 1), (1, 2)])).unwrap(), rat(2, 3));
        assert_eq!(densest_density(&Graph::empty(4)).unwrap(), int(0));
    }

    #[test]
    fn isomorphism_class_counts() {
        let counts: Vec<usize> = (0..=7).map(|n| nonisomorphic_graphs(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 11, 34, 156, 1044]);
        let conn: Vec<usize> = (1..=7)
            .map(|n| connected_nonisomorphic_graphs(n).unwrap().len())
            .collect();
        assert_eq!(conn, vec![1, 1, 2, 6, 21, 112, 853]);
    }

    #[test]
    fn admissibility_examples() {
        let p = AdmissibilityParams::defaults(100, 0.3).unwrap();
        assert!(admissibility_check(&Graph::empty(100), &p).unwrap().ok);

        let star = Graph::from_edges(12, (1..12).map(|i| (0, i))).unwrap();
        let r = admissibility_check(&star, &AdmissibilityParams::defaults(12, 0.3).unwrap()).unwrap();
        assert_eq!(r.first_violation.unwrap().tag(), "i");

        let diamond = g(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]);
        let mut p = AdmissibilityParams::defaults(4, 0.3).unwrap();
        p.max_degree_cap = 10.0;
        p.d_n = 10.0;
        p.small_subgraph_cap = 6;
        let r = admissibility_check(&diamond, &p).unwrap();
        match r.first_violation.unwrap() {
            Violation::SmallSubgraph { vertices, edges } => {
                assert_eq!(vertices.len(), 4);
                assert_eq!(edges, 5);
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn cycle_counting() {
        let c = count_cycles(&k4(), 4, 1_000_000).unwrap();
        assert_eq!(&c[3..], &[4, 3]);
        let mut p = AdmissibilityParams::defaults(4, 0.3).unwrap();
        p.max_degree_cap = 10.0;
        p.d_n = 10.0;
        p.small_subgraph_cap = 0;
        p.cycle_count_base = 1.2;
        let r = admissibility_check(&k4(), &p).unwrap();
        assert_eq!(r.first_violation.unwrap().tag(), "iv");
        p.node_budget = 2;
        assert!(matches!(
            admissibility_check(&k4(), &p),
            Err(OracleError::CycleEnumerationBudget(2))
        ));
    }

    #[test]
    fn neighborhood_condition() {
        // a path: every degree is at most 2
        let path = Graph::from_edges(10, (0..9).map(|i| (i, i + 1))).unwrap();
        let mut p = AdmissibilityParams::defaults(10, 0.5).unwrap();
        p.d_n = 2.0;
        assert!(admissibility_check(&path, &p).unwrap().ok);
        p.d_n = 1.5;
        p.neighborhood_radius = 1;
        let r = admissibility_check(&path, &p).unwrap();
        assert_eq!(r.first_violation.unwrap().tag(), "ii");
    }

    #[test]
    fn params_validation() {
        let p = AdmissibilityParams::defaults(100, 0.25).unwrap();
        assert_eq!(p.c_param, 5);
        p.validate(1.0, 0.25).unwrap();
        let mut q = p.clone();
        q.c_param = 4;
        assert!(q.validate(1.0, 0.25).is_err());
    }

    #[test]
    fn event_d_examples() {
        assert!(event_d_check(&Graph::empty(5), 0.0, 0.0, 1).holds);
        assert!(event_d_check(&k4(), 3.0, 0.0, 1).holds);
        let r = event_d_check(&k4(), 1.0, 0.0, 1);
        assert!(!r.holds && !r.sampled);
        assert_eq!(r.witness.unwrap().len(), 1);
        let big = Graph::from_edges(30, (0..29).map(|i| (i, i + 1))).unwrap();
        let r = event_d_check(&big, 2.0, 0.0, 7);
        assert!(r.holds && r.sampled);
    }
}
