//! Orbits of the pair permutation `Σ(i, j) = (σ(i), σ(j))`.
//!
//! The vertex permutation is `σ = π*⁻¹ ∘ π`, which is the one for which
//! `Σ`-orbits carry the dependence structure of `H_π` under the convention
//! of [`crate::intersect`]: the edge indicator of `(i, j)` in `H_π` reads the
//! parent indicators of `(i, j)` and of `Σ(i, j)`. Entry points taking `σ`
//! directly are also provided.

use std::collections::HashSet;
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::graph::{pair_index, Graph, VertexSet};
use crate::intersect::{Matching, PartialMatching};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitError {
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("nesting violated: {0}")]
    NestingViolation(String),
    #[error("graph on {got} vertices does not match a decomposition on {want}")]
    UniverseMismatch { want: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrbitKind {
    Cycle,
    SpecialCycle,
    FreeChain,
    ConfinedChain,
}

impl OrbitKind {
    pub fn name(self) -> &'static str {
        match self {
            OrbitKind::Cycle => "cycle",
            OrbitKind::SpecialCycle => "special",
            OrbitKind::FreeChain => "free",
            OrbitKind::ConfinedChain => "confined",
        }
    }

    pub fn is_chain(self) -> bool {
        matches!(self, OrbitKind::FreeChain | OrbitKind::ConfinedChain)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub kind: OrbitKind,
    /// `pairs[t + 1] = Σ(pairs[t])`; cycles start at their smallest pair.
    pub pairs: Vec<(usize, usize)>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDecomposition {
    pub n: usize,
    pub orbits: Vec<Orbit>,
    /// `census[k]` = number of vertices of `u \ u_prev` on complete
    /// `σ`-cycles of length `k`; index 0 is unused.
    pub census: Vec<usize>,
    /// The permutation `σ` restricted to `u`.
    pub sigma: Vec<Option<usize>>,
}

fn canon(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Partial permutation on `0..n` with both directions cached.
struct PartialPerm {
    fwd: Vec<Option<usize>>,
    inv: Vec<Option<usize>>,
}

impl PartialPerm {
    fn new(fwd: Vec<Option<usize>>) -> Self {
        let mut inv = vec![None; fwd.len()];
        for (x, y) in fwd.iter().enumerate() {
            if let Some(y) = *y {
                inv[y] = Some(x);
            }
        }
        PartialPerm { fwd, inv }
    }

    fn pair_fwd(&self, (a, b): (usize, usize)) -> Option<(usize, usize)> {
        Some(canon(self.fwd[a]?, self.fwd[b]?))
    }

    fn pair_inv(&self, (a, b): (usize, usize)) -> Option<(usize, usize)> {
        Some(canon(self.inv[a]?, self.inv[b]?))
    }

    /// Length of the cycle through `x` if it closes inside the domain.
    fn cycle_len(&self, x: usize) -> Option<usize> {
        let mut y = self.fwd[x]?;
        let mut len = 1;
        while y != x {
            y = self.fwd[y]?;
            len += 1;
        }
        Some(len)
    }

    fn power(&self, mut x: usize, k: usize) -> Option<usize> {
        for _ in 0..k {
            x = self.fwd[x]?;
        }
        Some(x)
    }
}

/// `σ = π*⁻¹ ∘ π`.
pub fn sigma_of(pi_star: &Matching, pi: &Matching) -> Result<Matching, OrbitError> {
    if pi_star.n() != pi.n() {
        return Err(OrbitError::SizeMismatch(pi_star.n(), pi.n()));
    }
    Ok(pi_star.inverse().compose(pi).expect("sizes agree"))
}

/// Decomposition of all pairs into `Σ`-cycles.
pub fn decompose_orbits(pi_star: &Matching, pi: &Matching) -> Result<OrbitDecomposition, OrbitError> {
    Ok(decompose_sigma(&sigma_of(pi_star, pi)?))
}

pub fn decompose_sigma(sigma: &Matching) -> OrbitDecomposition {
    let n = sigma.n();
    decompose_sigma_restricted(sigma, &VertexSet::new(), &[], &VertexSet::full(n))
        .expect("trivial nesting")
}

/// Decomposition of `E(u) \ E(u_prev)` for a partial matching on `u`.
/// `e_prev` holds pairs inside `u_prev`.
pub fn decompose_orbits_restricted(
    pi_star: &Matching,
    pi_check: &PartialMatching,
    u_prev: &VertexSet,
    e_prev: &[(usize, usize)],
    u: &VertexSet,
) -> Result<OrbitDecomposition, OrbitError> {
    let n = pi_star.n();
    if pi_check.n() != n {
        return Err(OrbitError::SizeMismatch(n, pi_check.n()));
    }
    let inv = pi_star.inverse();
    let mut fwd = vec![None; n];
    for x in u.iter() {
        let y = pi_check
            .get(x)
            .ok_or_else(|| OrbitError::NestingViolation(format!("{x} in u but not in the domain")))?;
        fwd[x] = Some(inv.apply(y));
    }
    decompose_partial(n, PartialPerm::new(fwd), u_prev, e_prev, u)
}

/// As [`decompose_orbits_restricted`] with `σ` given directly; only its
/// values on `u` are used.
pub fn decompose_sigma_restricted(
    sigma: &Matching,
    u_prev: &VertexSet,
    e_prev: &[(usize, usize)],
    u: &VertexSet,
) -> Result<OrbitDecomposition, OrbitError> {
    let n = sigma.n();
    if let Some(v) = u.max().filter(|&v| v >= n) {
        return Err(OrbitError::NestingViolation(format!("vertex {v} out of range")));
    }
    let mut fwd = vec![None; n];
    for x in u.iter() {
        fwd[x] = Some(sigma.apply(x));
    }
    decompose_partial(n, PartialPerm::new(fwd), u_prev, e_prev, u)
}

fn decompose_partial(
    n: usize,
    sigma: PartialPerm,
    u_prev: &VertexSet,
    e_prev: &[(usize, usize)],
    u: &VertexSet,
) -> Result<OrbitDecomposition, OrbitError> {
    if !u_prev.is_subset(u) {
        return Err(OrbitError::NestingViolation("u_prev is not a subset of u".into()));
    }
    let in_u = u.to_mask(n);
    let in_prev = u_prev.to_mask(n);
    let mut prev_edges = HashSet::new();
    for &(a, b) in e_prev {
        if a == b || a >= n || b >= n || !in_prev[a] || !in_prev[b] {
            return Err(OrbitError::NestingViolation(format!(
                "conditioned pair ({a},{b}) not inside u_prev"
            )));
        }
        prev_edges.insert(canon(a, b));
    }
    let in_universe =
        |(a, b): (usize, usize)| in_u[a] && in_u[b] && !(in_prev[a] && in_prev[b]);
    let members: Vec<usize> = u.iter().collect();
    let mut visited = HashSet::new();
    let mut orbits = Vec::new();
    for (k, &a) in members.iter().enumerate() {
        for &b in &members[k + 1..] {
            let e = (a, b);
            if !in_universe(e) || visited.contains(&e) {
                continue;
            }
            // walk back to the head of a chain, or around a cycle
            let mut head = e;
            let mut is_cycle = false;
            while let Some(p) = sigma.pair_inv(head).filter(|&p| in_universe(p)) {
                if p == e {
                    is_cycle = true;
                    break;
                }
                head = p;
            }
            let mut pairs = vec![head];
            let mut cur = head;
            while let Some(nx) = sigma.pair_fwd(cur).filter(|&q| in_universe(q)) {
                if nx == head {
                    break;
                }
                pairs.push(nx);
                cur = nx;
            }
            visited.extend(pairs.iter().copied());
            let kind = if is_cycle {
                let start = pairs
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, p)| **p)
                    .map(|(i, _)| i)
                    .unwrap();
                pairs.rotate_left(start);
                if is_special(&sigma, pairs[0]) {
                    OrbitKind::SpecialCycle
                } else {
                    OrbitKind::Cycle
                }
            } else {
                let tail = *pairs.last().unwrap();
                let hits = |q: Option<(usize, usize)>| q.is_some_and(|q| prev_edges.contains(&q));
                if hits(sigma.pair_fwd(tail)) || hits(sigma.pair_inv(pairs[0])) {
                    OrbitKind::ConfinedChain
                } else {
                    OrbitKind::FreeChain
                }
            };
            orbits.push(Orbit { kind, pairs });
        }
    }
    orbits.sort_by_key(|o| o.pairs[0]);
    let mut census = vec![0usize; n + 1];
    for x in u.iter().filter(|&x| !in_prev[x]) {
        if let Some(len) = sigma.cycle_len(x) {
            census[len] += 1;
        }
    }
    Ok(OrbitDecomposition {
        n,
        orbits,
        census,
        sigma: sigma.fwd,
    })
}

fn is_special(sigma: &PartialPerm, (x, y): (usize, usize)) -> bool {
    match sigma.cycle_len(x) {
        Some(m) if m % 2 == 0 => sigma.power(x, m / 2) == Some(y),
        _ => false,
    }
}

impl OrbitDecomposition {
    /// `n_σ(x)` if the `σ`-cycle through `x` lies inside the domain.
    pub fn sigma_cycle_len(&self, x: usize) -> Option<usize> {
        PartialPerm::new(self.sigma.clone()).cycle_len(x)
    }

    pub fn pair_count(&self) -> usize {
        self.orbits.iter().map(Orbit::len).sum()
    }

    /// Structural checks: successor relation, the lcm law for ordinary
    /// cycles and the half-length law for special cycles.
    pub fn check_laws(&self) -> Result<(), String> {
        let perm = PartialPerm::new(self.sigma.clone());
        let mut seen = HashSet::new();
        for (k, o) in self.orbits.iter().enumerate() {
            for w in o.pairs.windows(2) {
                if perm.pair_fwd(w[0]) != Some(w[1]) {
                    return Err(format!("orbit {k}: successor broken at {:?}", w[0]));
                }
            }
            for &p in &o.pairs {
                if !seen.insert(p) {
                    return Err(format!("pair {p:?} in two orbits"));
                }
            }
            let (x, y) = o.pairs[0];
            match o.kind {
                OrbitKind::Cycle | OrbitKind::SpecialCycle => {
                    if perm.pair_fwd(*o.pairs.last().unwrap()) != Some(o.pairs[0]) {
                        return Err(format!("orbit {k}: cycle does not close"));
                    }
                    let (nx, ny) = match (perm.cycle_len(x), perm.cycle_len(y)) {
                        (Some(a), Some(b)) => (a, b),
                        _ => return Err(format!("orbit {k}: vertex cycle incomplete")),
                    };
                    let want = if o.kind == OrbitKind::SpecialCycle {
                        nx / 2
                    } else {
                        nx.lcm(&ny)
                    };
                    if o.len() != want {
                        return Err(format!("orbit {k}: length {} expected {want}", o.len()));
                    }
                }
                OrbitKind::FreeChain | OrbitKind::ConfinedChain => {}
            }
        }
        Ok(())
    }

    /// One orbit per line: `kind:length: (i,j) (k,l) ...`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for OrbitDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.orbits {
            write!(f, "{}:{}:", o.kind.name(), o.len())?;
            for (a, b) in &o.pairs {
                write!(f, " ({a},{b})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Edge counts of an intersection graph per orbit class.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrbitCounts {
    pub e_special: u64,
    /// `e_k[k]` for `1 <= k <= k_max`; index 0 is unused.
    pub e_k: Vec<u64>,
    pub e_gt_l: u64,
    pub e_chain_free: u64,
    pub e_chain_confined: u64,
}

impl OrbitCounts {
    pub fn total(&self) -> u64 {
        self.e_special
            + self.e_k.iter().sum::<u64>()
            + self.e_gt_l
            + self.e_chain_free
            + self.e_chain_confined
    }

    pub fn k_max(&self) -> usize {
        self.e_k.len().saturating_sub(1)
    }
}

pub fn orbit_edge_counts(
    decomp: &OrbitDecomposition,
    h: &Graph,
    k_max: usize,
) -> Result<OrbitCounts, OrbitError> {
    if h.n() != decomp.n {
        return Err(OrbitError::UniverseMismatch {
            want: decomp.n,
            got: h.n(),
        });
    }
    let mut c = OrbitCounts {
        e_k: vec![0; k_max + 1],
        ..OrbitCounts::default()
    };
    for o in &decomp.orbits {
        let edges = o.pairs.iter().filter(|&&(a, b)| h.has_edge(a, b)).count() as u64;
        match o.kind {
            OrbitKind::SpecialCycle => c.e_special += edges,
            OrbitKind::FreeChain => c.e_chain_free += edges,
            OrbitKind::ConfinedChain => c.e_chain_confined += edges,
            OrbitKind::Cycle if o.len() <= k_max => c.e_k[o.len()] += edges,
            OrbitKind::Cycle => c.e_gt_l += edges,
        }
    }
    Ok(c)
}

/// `sum_{t<=k} E_t <= u_k sum_{t<=k} |N_t|` for every `1 <= k <= k_max`.
pub fn constraint_check_ek(counts: &OrbitCounts, census: &[usize], u_k: Rational) -> bool {
    let mut e_sum = 0i64;
    let mut n_sum = 0i64;
    for k in 1..=counts.k_max() {
        e_sum += counts.e_k[k] as i64;
        n_sum += census.get(k).copied().unwrap_or(0) as i64;
        if Rational::from_integer(e_sum) > u_k * Rational::from_integer(n_sum) {
            return false;
        }
    }
    true
}

/// Pair index of every pair in the universe of a decomposition, sorted.
pub fn universe_pairs(decomp: &OrbitDecomposition) -> Vec<usize> {
    let mut v: Vec<usize> = decomp
        .orbits
        .iter()
        .flat_map(|o| o.pairs.iter().map(|&(a, b)| pair_index(a, b)))
        .collect();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn kinds(d: &OrbitDecomposition) -> Vec<(OrbitKind, Vec<(usize, usize)>)> {
        d.orbits.iter().map(|o| (o.kind, o.pairs.clone())).collect()
    }

    #[test]
    fn identity_gives_fixed_pairs() {
        let id = Matching::identity(5);
        let d = decompose_orbits(&id, &id).unwrap();
        assert_eq!(d.orbits.len(), 10);
        assert!(d.orbits.iter().all(|o| o.kind == OrbitKind::Cycle && o.len() == 1));
        d.check_laws().unwrap();
        assert_eq!(d.census[1], 5);
    }

    #[test]
    fn transposition_example() {
        let sigma = Matching::from_cycles(4, &[&[0, 1]]).unwrap();
        let d = decompose_sigma(&sigma);
        assert_eq!(
            kinds(&d),
            vec![
                (OrbitKind::SpecialCycle, vec![(0, 1)]),
                (OrbitKind::Cycle, vec![(0, 2), (1, 2)]),
                (OrbitKind::Cycle, vec![(0, 3), (1, 3)]),
                (OrbitKind::Cycle, vec![(2, 3)]),
            ]
        );
        d.check_laws().unwrap();
        assert_eq!(
            d.to_text(),
            "special:1: (0,1)\ncycle:2: (0,2) (1,2)\ncycle:2: (0,3) (1,3)\ncycle:1: (2,3)\n"
        );
    }

    #[test]
    fn three_cycle_example() {
        let sigma = Matching::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        let d = decompose_sigma(&sigma);
        assert_eq!(d.orbits.len(), 1);
        assert_eq!(d.orbits[0].len(), 3);
        d.check_laws().unwrap();
    }

    #[test]
    fn sigma_from_matchings() {
        let pi_star = Matching::new(vec![2, 0, 1, 3]).unwrap();
        let pi = Matching::new(vec![0, 2, 1, 3]).unwrap();
        let s = sigma_of(&pi_star, &pi).unwrap();
        for x in 0..4 {
            assert_eq!(pi_star.apply(s.apply(x)), pi.apply(x));
        }
        assert_eq!(decompose_orbits(&pi_star, &pi).unwrap(), decompose_sigma(&s));
    }

    #[test]
    fn restricted_chains() {
        let sigma = Matching::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        let u = VertexSet::from([0, 1, 2]);
        let d = decompose_sigma_restricted(&sigma, &VertexSet::new(), &[], &u).unwrap();
        assert_eq!(
            kinds(&d),
            vec![
                (OrbitKind::FreeChain, vec![(0, 1), (1, 2)]),
                (OrbitKind::FreeChain, vec![(0, 2)]),
            ]
        );
        assert!(d.census.iter().all(|&c| c == 0));
    }

    #[test]
    fn confined_chain() {
        // σ = (0 1 2 3 4), u_prev = {0, 1}, u = {0, 1, 2, 3}: the chain
        // ((1,2),(2,3)) is preceded by (0,1), a pair of u_prev; the others
        // leave u at both ends.
        let sigma = Matching::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap();
        let u_prev = VertexSet::from([0, 1]);
        let u = VertexSet::from([0, 1, 2, 3]);
        let free = decompose_sigma_restricted(&sigma, &u_prev, &[], &u).unwrap();
        assert!(free.orbits.iter().all(|o| o.kind == OrbitKind::FreeChain));
        let d = decompose_sigma_restricted(&sigma, &u_prev, &[(0, 1)], &u).unwrap();
        let confined: Vec<_> = d
            .orbits
            .iter()
            .filter(|o| o.kind == OrbitKind::ConfinedChain)
            .map(|o| o.pairs.clone())
            .collect();
        assert_eq!(confined, vec![vec![(1, 2), (2, 3)]]);
        assert!(decompose_sigma_restricted(&sigma, &u_prev, &[(0, 2)], &u).is_err());
        assert!(decompose_sigma_restricted(&sigma, &u, &[], &u_prev).is_err());
    }

    #[test]
    fn restricted_matches_full_when_nothing_removed() {
        let pi_star = Matching::new(vec![3, 1, 0, 4, 2, 5]).unwrap();
        let pi = Matching::new(vec![1, 0, 3, 2, 5, 4]).unwrap();
        let all = VertexSet::full(6);
        let pm = PartialMatching::restrict(&pi, &all).unwrap();
        let r = decompose_orbits_restricted(&pi_star, &pm, &VertexSet::new(), &[], &all).unwrap();
        assert_eq!(r, decompose_orbits(&pi_star, &pi).unwrap());
        assert!(r.orbits.iter().all(|o| !o.kind.is_chain()));
    }

    #[test]
    fn edge_counts() {
        let id = Matching::identity(4);
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let d = decompose_orbits(&id, &id).unwrap();
        let c = orbit_edge_counts(&d, &g, 3).unwrap();
        assert_eq!(c.e_k[1], 3);
        assert_eq!(c.total(), 3);

        let sigma = Matching::from_cycles(4, &[&[0, 1]]).unwrap();
        let d = decompose_sigma(&sigma);
        let h = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (2, 3)]).unwrap();
        let c = orbit_edge_counts(&d, &h, 1).unwrap();
        assert_eq!((c.e_special, c.e_k[1], c.e_gt_l), (1, 1, 2));
        assert!(orbit_edge_counts(&d, &Graph::empty(3), 1).is_err());
    }

    #[test]
    fn constraint_examples() {
        let zero = OrbitCounts {
            e_k: vec![0; 4],
            ..Default::default()
        };
        assert!(constraint_check_ek(&zero, &[0, 0, 0, 0], int(1)));
        let dense = OrbitCounts {
            e_k: vec![0, 6, 0],
            ..Default::default()
        };
        assert!(!constraint_check_ek(&dense, &[0, 4, 0], int(1)));
        assert!(constraint_check_ek(&dense, &[0, 4, 0], int(3) / int(2)));
    }
}
