//! Exact balanced loads.
//!
//! The load function is computed as the density decomposition of the graph:
//! nested maximal maximizers of `|E(W)| - d|W|` for a decreasing sequence of
//! densities `d`. Every maximizer query is one parametric min-cut with
//! integer capacities, so all loads are exact rationals with denominators at
//! most the size of their connected component.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::flow::{Capacity, FlowError, FlowNetwork};
use crate::graph::{Graph, VertexSet};
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BalanceError {
    #[error("t must be positive, got {0}")]
    NonPositiveT(Rational),
    #[error("stability constant needs 0 < r < t (t = {t}, r = {r})")]
    BadOrder { t: Rational, r: Rational },
    #[error("epsilon must be positive")]
    NonPositive,
    #[error("allocation missing directed edge {0:?}")]
    DomainMismatch((usize, usize)),
    #[error("allocation invalid on edge {0:?}: values must lie in [0,1] and sum to 1")]
    InvalidAllocation((usize, usize)),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("load profile parse error: {0}")]
    Parse(String),
}

/// `t |E(U)| - |U|`.
pub fn ft_value(g: &Graph, t: Rational, u: &VertexSet) -> Result<Rational, BalanceError> {
    if !t.is_positive() {
        return Err(BalanceError::NonPositiveT(t));
    }
    check_range(g, u)?;
    Ok(t * Rational::from_integer(g.edges_within(u) as i64)
        - Rational::from_integer(u.len() as i64))
}

fn check_range(g: &Graph, u: &VertexSet) -> Result<(), BalanceError> {
    match u.max() {
        Some(v) if v >= g.n() => Err(BalanceError::OutOfRange { vertex: v, n: g.n() }),
        _ => Ok(()),
    }
}

/// Maximum-cardinality maximizer of `f_t(W) = t|E(W)| - |W|`.
///
/// With `t = a/b` the network is `source -> edge (a)`, `edge -> endpoint
/// (unbounded)`, `vertex -> sink (b)`; the maximal source side of a minimum
/// cut is the largest maximizer.
pub fn ft_max_set(g: &Graph, t: Rational) -> Result<VertexSet, BalanceError> {
    if !t.is_positive() {
        return Err(BalanceError::NonPositiveT(t));
    }
    let (a, b) = (*t.numer() as u64, *t.denom() as u64);
    let n = g.n();
    let m = g.edge_count();
    let mut net = FlowNetwork::new(n + m + 2, 0, 1)?;
    let vnode = |v: usize| 2 + v;
    for v in 0..n {
        net.add_arc(vnode(v), 1, b)?;
    }
    for (k, &(x, y)) in g.edges().iter().enumerate() {
        let e = 2 + n + k;
        net.add_arc(0, e, a)?;
        net.add_arc(e, vnode(x), Capacity::Unbounded)?;
        net.add_arc(e, vnode(y), Capacity::Unbounded)?;
    }
    let cut = net.solve()?;
    Ok((0..n).filter(|&v| cut.source_side_max[vnode(v)]).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub density: Rational,
    pub vertices: VertexSet,
}

/// Exact balanced loads plus the density decomposition that produced them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadProfile {
    pub loads: Vec<Rational>,
    /// Strictly decreasing densities; every vertex lies in exactly one block.
    pub blocks: Vec<Block>,
}

impl LoadProfile {
    pub fn n(&self) -> usize {
        self.loads.len()
    }

    pub fn max_load(&self) -> Option<Rational> {
        self.blocks.first().map(|b| b.density)
    }

    /// Checks the structural invariants against the source graph; returns a
    /// description of the first violation.
    pub fn validate(&self, g: &Graph) -> Result<(), String> {
        if self.loads.len() != g.n() {
            return Err(format!("{} loads for {} vertices", self.loads.len(), g.n()));
        }
        let mut seen = vec![false; g.n()];
        let mut total: i128 = 0;
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 && self.blocks[k - 1].density <= b.density {
                return Err(format!("block densities not decreasing at block {k}"));
            }
            if *b.density.denom() as usize > g.n().max(1) {
                return Err(format!("density {} has denominator above n", b.density));
            }
            for v in b.vertices.iter() {
                if seen[v] {
                    return Err(format!("vertex {v} in two blocks"));
                }
                seen[v] = true;
                if self.loads[v] != b.density {
                    return Err(format!("vertex {v} load differs from its block density"));
                }
            }
            let mass = *b.density.numer() as i128 * b.vertices.len() as i128;
            let den = *b.density.denom() as i128;
            if mass % den != 0 {
                return Err(format!("block {k} carries a non-integral edge mass"));
            }
            total += mass / den;
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(format!("vertex {v} in no block"));
        }
        if total != g.edge_count() as i128 {
            return Err(format!("loads sum to {total}, expected {}", g.edge_count()));
        }
        Ok(())
    }

    /// Text form: `loads <n>` followed by `vertex num/den` lines, then
    /// `blocks <k>` followed by `num/den v1 v2 ...` lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("loads {}\n", self.loads.len());
        for (v, l) in self.loads.iter().enumerate() {
            let _ = writeln!(s, "{v} {}", format_rational(l));
        }
        let _ = writeln!(s, "blocks {}", self.blocks.len());
        for b in &self.blocks {
            s.push_str(&format_rational(&b.density));
            for v in b.vertices.iter() {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<LoadProfile, BalanceError> {
        let err = |m: &str| BalanceError::Parse(m.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| err("missing loads header"))?;
        let n: usize = header
            .strip_prefix("loads ")
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| err("bad loads header"))?;
        let mut loads = Vec::with_capacity(n);
        for expect in 0..n {
            let line = lines.next().ok_or_else(|| err("truncated loads"))?;
            let (v, r) = line.trim().split_once(' ').ok_or_else(|| err("bad load line"))?;
            if v.parse::<usize>().ok() != Some(expect) {
                return Err(err("load lines out of order"));
            }
            loads.push(parse_rational(r).ok_or_else(|| err("bad rational"))?);
        }
        let header = lines.next().ok_or_else(|| err("missing blocks header"))?;
        let k: usize = header
            .strip_prefix("blocks ")
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| err("bad blocks header"))?;
        let mut blocks = Vec::with_capacity(k);
        for _ in 0..k {
            let line = lines.next().ok_or_else(|| err("truncated blocks"))?;
            let mut toks = line.split_whitespace();
            let density = toks
                .next()
                .and_then(parse_rational)
                .ok_or_else(|| err("bad block density"))?;
            let vertices = toks
                .map(|t| t.parse::<usize>().map_err(|_| err("bad block vertex")))
                .collect::<Result<VertexSet, _>>()?;
            blocks.push(Block { density, vertices });
        }
        if lines.next().is_some() {
            return Err(err("trailing content"));
        }
        Ok(LoadProfile { loads, blocks })
    }
}

/// Exact balanced loads of `g`.
pub fn balanced_loads(g: &Graph) -> LoadProfile {
    let mut loads = vec![Rational::zero(); g.n()];
    let mut by_density: BTreeMap<std::cmp::Reverse<Rational>, Vec<usize>> = BTreeMap::new();
    let mut dec = Decomposer::new(g);
    for comp in g.components() {
        for (density, verts) in dec.decompose_component(comp) {
            for &v in &verts {
                loads[v] = density;
            }
            by_density
                .entry(std::cmp::Reverse(density))
                .or_default()
                .extend(verts);
        }
    }
    let blocks: Vec<Block> = by_density
        .into_iter()
        .map(|(std::cmp::Reverse(density), verts)| Block {
            density,
            vertices: verts.into(),
        })
        .collect();
    for b in &blocks {
        assert!(
            *b.density.denom() as usize <= g.n(),
            "density {} violates the denominator bound for n = {}",
            b.density,
            g.n()
        );
    }
    LoadProfile { loads, blocks }
}

/// Scratch state for peeling one component into blocks, densest first.
///
/// Invariant: while a candidate segment `M` is being processed, the set of
/// already-assigned vertices is exactly the union of all blocks denser than
/// every load in `M`. Edges from `M` into that set count fully toward `M`.
struct Decomposer<'g> {
    g: &'g Graph,
    assigned: Vec<bool>,
    local: Vec<usize>,
}

const UNSET: usize = usize::MAX;

impl<'g> Decomposer<'g> {
    fn new(g: &'g Graph) -> Self {
        Decomposer {
            g,
            assigned: vec![false; g.n()],
            local: vec![UNSET; g.n()],
        }
    }

    fn decompose_component(&mut self, comp: Vec<usize>) -> Vec<(Rational, Vec<usize>)> {
        let mut out = Vec::new();
        let mut stack = vec![comp];
        while let Some(seg) = stack.pop() {
            for (k, &v) in seg.iter().enumerate() {
                self.local[v] = k;
            }
            let mut bonus = vec![0u64; seg.len()];
            let mut internal = Vec::new();
            for (k, &v) in seg.iter().enumerate() {
                for &w in self.g.neighbors(v) {
                    if self.assigned[w] {
                        bonus[k] += 1;
                    } else if self.local[w] != UNSET && v < w {
                        internal.push((k, self.local[w]));
                    }
                }
            }
            let mass = internal.len() as i64 + bonus.iter().sum::<u64>() as i64;
            let density = Rational::new(mass, seg.len() as i64);
            let split = if mass == 0 {
                None
            } else {
                self.upper_part(&bonus, &internal, density)
            };
            for &v in &seg {
                self.local[v] = UNSET;
            }
            match split {
                None => {
                    for &v in &seg {
                        self.assigned[v] = true;
                    }
                    out.push((density, seg));
                }
                Some(upper) => {
                    let (hi, lo): (Vec<usize>, Vec<usize>) = seg
                        .iter()
                        .enumerate()
                        .partition(|(k, _)| upper[*k])
                        .into_iter_pair();
                    assert!(
                        !hi.is_empty() && !lo.is_empty(),
                        "density split failed to make progress"
                    );
                    stack.push(lo);
                    stack.push(hi);
                }
            }
        }
        out
    }

    /// Largest maximizer of `q(|E(X)| + sum bonus) - p|X|` over subsets of the
    /// segment, where `density = p/q`. Returns `None` when that maximizer is
    /// the whole segment (a single block).
    fn upper_part(
        &self,
        bonus: &[u64],
        internal: &[(usize, usize)],
        density: Rational,
    ) -> Option<Vec<bool>> {
        let (p, q) = (*density.numer() as u64, *density.denom() as u64);
        let s = bonus.len();
        let mut net = FlowNetwork::new(s + internal.len() + 2, 0, 1).expect("valid terminals");
        for (k, &b) in bonus.iter().enumerate() {
            net.add_arc(2 + k, 1, p).expect("in range");
            if b > 0 {
                net.add_arc(0, 2 + k, q * b).expect("in range");
            }
        }
        for (j, &(x, y)) in internal.iter().enumerate() {
            let e = 2 + s + j;
            net.add_arc(0, e, q).expect("in range");
            net.add_arc(e, 2 + x, Capacity::Unbounded).expect("in range");
            net.add_arc(e, 2 + y, Capacity::Unbounded).expect("in range");
        }
        let cut = net.solve().expect("finite capacities within range");
        let upper: Vec<bool> = (0..s).map(|k| cut.source_side_max[2 + k]).collect();
        if upper.iter().all(|&b| b) {
            None
        } else {
            Some(upper)
        }
    }
}

trait IntoIterPair {
    fn into_iter_pair(self) -> (Vec<usize>, Vec<usize>);
}

impl IntoIterPair for (Vec<(usize, &usize)>, Vec<(usize, &usize)>) {
    fn into_iter_pair(self) -> (Vec<usize>, Vec<usize>) {
        (
            self.0.into_iter().map(|(_, &v)| v).collect(),
            self.1.into_iter().map(|(_, &v)| v).collect(),
        )
    }
}

/// `{x : load(x) >= threshold}`, or `>` when `strict`.
pub fn load_level_set(profile: &LoadProfile, threshold: Rational, strict: bool) -> VertexSet {
    profile
        .loads
        .iter()
        .enumerate()
        .filter(|(_, l)| if strict { **l > threshold } else { **l >= threshold })
        .map(|(v, _)| v)
        .collect()
}

/// Load allocation: `theta[(x, y)]` is the share of edge `{x, y}` received
/// by `y`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Allocation {
    pub theta: BTreeMap<(usize, usize), Rational>,
}

impl Allocation {
    /// Every edge split evenly.
    pub fn uniform(g: &Graph) -> Self {
        let half = Rational::new(1, 2);
        let mut theta = BTreeMap::new();
        for &(x, y) in g.edges() {
            theta.insert((x, y), half);
            theta.insert((y, x), half);
        }
        Allocation { theta }
    }

    pub fn set(&mut self, x: usize, y: usize, to_y: Rational) {
        self.theta.insert((x, y), to_y);
        self.theta.insert((y, x), Rational::one() - to_y);
    }

    /// Load of every vertex; errors if an edge of `g` is not covered.
    pub fn loads(&self, g: &Graph) -> Result<Vec<Rational>, BalanceError> {
        let mut loads = vec![Rational::zero(); g.n()];
        for &(x, y) in g.edges() {
            let to_y = *self.theta.get(&(x, y)).ok_or(BalanceError::DomainMismatch((x, y)))?;
            let to_x = *self.theta.get(&(y, x)).ok_or(BalanceError::DomainMismatch((y, x)))?;
            let valid = |r: Rational| r >= Rational::zero() && r <= Rational::one();
            if !valid(to_x) || !valid(to_y) || to_x + to_y != Rational::one() {
                return Err(BalanceError::InvalidAllocation((x, y)));
            }
            loads[y] += to_y;
            loads[x] += to_x;
        }
        Ok(loads)
    }
}

/// Outcome of [`is_balanced`]: `witness` is the first directed edge
/// `x -> y` with `load(x) < load(y)` but `theta(x -> y) > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceCheck {
    pub balanced: bool,
    pub witness: Option<(usize, usize)>,
}

pub fn is_balanced(g: &Graph, alloc: &Allocation) -> Result<BalanceCheck, BalanceError> {
    let loads = alloc.loads(g)?;
    if let Some(&(x, y)) = alloc.theta.keys().find(|&&(x, y)| !g.has_edge(x, y)) {
        return Err(BalanceError::DomainMismatch((x, y)));
    }
    for (&(x, y), share) in &alloc.theta {
        if loads[x] < loads[y] && !share.is_zero() {
            return Ok(BalanceCheck {
                balanced: false,
                witness: Some((x, y)),
            });
        }
    }
    Ok(BalanceCheck {
        balanced: true,
        witness: None,
    })
}

/// Reconstructs one balanced allocation realizing `profile`.
///
/// Edges between blocks go entirely to the lighter endpoint. Inside a block
/// of density `p/q` the split is an integral flow scaled by `q` that
/// delivers each vertex its remaining demand.
pub fn balanced_allocation(g: &Graph, profile: &LoadProfile) -> Result<Allocation, BalanceError> {
    let mut alloc = Allocation::default();
    let mut block_of = vec![usize::MAX; g.n()];
    for (k, b) in profile.blocks.iter().enumerate() {
        for v in b.vertices.iter() {
            block_of[v] = k;
        }
    }
    let mut bonus = vec![0i64; g.n()];
    let mut internal: Vec<Vec<(usize, usize)>> = vec![Vec::new(); profile.blocks.len()];
    for &(x, y) in g.edges() {
        let (bx, by) = (block_of[x], block_of[y]);
        if bx == by {
            internal[bx].push((x, y));
        } else if bx < by {
            // x is in the denser block
            alloc.set(x, y, Rational::one());
            bonus[y] += 1;
        } else {
            alloc.set(y, x, Rational::one());
            bonus[x] += 1;
        }
    }
    for (k, b) in profile.blocks.iter().enumerate() {
        if internal[k].is_empty() {
            continue;
        }
        let (p, q) = (*b.density.numer(), *b.density.denom());
        let verts: Vec<usize> = b.vertices.iter().collect();
        let local: BTreeMap<usize, usize> =
            verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let s = verts.len();
        let mut net = FlowNetwork::new(2 + s + internal[k].len(), 0, 1)?;
        for (i, &v) in verts.iter().enumerate() {
            let demand = p - q * bonus[v];
            net.add_arc(2 + i, 1, demand.max(0) as u64)?;
        }
        let mut arc_ids = Vec::with_capacity(internal[k].len());
        for (j, &(x, y)) in internal[k].iter().enumerate() {
            let e = 2 + s + j;
            net.add_arc(0, e, q as u64)?;
            let ax = net.add_arc(e, 2 + local[&x], q as u64)?;
            let ay = net.add_arc(e, 2 + local[&y], q as u64)?;
            arc_ids.push((ax, ay));
        }
        let cut = net.solve()?;
        for (&(x, y), &(_, ay)) in internal[k].iter().zip(&arc_ids) {
            alloc.set(x, y, Rational::new(cut.arc_flows[ay] as i64, q));
        }
    }
    Ok(alloc)
}

/// `(t - r) eps / (2 r)`: the slack below which a near-maximizer of `f_t`
/// must cover all but an `eps` fraction of the level set at `1/r`.
pub fn stability_delta(t: Rational, r: Rational, eps: Rational) -> Result<Rational, BalanceError> {
    if !r.is_positive() || r >= t {
        return Err(BalanceError::BadOrder { t, r });
    }
    if !eps.is_positive() {
        return Err(BalanceError::NonPositive);
    }
    Ok((t - r) * eps / (Rational::from_integer(2) * r))
}
