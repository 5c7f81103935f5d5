//! Matchings and π-intersection graphs.
//!
//! Convention: `(i, j)` is an edge of `H_π` iff `(i, j)` is an edge of `G1`
//! and `(π(i), π(j))` is an edge of `G2`, where `π` maps `G1` labels to `G2`
//! labels. Under this convention the intersection graph through the hidden
//! matching consists of exactly the parent edges kept in both graphs.
//! [`Direction::Inverse`] reads a supplied permutation as `π⁻¹` instead.

use std::fmt;

use thiserror::Error;

use crate::balance::{ft_value, BalanceError};
use crate::graph::{Graph, VertexSet};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("partial matching is not injective: image {0} used twice")]
    NotInjective(usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    OutOfRange { vertex: usize, n: usize },
    #[error("vertex {0} is outside the matching's domain")]
    DomainMismatch(usize),
    #[error(transparent)]
    Balance(#[from] BalanceError),
}

/// A permutation of `0..n`; `image[i]` is the partner of `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matching {
    image: Vec<usize>,
}

impl Matching {
    pub fn new(image: Vec<usize>) -> Result<Self, MatchingError> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &j in &image {
            if j >= n || seen[j] {
                return Err(MatchingError::NotPermutation(n));
            }
            seen[j] = true;
        }
        Ok(Matching { image })
    }

    pub fn identity(n: usize) -> Self {
        Matching {
            image: (0..n).collect(),
        }
    }

    /// Builds a permutation from disjoint cycles, e.g. `[[0, 1, 2]]` maps
    /// 0 to 1, 1 to 2 and 2 to 0.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, MatchingError> {
        let mut image: Vec<usize> = (0..n).collect();
        for c in cycles {
            for (k, &x) in c.iter().enumerate() {
                if x >= n {
                    return Err(MatchingError::OutOfRange { vertex: x, n });
                }
                image[x] = c[(k + 1) % c.len()];
            }
        }
        Matching::new(image)
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Matching {
        let mut inv = vec![0; self.n()];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j] = i;
        }
        Matching { image: inv }
    }

    /// `self ∘ other`: `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Matching) -> Result<Matching, MatchingError> {
        if self.n() != other.n() {
            return Err(MatchingError::SizeMismatch(self.n(), other.n()));
        }
        Ok(Matching {
            image: other.image.iter().map(|&x| self.image[x]).collect(),
        })
    }

    /// Cycle decomposition, each cycle starting at its smallest element,
    /// cycles ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut x = self.image[s];
            while x != s {
                seen[x] = true;
                c.push(x);
                x = self.image[x];
            }
            out.push(c);
        }
        out
    }

    /// Next permutation in lexicographic order of the image array.
    pub fn next_lex(&self) -> Option<Matching> {
        let mut a = self.image.clone();
        let n = a.len();
        if n < 2 {
            return None;
        }
        let mut i = n - 1;
        while i > 0 && a[i - 1] >= a[i] {
            i -= 1;
        }
        if i == 0 {
            return None;
        }
        let mut j = n - 1;
        while a[j] <= a[i - 1] {
            j -= 1;
        }
        a.swap(i - 1, j);
        a[i..].reverse();
        Some(Matching { image: a })
    }

    /// Parses whitespace-separated images.
    pub fn parse(s: &str) -> Result<Matching, MatchingError> {
        let image = s
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| MatchingError::NotPermutation(0)))
            .collect::<Result<Vec<_>, _>>()?;
        Matching::new(image)
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, x) in self.image.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// `#{i : π1(i) = π2(i)}`.
pub fn overlap(pi1: &Matching, pi2: &Matching) -> Result<usize, MatchingError> {
    if pi1.n() != pi2.n() {
        return Err(MatchingError::SizeMismatch(pi1.n(), pi2.n()));
    }
    Ok(pi1
        .image
        .iter()
        .zip(&pi2.image)
        .filter(|(a, b)| a == b)
        .count())
}

/// An injection from a subset of `0..n` into `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialMatching {
    image: Vec<Option<usize>>,
    used: Vec<bool>,
}

impl PartialMatching {
    pub fn empty(n: usize) -> Self {
        PartialMatching {
            image: vec![None; n],
            used: vec![false; n],
        }
    }

    pub fn restrict(pi: &Matching, domain: &VertexSet) -> Result<Self, MatchingError> {
        let mut pm = PartialMatching::empty(pi.n());
        for i in domain.iter() {
            if i >= pi.n() {
                return Err(MatchingError::OutOfRange { vertex: i, n: pi.n() });
            }
            pm.insert(i, pi.apply(i))?;
        }
        Ok(pm)
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn insert(&mut self, i: usize, j: usize) -> Result<(), MatchingError> {
        let n = self.n();
        for v in [i, j] {
            if v >= n {
                return Err(MatchingError::OutOfRange { vertex: v, n });
            }
        }
        if let Some(old) = self.image[i] {
            if old == j {
                return Ok(());
            }
            self.used[old] = false;
        }
        if self.used[j] {
            if let Some(old) = self.image[i] {
                self.used[old] = true;
            }
            return Err(MatchingError::NotInjective(j));
        }
        self.image[i] = Some(j);
        self.used[j] = true;
        Ok(())
    }

    pub fn get(&self, i: usize) -> Option<usize> {
        self.image.get(i).copied().flatten()
    }

    pub fn domain(&self) -> VertexSet {
        (0..self.n()).filter(|&i| self.image[i].is_some()).collect()
    }

    pub fn len(&self) -> usize {
        self.image.iter().filter(|x| x.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(i, π(i))` for `i` in the domain, ascending in `i`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.image
            .iter()
            .enumerate()
            .filter_map(|(i, j)| j.map(|j| (i, j)))
            .collect()
    }

    pub fn is_extended_by(&self, pi: &Matching) -> bool {
        pi.n() == self.n() && self.pairs().iter().all(|&(i, j)| pi.apply(i) == j)
    }

    /// The lexicographically smallest full matching extending `self`.
    pub fn first_extension(&self) -> Matching {
        let mut free = (0..self.n()).filter(|&j| !self.used[j]);
        Matching {
            image: self
                .image
                .iter()
                .map(|x| x.unwrap_or_else(|| free.next().expect("counts agree")))
                .collect(),
        }
    }

    /// Every full matching extending `self`, in lexicographic order of the
    /// image array.
    pub fn extensions(&self) -> Extensions {
        let free_slots: Vec<usize> = (0..self.n()).filter(|&i| self.image[i].is_none()).collect();
        let free_values: Vec<usize> = (0..self.n()).filter(|&j| !self.used[j]).collect();
        Extensions {
            base: self.first_extension().image,
            free_slots,
            values: Some(free_values),
        }
    }
}

/// Iterator over completions of a partial matching.
pub struct Extensions {
    base: Vec<usize>,
    free_slots: Vec<usize>,
    values: Option<Vec<usize>>,
}

impl Iterator for Extensions {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        let vals = self.values.as_mut()?;
        for (&slot, &v) in self.free_slots.iter().zip(vals.iter()) {
            self.base[slot] = v;
        }
        let out = Matching {
            image: self.base.clone(),
        };
        // free slots ascend, so permuting the values lexicographically
        // permutes the image array lexicographically
        let n = vals.len();
        let mut i = n;
        while i > 1 && vals[i - 2] >= vals[i - 1] {
            i -= 1;
        }
        if i <= 1 {
            self.values = None;
        } else {
            let mut j = n - 1;
            while vals[j] <= vals[i - 2] {
                j -= 1;
            }
            vals.swap(i - 2, j);
            vals[i - 1..].reverse();
        }
        Some(out)
    }
}

/// How a supplied permutation is read when building `H_π`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Direction {
    /// The permutation is `π`.
    #[default]
    Forward,
    /// The permutation is `π⁻¹`.
    Inverse,
}

fn check_sizes(g1: &Graph, g2: &Graph, n: usize) -> Result<(), MatchingError> {
    if g1.n() != g2.n() {
        return Err(MatchingError::SizeMismatch(g1.n(), g2.n()));
    }
    if g1.n() != n {
        return Err(MatchingError::SizeMismatch(g1.n(), n));
    }
    Ok(())
}

/// `H_π` restricted to pairs inside `domain`, as a graph on all `n`
/// vertices.
pub fn intersection_graph(
    g1: &Graph,
    g2: &Graph,
    pi: &Matching,
    domain: &VertexSet,
) -> Result<Graph, MatchingError> {
    check_sizes(g1, g2, pi.n())?;
    if let Some(v) = domain.max().filter(|&v| v >= pi.n()) {
        return Err(MatchingError::OutOfRange { vertex: v, n: pi.n() });
    }
    let mask = domain.to_mask(g1.n());
    let edges = g1
        .edges()
        .iter()
        .copied()
        .filter(|&(i, j)| mask[i] && mask[j] && g2.has_edge(pi.apply(i), pi.apply(j)));
    Ok(Graph::from_edges(g1.n(), edges).expect("subset of a valid edge set"))
}

pub fn intersection_graph_dir(
    g1: &Graph,
    g2: &Graph,
    perm: &Matching,
    domain: &VertexSet,
    dir: Direction,
) -> Result<Graph, MatchingError> {
    match dir {
        Direction::Forward => intersection_graph(g1, g2, perm, domain),
        Direction::Inverse => intersection_graph(g1, g2, &perm.inverse(), domain),
    }
}

/// `H_π` on pairs inside `domain` for a partial matching; only values on
/// `domain` are consulted, so every completion gives the same graph.
pub fn intersection_graph_partial(
    g1: &Graph,
    g2: &Graph,
    pi: &PartialMatching,
    domain: &VertexSet,
) -> Result<Graph, MatchingError> {
    check_sizes(g1, g2, pi.n())?;
    for v in domain.iter() {
        if pi.get(v).is_none() {
            return Err(MatchingError::DomainMismatch(v));
        }
    }
    let mask = domain.to_mask(g1.n());
    let edges = g1.edges().iter().copied().filter(|&(i, j)| {
        mask[i] && mask[j] && g2.has_edge(pi.get(i).unwrap(), pi.get(j).unwrap())
    });
    Ok(Graph::from_edges(g1.n(), edges).expect("subset of a valid edge set"))
}

/// `f_t` evaluated on `H_π`: `t|E_π(U)| - |U|`.
pub fn ft_pi(
    g1: &Graph,
    g2: &Graph,
    pi: &Matching,
    t: Rational,
    u: &VertexSet,
) -> Result<Rational, MatchingError> {
    let h = intersection_graph(g1, g2, pi, u)?;
    Ok(ft_value(&h, t, u)?)
}
