//! Simple undirected graphs on `0..n`, vertex sets, and the structural
//! classifications (tree components, 2-cores of non-simple components) that
//! pin down which vertices carry load below or above one.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("edge list parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Ordered set of vertex ids. Iteration is always ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    /// All of `0..n`.
    pub fn full(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        VertexSet(
            mask.iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect(),
        )
    }

    pub fn from_bits(bits: u64, n: usize) -> Self {
        VertexSet((0..n).filter(|&i| bits >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn to_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for v in self.iter() {
            mask[v] = true;
        }
        mask
    }

    pub fn to_bits(&self) -> u64 {
        self.iter().fold(0u64, |acc, v| acc | 1 << v)
    }

    pub fn insert(&mut self, v: usize) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, v);
                true
            }
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        self.iter().filter(|&v| other.contains(v)).collect()
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        self.iter().filter(|&v| !other.contains(v)).collect()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| !other.contains(v))
    }

    /// The tie order on vertex sets: cardinality first, then the ascending
    /// member lists lexicographically.
    pub fn cmp_size_lex(&self, other: &VertexSet) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }
}

impl From<Vec<usize>> for VertexSet {
    fn from(v: Vec<usize>) -> Self {
        v.into_iter().collect()
    }
}

impl<const N: usize> From<[usize; N]> for VertexSet {
    fn from(v: [usize; N]) -> Self {
        v.into_iter().collect()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Index of the unordered pair `(i, j)`, `i != j`, in the colex enumeration
/// of all pairs of `0..n`. Used for bitmask encodings of small graphs.
pub fn pair_index(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    b * (b - 1) / 2 + a
}

/// Inverse of [`pair_index`].
pub fn pair_from_index(idx: usize) -> (usize, usize) {
    let mut b = ((((8 * idx + 1) as f64).sqrt() + 1.0) / 2.0) as usize;
    while b * (b - 1) / 2 > idx {
        b -= 1;
    }
    while (b + 1) * b / 2 <= idx {
        b += 1;
    }
    (idx - b * (b - 1) / 2, b)
}

/// Simple undirected graph on vertices `0..n`.
///
/// Edges are stored once as `(min, max)` in ascending order; adjacency lists
/// are sorted. Graphs are immutable once built.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph, silently merging duplicate pairs.
    pub fn from_edges<I>(n: usize, pairs: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges_counted(n, pairs).map(|(g, _)| g)
    }

    /// Like [`Graph::from_edges`], also returning how many input pairs were
    /// duplicates of an earlier pair (in either orientation).
    pub fn from_edges_counted<I>(n: usize, pairs: I) -> Result<(Graph, usize), GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut edges = Vec::new();
        for (i, j) in pairs {
            if i >= n {
                return Err(GraphError::OutOfRange { vertex: i, n });
            }
            if j >= n {
                return Err(GraphError::OutOfRange { vertex: j, n });
            }
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            edges.push((i.min(j), i.max(j)));
        }
        let raw = edges.len();
        edges.sort_unstable();
        edges.dedup();
        let dups = raw - edges.len();
        Ok((Self::from_canonical(n, edges), dups))
    }

    /// `edges` must be sorted, deduplicated, canonical and in range.
    pub(crate) fn from_canonical(n: usize, edges: Vec<(usize, usize)>) -> Graph {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    /// Graph on `n <= 11` vertices from a bitmask over [`pair_index`].
    pub fn from_pair_mask(n: usize, mask: u64) -> Graph {
        let mut edges: Vec<(usize, usize)> = (0..64)
            .filter(|b| mask >> b & 1 == 1)
            .map(pair_from_index)
            .collect();
        edges.sort_unstable();
        Self::from_canonical(n, edges)
    }

    pub fn pair_mask(&self) -> u64 {
        self.edges
            .iter()
            .fold(0u64, |m, &(a, b)| m | 1 << pair_index(a, b))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.adj[i].binary_search(&j).is_ok()
    }

    /// Copy of the graph with one more edge (no-op if already present).
    pub fn with_edge(&self, i: usize, j: usize) -> Result<Graph, GraphError> {
        Graph::from_edges(self.n, self.edges.iter().copied().chain([(i, j)]))
    }

    /// Number of edges with both endpoints in `u`.
    pub fn edges_within(&self, u: &VertexSet) -> usize {
        let mask = u.to_mask(self.n);
        self.edges
            .iter()
            .filter(|&&(a, b)| mask[a] && mask[b])
            .count()
    }

    /// Induced subgraph on `u`, relabelled `0..|u|` in ascending order of `u`.
    /// The returned vector maps new labels back to the original ones.
    pub fn induced_subgraph(&self, u: &VertexSet) -> Result<(Graph, Vec<usize>), GraphError> {
        if let Some(v) = u.max() {
            if v >= self.n {
                return Err(GraphError::OutOfRange { vertex: v, n: self.n });
            }
        }
        let mut relabel = vec![usize::MAX; self.n];
        for (k, v) in u.iter().enumerate() {
            relabel[v] = k;
        }
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(a, b)| relabel[a] != usize::MAX && relabel[b] != usize::MAX)
            .map(|&(a, b)| (relabel[a], relabel[b]))
            .collect();
        // Relabelling is monotone, so the edge list stays sorted.
        Ok((Self::from_canonical(u.len(), edges), u.as_slice().to_vec()))
    }

    /// Same vertex set, keeping only the edges inside `u`.
    pub fn restrict_edges(&self, u: &VertexSet) -> Graph {
        let mask = u.to_mask(self.n);
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(a, b)| mask[a] && mask[b])
            .collect();
        Self::from_canonical(self.n, edges)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    fn component_edge_count(&self, comp: &[usize]) -> usize {
        comp.iter().map(|&v| self.degree(v)).sum::<usize>() / 2
    }

    /// Union of the components with `|E(C)| = |C| - 1`; isolated vertices count.
    pub fn tree_components(&self) -> VertexSet {
        self.components()
            .into_iter()
            .filter(|c| self.component_edge_count(c) + 1 == c.len())
            .flatten()
            .collect()
    }

    /// Union, over components with `|E(C)| > |C|`, of the maximal subgraph of
    /// minimum degree two, found by peeling degree-one vertices.
    pub fn two_cores_of_nonsimple_components(&self) -> VertexSet {
        let mut out = Vec::new();
        let mut deg = vec![0usize; self.n];
        let mut alive = vec![false; self.n];
        for comp in self.components() {
            if self.component_edge_count(&comp) <= comp.len() {
                continue;
            }
            let mut stack = Vec::new();
            for &v in &comp {
                deg[v] = self.degree(v);
                alive[v] = true;
                if deg[v] < 2 {
                    stack.push(v);
                }
            }
            while let Some(v) = stack.pop() {
                if !alive[v] {
                    continue;
                }
                alive[v] = false;
                for &w in &self.adj[v] {
                    if alive[w] {
                        deg[w] -= 1;
                        if deg[w] == 1 {
                            stack.push(w);
                        }
                    }
                }
            }
            out.extend(comp.iter().copied().filter(|&v| alive[v]));
        }
        out.into_iter().collect()
    }

    /// Applies a vertex relabelling `v -> perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        Self::from_canonical(self.n, edges)
    }

    /// Text form: a header line `n m`, then one `i j` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for &(a, b) in &self.edges {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }

    /// Parses the format written by [`Graph::to_edge_list`]. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(GraphError::Parse {
            line: 0,
            message: "missing header".into(),
        })?;
        let (n, m) = parse_two(hline, header)?;
        let mut pairs = Vec::with_capacity(m);
        for (line, l) in lines.by_ref().take(m) {
            pairs.push(parse_two(line, l)?);
        }
        if pairs.len() != m {
            return Err(GraphError::Parse {
                line: 0,
                message: format!("expected {m} edges, found {}", pairs.len()),
            });
        }
        if let Some((line, _)) = lines.next() {
            return Err(GraphError::Parse {
                line,
                message: "trailing content after edge list".into(),
            });
        }
        Graph::from_edges(n, pairs)
    }
}

fn parse_two(line: usize, text: &str) -> Result<(usize, usize), GraphError> {
    let err = |message: String| GraphError::Parse { line, message };
    let mut it = text.split_whitespace();
    let mut next = || -> Result<usize, GraphError> {
        let tok = it.next().ok_or_else(|| err("expected two integers".into()))?;
        tok.parse().map_err(|e| err(format!("{tok:?}: {e}")))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(err("expected exactly two integers".into()));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    pub(crate) fn bowtie() -> Graph {
        Graph::from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap()
    }

    #[test]
    fn construction_and_errors() {
        assert_eq!(triangle().edge_count(), 3);
        assert_eq!(
            Graph::from_edges(2, [(0, 0)]).unwrap_err(),
            GraphError::SelfLoop(0)
        );
        assert_eq!(
            Graph::from_edges(2, [(0, 2)]).unwrap_err(),
            GraphError::OutOfRange { vertex: 2, n: 2 }
        );
        let (g, dups) = Graph::from_edges_counted(2, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(dups, 1);
    }

    #[test]
    fn induced_subgraphs() {
        let (h, map) = triangle().induced_subgraph(&[0, 1].into()).unwrap();
        assert_eq!(h.edges(), &[(0, 1)]);
        assert_eq!(map, vec![0, 1]);

        let (h, _) = bowtie().induced_subgraph(&VertexSet::new()).unwrap();
        assert_eq!((h.n(), h.edge_count()), (0, 0));

        let (h, _) = bowtie().induced_subgraph(&[0, 1, 2].into()).unwrap();
        assert_eq!(h, triangle());

        let (h, map) = bowtie().induced_subgraph(&[2, 3, 4].into()).unwrap();
        assert_eq!(h, triangle());
        assert_eq!(map, vec![2, 3, 4]);

        assert!(triangle().induced_subgraph(&[0, 5].into()).is_err());
    }

    #[test]
    fn tree_component_census() {
        let forest = Graph::from_edges(6, [(0, 1), (1, 2), (3, 4)]).unwrap();
        assert_eq!(forest.tree_components(), VertexSet::full(6));
        assert!(triangle().tree_components().is_empty());
        // triangle {0,1,2}, edge {3,4}, isolated 5
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        assert_eq!(g.tree_components(), VertexSet::from([3, 4, 5]));
    }

    #[test]
    fn two_cores() {
        assert!(triangle().two_cores_of_nonsimple_components().is_empty());
        assert_eq!(
            bowtie().two_cores_of_nonsimple_components(),
            VertexSet::full(5)
        );
        // K4 on 0..4 with pendant path 3-4-5
        let mut pairs = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        pairs.extend([(3, 4), (4, 5)]);
        let g = Graph::from_edges(6, pairs).unwrap();
        assert_eq!(
            g.two_cores_of_nonsimple_components(),
            VertexSet::from([0, 1, 2, 3])
        );
    }

    #[test]
    fn edge_list_round_trip_and_rejects_loops() {
        let g = bowtie();
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
        assert!(matches!(
            Graph::parse_edge_list("3 1\n1 1\n"),
            Err(GraphError::SelfLoop(1))
        ));
        assert!(Graph::parse_edge_list("3 2\n0 1\n").is_err());
        assert!(Graph::parse_edge_list("3 1\n0 x\n").is_err());
    }

    #[test]
    fn pair_index_round_trip() {
        for b in 1..12 {
            for a in 0..b {
                assert_eq!(pair_from_index(pair_index(a, b)), (a, b));
            }
        }
        let g = bowtie();
        assert_eq!(Graph::from_pair_mask(5, g.pair_mask()), g);
    }

    #[test]
    fn vertex_set_order() {
        use std::cmp::Ordering::*;
        let a = VertexSet::from([0, 5]);
        let b = VertexSet::from([1, 2, 3]);
        let c = VertexSet::from([1, 4]);
        assert_eq!(a.cmp_size_lex(&b), Less);
        assert_eq!(a.cmp_size_lex(&c), Less);
        assert_eq!(c.cmp_size_lex(&a), Greater);
    }
}
