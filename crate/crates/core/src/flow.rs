//! Exact integer max-flow / min-cut (Dinic) with extremal cut extraction.
//!
//! Both canonical minimum cuts are returned: the smallest source side (nodes
//! reachable from the source in the final residual network) and the largest
//! one (complement of the nodes that can still reach the sink).

use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("source and sink coincide")]
    SameTerminals,
    #[error("node {node} out of range ({nodes} nodes)")]
    NodeOutOfRange { node: usize, nodes: usize },
    #[error("total finite capacity overflows 64-bit arithmetic")]
    Overflow,
    #[error("an unbounded-capacity path joins source and sink")]
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Capacity {
    Finite(u64),
    Unbounded,
}

impl From<u64> for Capacity {
    fn from(c: u64) -> Self {
        Capacity::Finite(c)
    }
}

#[derive(Clone, Debug)]
pub struct FlowNetwork {
    nodes: usize,
    source: usize,
    sink: usize,
    arcs: Vec<(usize, usize, Capacity)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutResult {
    pub flow_value: u64,
    pub source_side_min: Vec<bool>,
    pub source_side_max: Vec<bool>,
    /// Flow on each arc, in insertion order.
    pub arc_flows: Vec<u64>,
}

impl CutResult {
    /// Capacity of the cut with the given source side; unbounded arcs count
    /// as `u64::MAX` (saturating).
    pub fn cut_capacity(net: &FlowNetwork, side: &[bool]) -> u64 {
        net.arcs
            .iter()
            .filter(|&&(u, v, _)| side[u] && !side[v])
            .fold(0u64, |acc, &(_, _, c)| match c {
                Capacity::Finite(c) => acc.saturating_add(c),
                Capacity::Unbounded => u64::MAX,
            })
    }
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Result<Self, FlowError> {
        for node in [source, sink] {
            if node >= nodes {
                return Err(FlowError::NodeOutOfRange { node, nodes });
            }
        }
        if source == sink {
            return Err(FlowError::SameTerminals);
        }
        Ok(FlowNetwork {
            nodes,
            source,
            sink,
            arcs: Vec::new(),
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn arcs(&self) -> &[(usize, usize, Capacity)] {
        &self.arcs
    }

    /// Adds an arc and returns its index. Zero-capacity arcs are kept so
    /// that indices stay aligned with the caller's bookkeeping.
    pub fn add_arc(
        &mut self,
        from: usize,
        to: usize,
        cap: impl Into<Capacity>,
    ) -> Result<usize, FlowError> {
        for node in [from, to] {
            if node >= self.nodes {
                return Err(FlowError::NodeOutOfRange {
                    node,
                    nodes: self.nodes,
                });
            }
        }
        self.arcs.push((from, to, cap.into()));
        Ok(self.arcs.len() - 1)
    }

    pub fn solve(&self) -> Result<CutResult, FlowError> {
        let mut total: u64 = 0;
        for &(_, _, c) in &self.arcs {
            if let Capacity::Finite(c) = c {
                total = total.checked_add(c).ok_or(FlowError::Overflow)?;
            }
        }
        // Sentinel strictly above any finite cut, and still summable.
        let sentinel = total.checked_add(1).ok_or(FlowError::Overflow)?;
        if sentinel > u64::MAX / 4 {
            return Err(FlowError::Overflow);
        }
        let mut dinic = Dinic::new(self.nodes);
        for &(u, v, c) in &self.arcs {
            let cap = match c {
                Capacity::Finite(c) => c,
                Capacity::Unbounded => sentinel,
            };
            dinic.add(u, v, cap);
        }
        let value = dinic.max_flow(self.source, self.sink);
        if value >= sentinel {
            return Err(FlowError::Unbounded);
        }
        let source_side_min = dinic.reachable_from(self.source);
        let reaches_sink = dinic.reaching(self.sink);
        let source_side_max = reaches_sink.iter().map(|&r| !r).collect();
        let arc_flows = (0..self.arcs.len())
            .map(|k| dinic.cap[2 * k + 1])
            .collect();
        Ok(CutResult {
            flow_value: value,
            source_side_min,
            source_side_max,
            arc_flows,
        })
    }
}

/// Residual graph in struct-of-arrays form; arc `2k` is forward, `2k + 1`
/// its reverse.
struct Dinic {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u64>,
    level: Vec<i32>,
    it: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
            level: vec![-1; n],
            it: vec![0; n],
        }
    }

    fn add(&mut self, u: usize, v: usize, c: u64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut q = VecDeque::new();
        self.level[s] = 0;
        q.push_back(s);
        while let Some(u) = q.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    q.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    /// Blocking flow on the current level graph, iterative DFS.
    fn blocking_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0;
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let bottleneck = path.iter().map(|&e| self.cap[e]).min().unwrap_or(0);
                let mut cut_at = path.len();
                for (k, &e) in path.iter().enumerate() {
                    self.cap[e] -= bottleneck;
                    self.cap[e ^ 1] += bottleneck;
                    if self.cap[e] == 0 && cut_at == path.len() {
                        cut_at = k;
                    }
                }
                total += bottleneck;
                path.truncate(cut_at);
                u = match path.last() {
                    Some(&e) => self.to[e],
                    None => s,
                };
                continue;
            }
            let mut advanced = false;
            while self.it[u] < self.head[u].len() {
                let e = self.head[u][self.it[u]];
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] == self.level[u] + 1 {
                    path.push(e);
                    u = v;
                    advanced = true;
                    break;
                }
                self.it[u] += 1;
            }
            if advanced {
                continue;
            }
            // dead end: retreat
            self.level[u] = -1;
            match path.pop() {
                Some(e) => {
                    u = self.to[e ^ 1];
                    self.it[u] += 1;
                }
                None => return total,
            }
        }
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut flow = 0u64;
        while self.bfs(s, t) {
            self.it.iter_mut().for_each(|i| *i = 0);
            flow = flow.saturating_add(self.blocking_flow(s, t));
        }
        flow
    }

    fn reachable_from(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Nodes with a residual path to `t`.
    fn reaching(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        let mut stack = vec![t];
        seen[t] = true;
        while let Some(v) = stack.pop() {
            for &e in &self.head[v] {
                // e goes v -> u; the residual arc u -> v is e ^ 1
                let u = self.to[e];
                if self.cap[e ^ 1] > 0 && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }
}
