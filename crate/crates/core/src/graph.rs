//! Undirected graphs with mandatory self-loops.
//!
//! Every vertex carries a self-loop, so `N_i` always contains `i` and the
//! degree `d_i = |N_i|` is at least one. Vertices are `0..n` internally; the
//! JSON exchange format in [`crate::io`] is 1-based.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::sampling::CounterRng;

/// Largest vertex count accepted by the exhaustive conductance search.
pub const CONDUCTANCE_MAX_N: usize = 24;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("edge ({0}, {1}) is out of range for n = {2}")]
    OutOfRange(usize, usize, usize),
    #[error("edge ({0}, {1}) is listed more than once")]
    DuplicateEdge(usize, usize),
    #[error("self-loop ({0}, {0}) must not be listed; loops are implied")]
    ExplicitSelfLoop(usize),
    #[error("vertex set must be nonempty")]
    EmptySet,
    #[error("vertex {0} is out of range for n = {1}")]
    VertexOutOfRange(usize, usize),
    #[error("conductance enumeration is limited to n <= {max}, got n = {0}", max = CONDUCTANCE_MAX_N)]
    TooLarge(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("operation needs at least {needed} vertices, got {got}")]
    TooSmall { needed: usize, got: usize },
    #[error("invalid partite spec: {0}")]
    InvalidPartite(String),
    #[error("unknown graph constructor `{0}`")]
    UnknownConstructor(String),
}

/// An undirected graph on `n` vertices in which every vertex has a self-loop.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    /// Non-loop edges `(i, j)` with `i < j`, sorted ascending.
    edges: Vec<(usize, usize)>,
    /// Sorted closed neighbourhoods, each containing the vertex itself.
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from 0-based non-loop edges. Order within a pair is
    /// irrelevant; listing a pair twice (in either orientation) is an error.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::OutOfRange(a, b, n));
            }
            if a == b {
                return Err(GraphError::ExplicitSelfLoop(a));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted_edges(n, list))
    }

    pub(crate) fn from_sorted_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut neighbors: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for &(a, b) in &edges {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        Graph { n, edges, neighbors }
    }

    /// Edgeless graph: `n` isolated vertices with their loops.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Self::new(n, std::iter::empty())
    }

    pub fn path(n: usize) -> Result<Self, GraphError> {
        Self::new(n, (1..n).map(|i| (i - 1, i)))
    }

    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        if n < 3 {
            return Self::path(n);
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// Star with centre 0; `star(4)` is `K_{1,3}`.
    pub fn star(n: usize) -> Result<Self, GraphError> {
        Self::new(n, (1..n).map(|i| (0, i)))
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        Self::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    /// Two cliques on `⌊n/2⌋` vertices joined by one bridge edge. For odd `n`
    /// the extra vertex joins the first clique.
    pub fn dumbbell(n: usize) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::TooSmall { needed: 2, got: n });
        }
        let half = n / 2;
        let first = n - half;
        let mut edges = Vec::new();
        for i in 0..first {
            for j in i + 1..first {
                edges.push((i, j));
            }
        }
        for i in first..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        edges.push((first - 1, first));
        Self::new(n, edges)
    }

    pub fn complete_r_partite(spec: &PartiteSpec) -> Self {
        let n = spec.n();
        let part = spec.part_of_vertex();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if part[i] != part[j] {
                    edges.push((i, j));
                }
            }
        }
        Self::from_sorted_edges(n, edges)
    }

    /// Random connected graph: a uniform random recursive tree plus every other
    /// pair independently with probability `extra_p`.
    pub fn random_connected(n: usize, extra_p: f64, rng: &mut CounterRng) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut edges = Vec::new();
        for v in 1..n {
            let parent = rng.below(v as u64) as usize;
            edges.push((parent, v));
        }
        for i in 0..n {
            for j in i + 1..n {
                if edges.contains(&(i, j)) {
                    continue;
                }
                if rng.uniform() < extra_p {
                    edges.push((i, j));
                }
            }
        }
        Self::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Non-loop edges `(i, j)`, `i < j`, ascending.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Closed neighbourhood of `i` (contains `i`), ascending.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i == j || self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Number of ordered pairs `(i, j)` in the edge set, loops included.
    pub fn ordered_pair_count(&self) -> usize {
        self.n + 2 * self.edges.len()
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * (self.n - 1) / 2
    }

    pub fn degree_matrix(&self) -> DMatrix<usize> {
        DMatrix::from_fn(self.n, self.n, |i, j| if i == j { self.degree(i) } else { 0 })
    }

    /// Adjacency matrix including the unit diagonal from the self-loops.
    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::identity(self.n, self.n);
        for &(i, j) in &self.edges {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }

    /// Row-stochastic `D⁻¹ A_adj`.
    pub fn normalized_adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let w = 1.0 / self.degree(i) as f64;
            for &j in &self.neighbors[i] {
                a[(i, j)] = w;
            }
        }
        a
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let labels = self.component_labels();
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut comps = vec![Vec::new(); count];
        for (v, &c) in labels.iter().enumerate() {
            comps[c].push(v);
        }
        comps
    }

    /// Component index per vertex; components are numbered in order of their
    /// smallest vertex.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in &self.neighbors[u] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.component_labels().iter().all(|&c| c == 0)
    }

    fn bfs_eccentricity(&self, s: usize, dist: &mut [usize]) -> usize {
        dist.fill(usize::MAX);
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        let mut far = 0;
        while let Some(u) = queue.pop_front() {
            far = far.max(dist[u]);
            for &w in &self.neighbors[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        far
    }

    /// Largest diameter over the connected components (self-loops ignored).
    pub fn effective_diameter(&self) -> usize {
        let mut dist = vec![0; self.n];
        (0..self.n).map(|s| self.bfs_eccentricity(s, &mut dist)).max().unwrap_or(0)
    }

    /// Diameter of a connected graph.
    pub fn diameter(&self) -> Result<usize, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(self.effective_diameter())
    }

    /// Subgraph induced on `vs`. Returns the graph and the map from new to old
    /// vertex indices (ascending).
    pub fn induced_subgraph(&self, vs: &[usize]) -> Result<(Graph, Vec<usize>), GraphError> {
        if vs.is_empty() {
            return Err(GraphError::EmptySet);
        }
        let mut map: Vec<usize> = vs.to_vec();
        map.sort_unstable();
        map.dedup();
        if let Some(&v) = map.iter().find(|&&v| v >= self.n) {
            return Err(GraphError::VertexOutOfRange(v, self.n));
        }
        let mut local = vec![usize::MAX; self.n];
        for (new, &old) in map.iter().enumerate() {
            local[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| local[a] != usize::MAX && local[b] != usize::MAX)
            .map(|&(a, b)| (local[a], local[b]))
            .collect::<Vec<_>>();
        let mut edges = edges;
        edges.sort_unstable();
        Ok((Graph::from_sorted_edges(map.len(), edges), map))
    }

    /// Conductance by exhaustive enumeration of all nonempty proper vertex
    /// subsets.
    pub fn conductance(&self) -> Result<Conductance, GraphError> {
        conductance(self)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges=[", self.n)?;
        for (k, (a, b)) in self.edges.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {})", a + 1, b + 1)?;
        }
        write!(f, "])")
    }
}

/// Part sizes `n_1..n_r` of a complete r-partite graph. Part `i` occupies the
/// consecutive vertices `N_{i-1}..N_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartiteSpec {
    part_sizes: Vec<usize>,
}

impl PartiteSpec {
    pub fn new(part_sizes: Vec<usize>) -> Result<Self, GraphError> {
        if part_sizes.is_empty() {
            return Err(GraphError::InvalidPartite("need at least one part".into()));
        }
        if part_sizes.contains(&0) {
            return Err(GraphError::InvalidPartite("part sizes must be positive".into()));
        }
        Ok(PartiteSpec { part_sizes })
    }

    pub fn part_sizes(&self) -> &[usize] {
        &self.part_sizes
    }

    pub fn r(&self) -> usize {
        self.part_sizes.len()
    }

    pub fn n(&self) -> usize {
        self.part_sizes.iter().sum()
    }

    /// First vertex of each part.
    pub fn offsets(&self) -> Vec<usize> {
        self.part_sizes
            .iter()
            .scan(0, |acc, &s| {
                let start = *acc;
                *acc += s;
                Some(start)
            })
            .collect()
    }

    pub fn part_of_vertex(&self) -> Vec<usize> {
        self.part_sizes
            .iter()
            .enumerate()
            .flat_map(|(p, &s)| std::iter::repeat_n(p, s))
            .collect()
    }

    /// All ordered part-size lists summing to `n` (compositions of `n`).
    pub fn compositions(n: usize) -> Vec<PartiteSpec> {
        fn rec(rest: usize, cur: &mut Vec<usize>, out: &mut Vec<PartiteSpec>) {
            if rest == 0 {
                out.push(PartiteSpec { part_sizes: cur.clone() });
                return;
            }
            for first in 1..=rest {
                cur.push(first);
                rec(rest - first, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(n, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl FromStr for PartiteSpec {
    type Err = GraphError;

    /// Parses `"1,2,3"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let sizes = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| GraphError::InvalidPartite(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        PartiteSpec::new(sizes)
    }
}

/// Named constructors accepted on the command line and in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardGraph {
    Path,
    Star,
    Cycle,
    Complete,
    Dumbbell,
    Empty,
}

impl StandardGraph {
    pub fn build(self, n: usize) -> Result<Graph, GraphError> {
        match self {
            StandardGraph::Path => Graph::path(n),
            StandardGraph::Star => Graph::star(n),
            StandardGraph::Cycle => Graph::cycle(n),
            StandardGraph::Complete => Graph::complete(n),
            StandardGraph::Dumbbell => Graph::dumbbell(n),
            StandardGraph::Empty => Graph::empty(n),
        }
    }
}

impl FromStr for StandardGraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "path" => StandardGraph::Path,
            "star" => StandardGraph::Star,
            "cycle" => StandardGraph::Cycle,
            "complete" => StandardGraph::Complete,
            "dumbbell" => StandardGraph::Dumbbell,
            "empty" => StandardGraph::Empty,
            other => return Err(GraphError::UnknownConstructor(other.to_string())),
        })
    }
}

/// `standard_graphs(name, n)`.
pub fn standard_graph(name: &str, n: usize) -> Result<Graph, GraphError> {
    name.parse::<StandardGraph>()?.build(n)
}

/// Minimum cut ratio together with a minimizing subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conductance {
    pub value: f64,
    /// `|∂(S)|` of the witness.
    pub boundary: usize,
    /// `min(d(S), d(S̄))` of the witness.
    pub volume: usize,
    /// Witness subset `S`, 0-based, ascending. Among all minimizers this is the
    /// one with the smallest bitmask.
    pub cut: Vec<usize>,
}

fn conductance(g: &Graph) -> Result<Conductance, GraphError> {
    let n = g.n();
    if n < 2 {
        return Err(GraphError::TooSmall { needed: 2, got: n });
    }
    if n > CONDUCTANCE_MAX_N {
        return Err(GraphError::TooLarge(n));
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let deg = g.degrees();
    let total: usize = deg.iter().sum();
    // Gray-code walk: each step flips one vertex and updates |∂S| and d(S)
    // incrementally.
    let mut in_set = vec![false; n];
    let mut mask: u32 = 0;
    let mut boundary: i64 = 0;
    let mut vol: usize = 0;
    let mut best: Option<(usize, usize, u32)> = None;
    for step in 1u64..(1u64 << n) {
        let v = step.trailing_zeros() as usize;
        let crossing_change: i64 = g
            .neighbors(v)
            .iter()
            .filter(|&&w| w != v)
            .map(|&w| if in_set[w] { -1 } else { 1 })
            .sum();
        if in_set[v] {
            boundary -= crossing_change;
            vol -= deg[v];
        } else {
            boundary += crossing_change;
            vol += deg[v];
        }
        in_set[v] = !in_set[v];
        mask ^= 1 << v;
        if vol == total {
            continue;
        }
        let b = boundary as usize;
        let denom = vol.min(total - vol);
        let better = match best {
            None => true,
            Some((bb, bd, bm)) => {
                let lhs = b * bd;
                let rhs = bb * denom;
                lhs < rhs || (lhs == rhs && mask < bm)
            }
        };
        if better {
            best = Some((b, denom, mask));
        }
    }
    let (b, d, m) = best.expect("n >= 2 has a proper subset");
    Ok(Conductance {
        value: b as f64 / d as f64,
        boundary: b,
        volume: d,
        cut: (0..n).filter(|&v| m & (1 << v) != 0).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bf_conductance_ordered_pairs(g: &Graph) -> f64 {
        // Independent route: count ordered crossing pairs over both directions
        // and halve.
        let n = g.n();
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << n) - 1 {
            let inside = |v: usize| mask & (1 << v) != 0;
            let mut ordered = 0usize;
            for i in 0..n {
                for j in 0..n {
                    if i != j && g.has_edge(i, j) && inside(i) != inside(j) {
                        ordered += 1;
                    }
                }
            }
            let ds: usize = (0..n).filter(|&v| inside(v)).map(|v| g.degree(v)).sum();
            let dc: usize = (0..n).filter(|&v| !inside(v)).map(|v| g.degree(v)).sum();
            best = best.min((ordered / 2) as f64 / ds.min(dc) as f64);
        }
        best
    }

    #[test]
    fn degrees_count_the_loop_once() {
        let p3 = Graph::path(3).unwrap();
        assert_eq!(p3.degrees(), vec![2, 3, 2]);
        let dm = p3.degree_matrix();
        assert_eq!(dm[(1, 1)], 3);
        assert_eq!(dm[(0, 1)], 0);
        assert_eq!(Graph::empty(1).unwrap().degrees(), vec![1]);
        assert_eq!(Graph::complete(3).unwrap().degrees(), vec![3, 3, 3]);
    }

    #[test]
    fn normalized_adjacency_rows() {
        let a = Graph::path(3).unwrap().normalized_adjacency();
        let expect = [[0.5, 0.5, 0.0], [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], [0.0, 0.5, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[(i, j)] - expect[i][j]).abs() < 1e-15);
            }
        }
        let k5 = Graph::complete(5).unwrap().normalized_adjacency();
        assert!(k5.iter().all(|&v| (v - 0.2).abs() < 1e-15));
        assert_eq!(Graph::empty(1).unwrap().normalized_adjacency()[(0, 0)], 1.0);
        let g = Graph::dumbbell(7).unwrap().normalized_adjacency();
        for i in 0..7 {
            assert!((g.row(i).sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn conductance_examples() {
        let c = Graph::path(3).unwrap().conductance().unwrap();
        assert_eq!((c.boundary, c.volume, c.cut.clone()), (1, 2, vec![0]));
        assert_eq!(c.value, 0.5);
        let c = Graph::path(4).unwrap().conductance().unwrap();
        assert_eq!((c.boundary, c.volume, c.cut.clone()), (1, 5, vec![0, 1]));
        assert_eq!(c.value, 0.2);
        let c = Graph::complete(2).unwrap().conductance().unwrap();
        assert_eq!((c.value, c.cut), (0.5, vec![0]));
    }

    #[test]
    fn conductance_errors() {
        assert_eq!(Graph::path(25).unwrap().conductance(), Err(GraphError::TooLarge(25)));
        assert_eq!(Graph::empty(3).unwrap().conductance(), Err(GraphError::Disconnected));
        assert!(matches!(Graph::empty(1).unwrap().conductance(), Err(GraphError::TooSmall { .. })));
    }

    #[test]
    fn conductance_matches_ordered_pair_route() {
        let mut rng = CounterRng::new(11).unwrap();
        for trial in 0..40 {
            let n = 2 + trial % 9;
            let g = Graph::random_connected(n, 0.3, &mut rng).unwrap();
            let c = g.conductance().unwrap();
            assert!(c.value > 0.0 && c.value <= 1.0);
            assert!((c.value - bf_conductance_ordered_pairs(&g)).abs() < 1e-15, "{g}");
        }
    }

    #[test]
    fn diameters() {
        assert_eq!(Graph::path(4).unwrap().effective_diameter(), 3);
        assert_eq!(Graph::complete(5).unwrap().effective_diameter(), 1);
        let two_p3 = Graph::new(6, [(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        assert_eq!(two_p3.effective_diameter(), 2);
        assert_eq!(two_p3.diameter(), Err(GraphError::Disconnected));
        assert_eq!(Graph::empty(3).unwrap().effective_diameter(), 0);
    }

    #[test]
    fn r_partite_constructor() {
        let k12 = Graph::complete_r_partite(&PartiteSpec::new(vec![1, 2]).unwrap());
        assert_eq!(k12.edges(), &[(0, 1), (0, 2)]);
        let e = Graph::complete_r_partite(&PartiteSpec::new(vec![4]).unwrap());
        assert!(e.edges().is_empty());
        for r in 1..7 {
            let spec = PartiteSpec::new(vec![1; r]).unwrap();
            assert_eq!(Graph::complete_r_partite(&spec), Graph::complete(r).unwrap());
        }
        assert!(PartiteSpec::new(vec![]).is_err());
        assert!(PartiteSpec::new(vec![2, 0]).is_err());
        assert_eq!(PartiteSpec::compositions(4).len(), 8);
    }

    #[test]
    fn induced_subgraphs() {
        let p4 = Graph::path(4).unwrap();
        let (g, map) = p4.induced_subgraph(&[0, 1, 2]).unwrap();
        assert_eq!(g, Graph::path(3).unwrap());
        assert_eq!(map, vec![0, 1, 2]);
        let k22 = Graph::complete_r_partite(&PartiteSpec::new(vec![2, 2]).unwrap());
        let (g, _) = k22.induced_subgraph(&[0, 1]).unwrap();
        assert_eq!(g, Graph::empty(2).unwrap());
        let (g, _) = k22.induced_subgraph(&[0, 1, 2, 3]).unwrap();
        assert_eq!(g, k22);
        assert_eq!(p4.induced_subgraph(&[]).unwrap_err(), GraphError::EmptySet);
    }

    #[test]
    fn standard_constructors() {
        assert_eq!(standard_graph("path", 4).unwrap(), Graph::path(4).unwrap());
        assert_eq!(standard_graph("complete", 3).unwrap(), Graph::complete(3).unwrap());
        let d = standard_graph("dumbbell", 6).unwrap();
        assert_eq!(d.edges(), &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]);
        let d7 = Graph::dumbbell(7).unwrap();
        assert_eq!(d7.edges().len(), 6 + 3 + 1);
        assert!(standard_graph("hypercube", 4).is_err());
    }

    #[test]
    fn loader_rejections() {
        assert_eq!(Graph::new(3, [(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert_eq!(Graph::new(3, [(0, 3)]), Err(GraphError::OutOfRange(0, 3, 3)));
        assert_eq!(Graph::new(3, [(1, 1)]), Err(GraphError::ExplicitSelfLoop(1)));
    }

    #[test]
    fn random_graphs_are_connected_and_symmetric() {
        let mut rng = CounterRng::new(3).unwrap();
        for n in 1..15 {
            let g = Graph::random_connected(n, 0.2, &mut rng).unwrap();
            assert!(g.is_connected());
            assert!(g.effective_diameter() < n.max(1));
            for i in 0..n {
                assert!(g.has_edge(i, i));
                for j in 0..n {
                    assert_eq!(g.has_edge(i, j), g.has_edge(j, i));
                }
            }
        }
    }
}
