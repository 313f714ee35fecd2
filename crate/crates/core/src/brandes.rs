//! Static betweenness: augmented single-source searches and Brandes's
//! dependency accumulation.
//!
//! Scores follow the ordered-pair convention for directed and undirected
//! graphs alike: `c_B(v) = sum over ordered (s, t), s != v != t, of
//! sigma_st(v) / sigma_st`. Undirected scores are therefore twice the
//! unordered-pair value.
//!
//! Predecessor lists are never stored. They are recomputed from distances and
//! in-adjacency whenever a traversal needs them.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::ops::Index;
use std::time::{Duration, Instant};

use ordered_float::OrderedFloat;

use crate::graph::{Graph, NodeId};
use crate::tol::same_dist;

/// Distances and shortest-path counts from a single source.
#[derive(Clone, Debug, PartialEq)]
pub struct SsspResult {
    pub source: NodeId,
    /// `f64::INFINITY` marks unreachable nodes.
    pub dist: Vec<f64>,
    /// Path counts; `0.0` for unreachable nodes.
    pub sigma: Vec<f64>,
    /// Reachable nodes in nondecreasing distance order.
    pub settle_order: Vec<NodeId>,
}

/// Per-node betweenness scores.
#[derive(Clone, Debug, PartialEq)]
pub struct Betweenness(Vec<f64>);

impl Betweenness {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn from_vec(scores: Vec<f64>) -> Self {
        Self(scores)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Largest absolute per-node difference.
    pub fn max_abs_diff(&self, other: &Betweenness) -> f64 {
        assert_eq!(self.len(), other.len(), "score vectors differ in length");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn add(&mut self, x: NodeId, amount: f64) {
        self.0[x] += amount;
    }
}

impl Index<NodeId> for Betweenness {
    type Output = f64;

    fn index(&self, x: NodeId) -> &f64 {
        &self.0[x]
    }
}

/// Reusable buffers for repeated single-source searches.
///
/// `dist` and `sigma` are kept at their "unreached" values between runs; only
/// the entries a run touched are reset.
pub(crate) struct SsspScratch {
    pub dist: Vec<f64>,
    pub sigma: Vec<f64>,
    pub delta: Vec<f64>,
    pub order: Vec<NodeId>,
    heap: BinaryHeap<Reverse<(OrderedFloat<f64>, NodeId)>>,
    settled: Vec<bool>,
}

impl SsspScratch {
    pub fn new(n: usize) -> Self {
        Self {
            dist: vec![f64::INFINITY; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            heap: BinaryHeap::new(),
            settled: vec![false; n],
        }
    }

    fn reset(&mut self) {
        for &x in &self.order {
            self.dist[x] = f64::INFINITY;
            self.sigma[x] = 0.0;
            self.delta[x] = 0.0;
            self.settled[x] = false;
        }
        self.order.clear();
    }

    /// Runs BFS (unit weights) or Dijkstra from `s`, filling `dist`, `sigma`
    /// and `order`.
    pub fn search(&mut self, graph: &Graph, s: NodeId) {
        self.reset();
        if graph.is_unit() {
            self.bfs(graph, s);
        } else {
            self.dijkstra(graph, s);
        }
    }

    // The settle order doubles as the FIFO queue.
    fn bfs(&mut self, graph: &Graph, s: NodeId) {
        self.dist[s] = 0.0;
        self.sigma[s] = 1.0;
        self.order.push(s);
        let mut head = 0;
        while head < self.order.len() {
            let x = self.order[head];
            head += 1;
            let next = self.dist[x] + 1.0;
            let sx = self.sigma[x];
            for &(y, _) in graph.out_neighbors(x) {
                let dy = self.dist[y];
                if dy == f64::INFINITY {
                    self.dist[y] = next;
                    self.sigma[y] = sx;
                    self.order.push(y);
                } else if dy == next {
                    self.sigma[y] += sx;
                }
            }
        }
    }

    // Path counts are summed when a node is settled, over in-neighbors that
    // satisfy the same tolerance test used later to recover predecessors.
    fn dijkstra(&mut self, graph: &Graph, s: NodeId) {
        self.dist[s] = 0.0;
        self.heap.push(Reverse((OrderedFloat(0.0), s)));
        while let Some(Reverse((OrderedFloat(d), x))) = self.heap.pop() {
            if self.settled[x] || d > self.dist[x] {
                continue;
            }
            self.settled[x] = true;
            self.order.push(x);
            self.sigma[x] = if x == s {
                1.0
            } else {
                graph
                    .in_neighbors(x)
                    .iter()
                    .filter(|&&(y, w)| self.settled[y] && same_dist(d, self.dist[y] + w))
                    .map(|&(y, _)| self.sigma[y])
                    .sum()
            };
            for &(y, w) in graph.out_neighbors(x) {
                let alt = d + w;
                if !self.settled[y] && alt < self.dist[y] {
                    self.dist[y] = alt;
                    self.heap.push(Reverse((OrderedFloat(alt), y)));
                }
            }
        }
    }

    /// Fills `delta` with one-sided dependencies for the last search.
    pub fn accumulate(&mut self, graph: &Graph) {
        if graph.is_unit() {
            // Hop counts are exact in f64.
            for &w in self.order.iter().rev() {
                let up = self.dist[w] - 1.0;
                let coeff = (1.0 + self.delta[w]) / self.sigma[w];
                for &(y, _) in graph.in_neighbors(w) {
                    if self.dist[y] == up {
                        self.delta[y] += self.sigma[y] * coeff;
                    }
                }
            }
            return;
        }
        for &w in self.order.iter().rev() {
            let dw = self.dist[w];
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for &(y, weight) in graph.in_neighbors(w) {
                if same_dist(dw, self.dist[y] + weight) {
                    self.delta[y] += self.sigma[y] * coeff;
                }
            }
        }
    }
}

/// Distances and path counts from `s`.
pub fn sssp_augmented(graph: &Graph, s: NodeId) -> SsspResult {
    let mut scratch = SsspScratch::new(graph.node_count());
    scratch.search(graph, s);
    SsspResult {
        source: s,
        dist: scratch.dist,
        sigma: scratch.sigma,
        settle_order: scratch.order,
    }
}

/// One-sided dependencies `delta_s(v)` of the source of `sssp` on every node,
/// walking the search order backwards.
pub fn accumulate_dependencies(graph: &Graph, sssp: &SsspResult) -> Vec<f64> {
    let mut delta = vec![0.0; graph.node_count()];
    for &w in sssp.settle_order.iter().rev() {
        let coeff = (1.0 + delta[w]) / sssp.sigma[w];
        for &(y, weight) in graph.in_neighbors(w) {
            if same_dist(sssp.dist[w], sssp.dist[y] + weight) {
                delta[y] += sssp.sigma[y] * coeff;
            }
        }
    }
    delta
}

/// Runs one search and accumulation per source and hands each result to `f`.
///
/// `f` receives the source, the distance and path-count rows, the dependency
/// row (all zeros when `accumulate` is false) and the settle order.
pub(crate) fn sweep_sources<F>(graph: &Graph, accumulate: bool, mut f: F)
where
    F: FnMut(NodeId, &SsspScratch),
{
    let mut scratch = SsspScratch::new(graph.node_count());
    for s in 0..graph.node_count() {
        scratch.search(graph, s);
        if accumulate {
            scratch.accumulate(graph);
        }
        f(s, &scratch);
    }
}

pub fn brandes_betweenness(graph: &Graph) -> Betweenness {
    let mut scores = Betweenness::zeros(graph.node_count());
    sweep_sources(graph, true, |s, scratch| {
        for &x in &scratch.order {
            if x != s {
                scores.add(x, scratch.delta[x]);
            }
        }
    });
    scores
}

/// Brandes with the time spent in the search and accumulation phases
/// reported separately.
pub fn brandes_betweenness_timed(graph: &Graph) -> (Betweenness, Duration, Duration) {
    let n = graph.node_count();
    let mut scores = Betweenness::zeros(n);
    let mut scratch = SsspScratch::new(n);
    let mut search_time = Duration::ZERO;
    let mut dep_time = Duration::ZERO;
    for s in 0..n {
        let t0 = Instant::now();
        scratch.search(graph, s);
        let t1 = Instant::now();
        scratch.accumulate(graph);
        for &x in &scratch.order {
            if x != s {
                scores.add(x, scratch.delta[x]);
            }
        }
        dep_time += t1.elapsed();
        search_time += t1 - t0;
    }
    (scores, search_time, dep_time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph::{Directedness, Weighting};

    /// Every simple path from `s` to `t` with its length, by exhaustive DFS.
    fn simple_paths(g: &Graph, s: NodeId, t: NodeId) -> Vec<(f64, Vec<NodeId>)> {
        fn dfs(
            g: &Graph,
            x: NodeId,
            t: NodeId,
            len: f64,
            path: &mut Vec<NodeId>,
            out: &mut Vec<(f64, Vec<NodeId>)>,
        ) {
            if x == t {
                out.push((len, path.clone()));
                return;
            }
            for &(y, w) in g.out_neighbors(x) {
                if !path.contains(&y) {
                    path.push(y);
                    dfs(g, y, t, len + w, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        dfs(g, s, t, 0.0, &mut vec![s], &mut out);
        out
    }

    fn shortest_paths(g: &Graph, s: NodeId, t: NodeId) -> (f64, Vec<Vec<NodeId>>) {
        let all = simple_paths(g, s, t);
        let best = all.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let paths = all
            .into_iter()
            .filter(|p| (p.0 - best).abs() < 1e-9)
            .map(|p| p.1)
            .collect();
        (best, paths)
    }

    /// c_B by enumerating every shortest path of every ordered pair.
    fn enumerated_betweenness(g: &Graph) -> Vec<f64> {
        let n = g.node_count();
        let mut c = vec![0.0; n];
        for s in 0..n {
            for t in 0..n {
                if s == t {
                    continue;
                }
                let (_, paths) = shortest_paths(g, s, t);
                let k = paths.len() as f64;
                for p in &paths {
                    for &x in &p[1..p.len() - 1] {
                        c[x] += 1.0 / k;
                    }
                }
            }
        }
        c
    }

    fn enumerated_dependency(g: &Graph, s: NodeId) -> Vec<f64> {
        let n = g.node_count();
        let mut d = vec![0.0; n];
        for t in (0..n).filter(|&t| t != s) {
            let (_, paths) = shortest_paths(g, s, t);
            let k = paths.len() as f64;
            for p in &paths {
                for &x in &p[1..p.len() - 1] {
                    d[x] += 1.0 / k;
                }
            }
        }
        d
    }

    #[test]
    fn enumeration_oracle_values() {
        // Frozen expectations, produced by the enumeration helpers above.
        let c4 = gen::cycle(4);
        let (d02, p02) = shortest_paths(&c4, 0, 2);
        assert_eq!((d02, p02.len()), (2.0, 2));
        assert_eq!(enumerated_betweenness(&gen::path(4)), vec![0.0, 4.0, 4.0, 0.0]);
        assert_eq!(enumerated_betweenness(&c4), vec![1.0, 1.0, 1.0, 1.0]);
        assert_eq!(enumerated_dependency(&gen::path(4), 0)[1..], [2.0, 1.0, 0.0]);
        assert_eq!(enumerated_dependency(&gen::star(3), 1)[0], 2.0);
    }

    #[test]
    fn sssp_path() {
        let r = sssp_augmented(&gen::path(4), 0);
        assert_eq!(r.dist, vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(r.sigma, vec![1.0; 4]);
        assert_eq!(r.settle_order, vec![0, 1, 2, 3]);
    }

    #[test]
    fn sssp_cycle() {
        let r = sssp_augmented(&gen::cycle(4), 0);
        assert_eq!(r.dist, vec![0.0, 1.0, 2.0, 1.0]);
        assert_eq!(r.sigma, vec![1.0, 1.0, 2.0, 1.0]);
    }

    #[test]
    fn sssp_unreachable() {
        let g = Graph::from_edges(3, Directedness::Undirected, Weighting::Unit, [(0, 1, 1.0)])
            .unwrap();
        let r = sssp_augmented(&g, 0);
        assert_eq!(r.dist[2], f64::INFINITY);
        assert_eq!(r.sigma[2], 0.0);
        assert_eq!(r.settle_order, vec![0, 1]);
    }

    #[test]
    fn sssp_weighted_matches_bfs_on_unit_weights() {
        let unit = gen::cycle(6);
        let weighted = Graph::from_edges(6, Directedness::Undirected, Weighting::Weighted, unit.edges())
            .unwrap();
        for s in 0..6 {
            let a = sssp_augmented(&unit, s);
            let b = sssp_augmented(&weighted, s);
            assert_eq!(a.dist, b.dist);
            assert_eq!(a.sigma, b.sigma);
        }
    }

    #[test]
    fn dependencies() {
        let path = gen::path(4);
        let d = accumulate_dependencies(&path, &sssp_augmented(&path, 0));
        assert_eq!(d[1..], [2.0, 1.0, 0.0]);

        let star = gen::star(3);
        let d = accumulate_dependencies(&star, &sssp_augmented(&star, 1));
        assert_eq!(d[0], 2.0);

        let edge = gen::path(2);
        let d = accumulate_dependencies(&edge, &sssp_augmented(&edge, 0));
        assert_eq!(d[1], 0.0);
    }

    #[test]
    fn betweenness_small_graphs() {
        assert_eq!(brandes_betweenness(&gen::path(4)).into_vec(), vec![0.0, 4.0, 4.0, 0.0]);
        assert_eq!(brandes_betweenness(&gen::star(3))[0], 6.0);
        assert_eq!(brandes_betweenness(&gen::cycle(4)).into_vec(), vec![1.0; 4]);
        assert!(brandes_betweenness(&Graph::undirected_unit(0)).is_empty());
    }

    #[test]
    fn weighted_triangle() {
        let g = Graph::from_edges(
            3,
            Directedness::Undirected,
            Weighting::Weighted,
            [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)],
        )
        .unwrap();
        assert_eq!(brandes_betweenness(&g).into_vec(), vec![0.0, 2.0, 0.0]);
    }

    #[test]
    fn matches_enumeration_on_small_random_graphs() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for i in 0..30 {
            let dir = if i % 2 == 0 { Directedness::Directed } else { Directedness::Undirected };
            let wt = if i % 3 == 0 { Weighting::Weighted } else { Weighting::Unit };
            let g = gen::gnp(&mut rng, 7, 0.35, dir, wt);
            let expected = enumerated_betweenness(&g);
            let got = brandes_betweenness(&g);
            for (a, b) in got.as_slice().iter().zip(&expected) {
                assert!((a - b).abs() < 1e-9, "{got:?} vs {expected:?}");
            }
        }
    }

    #[test]
    fn timed_variant_agrees() {
        let g = gen::grid(5, 4);
        let (scores, _, _) = brandes_betweenness_timed(&g);
        assert_eq!(scores, brandes_betweenness(&g));
    }
}
