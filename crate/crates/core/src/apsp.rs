//! All-pairs distances and shortest-path counts, plus the staged delta an
//! incremental update produces before it is committed.

use crate::brandes::{sweep_sources, Betweenness};
use crate::graph::{Graph, NodeId, UpdateEvent};
use crate::tol::strictly_less;

/// Row-major `n x n` distance and path-count matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ApspState {
    n: usize,
    dist: Vec<f64>,
    sigma: Vec<f64>,
}

impl ApspState {
    /// Bytes needed for the two matrices of an `n`-node graph.
    pub fn bytes_for(n: usize) -> u128 {
        2 * (n as u128) * (n as u128) * std::mem::size_of::<f64>() as u128
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dist(&self, s: NodeId, t: NodeId) -> f64 {
        self.dist[s * self.n + t]
    }

    #[inline]
    pub fn sigma(&self, s: NodeId, t: NodeId) -> f64 {
        self.sigma[s * self.n + t]
    }

    pub fn dist_row(&self, s: NodeId) -> &[f64] {
        &self.dist[s * self.n..(s + 1) * self.n]
    }

    pub fn sigma_row(&self, s: NodeId) -> &[f64] {
        &self.sigma[s * self.n..(s + 1) * self.n]
    }

    #[inline]
    pub(crate) fn set(&mut self, s: NodeId, t: NodeId, dist: f64, sigma: f64) {
        let i = s * self.n + t;
        self.dist[i] = dist;
        self.sigma[i] = sigma;
    }

    pub(crate) fn empty(n: usize) -> Self {
        Self {
            n,
            dist: vec![f64::INFINITY; n * n],
            sigma: vec![0.0; n * n],
        }
    }

    pub(crate) fn fill_row(&mut self, s: NodeId, dist: &[f64], sigma: &[f64], order: &[NodeId]) {
        let base = s * self.n;
        for &x in order {
            self.dist[base + x] = dist[x];
            self.sigma[base + x] = sigma[x];
        }
    }

    /// Largest entrywise distance difference; matching infinities count as 0,
    /// a finite/infinite mismatch as infinity.
    pub fn max_dist_diff(&self, other: &ApspState) -> f64 {
        assert_eq!(self.n, other.n);
        self.dist
            .iter()
            .zip(&other.dist)
            .map(|(&a, &b)| if a == b { 0.0 } else { (a - b).abs() })
            .fold(0.0, f64::max)
    }

    pub fn max_sigma_diff(&self, other: &ApspState) -> f64 {
        assert_eq!(self.n, other.n);
        self.sigma
            .iter()
            .zip(&other.sigma)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Augmented APSP from one search per source.
pub fn init_apsp(graph: &Graph) -> ApspState {
    let mut state = ApspState::empty(graph.node_count());
    sweep_sources(graph, false, |s, scratch| {
        state.fill_row(s, &scratch.dist, &scratch.sigma, &scratch.order);
    });
    state
}

/// Augmented APSP and Brandes scores from a single sweep.
pub fn init_apsp_with_scores(graph: &Graph) -> (ApspState, Betweenness) {
    let n = graph.node_count();
    let mut state = ApspState::empty(n);
    let mut scores = Betweenness::zeros(n);
    sweep_sources(graph, true, |s, scratch| {
        state.fill_row(s, &scratch.dist, &scratch.sigma, &scratch.order);
        for &x in &scratch.order {
            if x != s {
                scores.add(x, scratch.delta[x]);
            }
        }
    });
    (state, scores)
}

/// One affected pair with its values before and after the update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StagedPair {
    pub source: NodeId,
    pub target: NodeId,
    pub old_dist: f64,
    pub old_sigma: f64,
    pub new_dist: f64,
    pub new_sigma: f64,
}

/// Staged result of an augmented-APSP update.
///
/// The matrices keep their old values until [`commit`], so dependency
/// passes can still read both generations.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AffectedDelta {
    pub event: Option<UpdateEvent>,
    pub undirected: bool,
    /// `S(v)`: sources whose shortest paths to `v` now use the updated edge.
    pub affected_sources: Vec<NodeId>,
    /// `T(u)` in discovery order; `affected_targets[0] == v` when non-empty.
    pub affected_targets: Vec<NodeId>,
    /// `S(t)` for each entry of `affected_targets`.
    pub target_sources: Vec<Vec<NodeId>>,
    /// `p(t)` for each entry of `affected_targets`; `p(v) = v`.
    pub predecessor: Vec<NodeId>,
    /// `T(s)` for each entry of `affected_sources`.
    pub source_targets: Vec<Vec<NodeId>>,
    pub staged: Vec<StagedPair>,
}

impl AffectedDelta {
    pub fn empty(event: UpdateEvent, undirected: bool) -> Self {
        Self {
            event: Some(event),
            undirected,
            ..Self::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.staged.is_empty()
    }

    /// `T(s)`, empty when `s` is not an affected source.
    pub fn targets_of(&self, s: NodeId) -> &[NodeId] {
        self.affected_sources
            .iter()
            .position(|&x| x == s)
            .map(|i| self.source_targets[i].as_slice())
            .unwrap_or(&[])
    }

    /// `S(t)` for `t` in `T(u)`.
    pub fn sources_of(&self, t: NodeId) -> Option<&[NodeId]> {
        self.affected_targets
            .iter()
            .position(|&x| x == t)
            .map(|i| self.target_sources[i].as_slice())
    }

    pub fn predecessor_of(&self, t: NodeId) -> Option<NodeId> {
        self.affected_targets
            .iter()
            .position(|&x| x == t)
            .map(|i| self.predecessor[i])
    }

    pub fn staged_value(&self, s: NodeId, t: NodeId) -> Option<(f64, f64)> {
        self.staged
            .iter()
            .find(|p| p.source == s && p.target == t)
            .map(|p| (p.new_dist, p.new_sigma))
    }
}

/// Writes every staged pair into `state`; undirected deltas also write the
/// mirrored `(t, s)` entry.
///
/// # Panics
///
/// If a staged distance exceeds the stored one, i.e. the delta was built
/// against a different state.
pub fn commit(state: &mut ApspState, delta: &AffectedDelta) {
    for p in &delta.staged {
        let current = state.dist(p.source, p.target);
        assert!(
            !strictly_less(current, p.new_dist),
            "staged distance for ({}, {}) increases {} -> {}",
            p.source,
            p.target,
            current,
            p.new_dist
        );
        state.set(p.source, p.target, p.new_dist, p.new_sigma);
        if delta.undirected {
            state.set(p.target, p.source, p.new_dist, p.new_sigma);
        }
    }
}
