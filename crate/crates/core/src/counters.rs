//! Operation counters for checking the cost bounds of the iBet update.
//!
//! Engines are generic over [`Tally`]; passing [`NoTally`] compiles every
//! counting call away, so timed runs carry no instrumentation cost.

use std::collections::HashMap;

use crate::apsp::{AffectedDelta, ApspState};
use crate::graph::{Graph, NodeId};
use crate::report::UpdateReport;
use crate::tol::same_dist;

pub trait Tally {
    fn visit(&mut self);
    fn scan_edges(&mut self, count: usize);
    fn scan_sources(&mut self, count: usize);
    fn pq_insert(&mut self);
    fn pq_extract(&mut self);
}

/// Discards every count.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoTally;

impl Tally for NoTally {
    #[inline(always)]
    fn visit(&mut self) {}
    #[inline(always)]
    fn scan_edges(&mut self, _: usize) {}
    #[inline(always)]
    fn scan_sources(&mut self, _: usize) {}
    #[inline(always)]
    fn pq_insert(&mut self) {}
    #[inline(always)]
    fn pq_extract(&mut self) {}
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounters {
    pub nodes_visited: u64,
    pub edges_scanned: u64,
    /// Entries read from per-target source lists (the `sum |S(p(y))|` term).
    pub source_list_scans: u64,
    pub pq_inserts: u64,
    pub pq_extracts: u64,
}

impl OpCounters {
    pub fn total(&self) -> u64 {
        self.nodes_visited
            + self.edges_scanned
            + self.source_list_scans
            + self.pq_inserts
            + self.pq_extracts
    }
}

impl std::ops::Add for OpCounters {
    type Output = OpCounters;

    fn add(self, o: OpCounters) -> OpCounters {
        OpCounters {
            nodes_visited: self.nodes_visited + o.nodes_visited,
            edges_scanned: self.edges_scanned + o.edges_scanned,
            source_list_scans: self.source_list_scans + o.source_list_scans,
            pq_inserts: self.pq_inserts + o.pq_inserts,
            pq_extracts: self.pq_extracts + o.pq_extracts,
        }
    }
}

impl Tally for OpCounters {
    fn visit(&mut self) {
        self.nodes_visited += 1;
    }
    fn scan_edges(&mut self, count: usize) {
        self.edges_scanned += count as u64;
    }
    fn scan_sources(&mut self, count: usize) {
        self.source_list_scans += count as u64;
    }
    fn pq_insert(&mut self) {
        self.pq_inserts += 1;
    }
    fn pq_extract(&mut self) {
        self.pq_extracts += 1;
    }
}

/// Counters split by update phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseCounters {
    pub apsp: OpCounters,
    pub dependency: OpCounters,
}

impl PhaseCounters {
    pub fn combined(&self) -> OpCounters {
        self.apsp + self.dependency
    }
}

/// `|A|` plus the edges incident to members of `A`, each edge counted once
/// per endpoint it has in `A`.
pub fn extended_size(graph: &Graph, nodes: impl IntoIterator<Item = NodeId>) -> usize {
    nodes
        .into_iter()
        .map(|x| 1 + graph.incident_edge_count(x))
        .sum()
}

/// Measured counts against the cost expressions of the two update phases.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundsVerdict {
    pub factor: f64,
    /// `||S(v)|| + ||T(u)|| + sum over t in T(u) of |S(p(t))|`.
    pub apsp_bound: f64,
    pub apsp_count: u64,
    /// `sum over s of ||tau(s)|| + ||tau'(s)||`, plus `|tau| log |tau|`
    /// terms on weighted graphs.
    pub dependency_bound: f64,
    pub dependency_count: u64,
}

impl BoundsVerdict {
    pub fn apsp_holds(&self) -> bool {
        self.apsp_count as f64 <= self.factor * self.apsp_bound
    }

    pub fn dependency_holds(&self) -> bool {
        self.dependency_count as f64 <= self.factor * self.dependency_bound
    }

    pub fn holds(&self) -> bool {
        self.apsp_holds() && self.dependency_holds()
    }
}

pub const DEFAULT_BOUND_FACTOR: f64 = 4.0;

/// Compares the counters of a finished iBet update with its cost bounds.
///
/// `tau(s)` and `tau'(s)` are rebuilt from the pre-update matrices and the
/// staged delta by testing every node against every affected target, which
/// costs `O(n * #affected pairs)`; meant for tests and diagnostics.
/// Counters missing from `report` are treated as zero.
pub fn check_bounds(
    report: &UpdateReport,
    graph_before: &Graph,
    apsp_before: &ApspState,
    delta: &AffectedDelta,
    factor: f64,
) -> BoundsVerdict {
    let counters = report.counters.unwrap_or_default();

    let mut apsp_bound = extended_size(graph_before, delta.affected_sources.iter().copied())
        + extended_size(graph_before, delta.affected_targets.iter().copied());
    for (i, _) in delta.affected_targets.iter().enumerate() {
        let p = delta.predecessor[i];
        let parent = delta
            .affected_targets
            .iter()
            .position(|&x| x == p)
            .expect("predecessor is an affected target");
        apsp_bound += delta.target_sources[parent].len();
    }

    let overlay: HashMap<(NodeId, NodeId), f64> = delta
        .staged
        .iter()
        .flat_map(|p| {
            let fwd = ((p.source, p.target), p.new_dist);
            let back = ((p.target, p.source), p.new_dist);
            std::iter::once(fwd).chain(delta.undirected.then_some(back))
        })
        .collect();
    let new_dist = |a: NodeId, b: NodeId| {
        overlay
            .get(&(a, b))
            .copied()
            .unwrap_or_else(|| apsp_before.dist(a, b))
    };

    let weighted = !graph_before.is_unit();
    let inserted = graph_before
        .edge_weight(
            delta.event.map_or(0, |e| e.u),
            delta.event.map_or(0, |e| e.v),
        )
        .is_none();
    let mut dependency_bound = 0.0;
    for (i, &s) in delta.affected_sources.iter().enumerate() {
        let targets = &delta.source_targets[i];
        let old = tau(graph_before.node_count(), s, targets, |a, b| apsp_before.dist(a, b));
        let new = tau(graph_before.node_count(), s, targets, new_dist);
        let mut size = extended_size(graph_before, old.iter().copied())
            + extended_size(graph_before, new.iter().copied());
        if let (Some(e), true) = (delta.event, inserted) {
            size += new.iter().filter(|&&x| x == e.u || x == e.v).count();
        }
        dependency_bound += size as f64;
        if weighted {
            dependency_bound += n_log_n(old.len()) + n_log_n(new.len());
        }
    }

    BoundsVerdict {
        factor,
        apsp_bound: apsp_bound as f64,
        apsp_count: counters.apsp.total(),
        dependency_bound,
        dependency_count: counters.dependency.total(),
    }
}

fn n_log_n(k: usize) -> f64 {
    let k = k as f64;
    k * k.log2().max(1.0)
}

/// `T(s)` together with every node lying strictly inside a shortest path
/// from `s` to some member of `T(s)` under the distance function `d`.
pub(crate) fn tau(
    n: usize,
    s: NodeId,
    targets: &[NodeId],
    d: impl Fn(NodeId, NodeId) -> f64,
) -> Vec<NodeId> {
    let mut member = vec![false; n];
    for &t in targets {
        member[t] = true;
    }
    for (w, m) in member.iter_mut().enumerate() {
        if *m || w == s {
            continue;
        }
        let dsw = d(s, w);
        if !dsw.is_finite() {
            continue;
        }
        *m = targets
            .iter()
            .any(|&t| t != w && same_dist(dsw + d(w, t), d(s, t)));
    }
    (0..n).filter(|&x| member[x]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn extended_size_examples() {
        assert_eq!(extended_size(&gen::path(3), []), 0);
        assert_eq!(extended_size(&gen::path(3), [1]), 3);
        assert_eq!(extended_size(&gen::cycle(4), 0..4), 12);
    }

    #[test]
    fn extended_size_directed_counts_in_and_out() {
        let g = Graph::from_edges(
            3,
            crate::graph::Directedness::Directed,
            crate::graph::Weighting::Unit,
            [(0, 1, 1.0), (1, 2, 1.0), (2, 1, 1.0)],
        )
        .unwrap();
        assert_eq!(extended_size(&g, [1]), 1 + 3);
    }

    #[test]
    fn notally_is_zero_sized() {
        assert_eq!(std::mem::size_of::<NoTally>(), 0);
    }

    #[test]
    fn counters_accumulate() {
        let mut c = OpCounters::default();
        c.visit();
        c.scan_edges(3);
        c.scan_sources(2);
        c.pq_insert();
        c.pq_extract();
        assert_eq!(c.total(), 8);
        assert_eq!((c + c).edges_scanned, 6);
    }
}
