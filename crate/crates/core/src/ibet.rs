//! Incremental betweenness after an edge insertion or weight decrease.
//!
//! An update runs in four steps:
//!
//! 1. [`apsp_update`] finds the affected sources `S(v)` with a pruned
//!    backward search from `u`, then walks the affected targets `T(u)` with a
//!    single pruned search from `v`. Each target `t` only tests the sources of
//!    its search parent `p(t)`, because `S(t) ⊆ S(p(t))` whenever `p(t)` is a
//!    shortest-path predecessor of `t` from `v`. New distances and path
//!    counts are staged, not written.
//! 2. [`dependency_decrease`] runs once per affected source on the old graph
//!    and old matrices, subtracting `Δ_s(w) = Σ_{t ∈ T(s)} σ_st(w) / σ_st`
//!    from every node on an old shortest path to an affected target.
//! 3. The graph is mutated and the delta committed.
//! 4. [`dependency_increase`] repeats step 2 on the new graph and matrices,
//!    adding `Δ'_s(w)`.
//!
//! On undirected graphs the edge is first oriented so that the smaller of
//! the two affected-source sets plays `S(v)`. Each affected unordered pair is
//! then staged exactly once, with its source on the `u` side; the mirrored
//! pair contributes the same amount, so both dependency passes apply a
//! factor 2.

use std::collections::BinaryHeap;
use std::time::Instant;

use ordered_float::OrderedFloat;

use crate::apsp::{commit, AffectedDelta, ApspState, StagedPair};
use crate::brandes::Betweenness;
use crate::counters::{NoTally, OpCounters, PhaseCounters, Tally};
use crate::error::EngineError;
use crate::graph::{Graph, NodeId, UpdateEvent, UpdateOutcome};
use crate::report::{Engine, UpdateReport};
use crate::tol::{at_most, same_dist, strictly_less};

const NOT_A_SOURCE: u32 = u32::MAX;

/// Pruned BFS over in-neighbors from `u` collecting
/// `S(v) = { s : d(s, u) + ω'(u, v) <= d(s, v) }`, one node per step.
struct SourceSearch {
    event: UpdateEvent,
    seen: Vec<bool>,
    found: Vec<NodeId>,
    head: usize,
}

impl SourceSearch {
    fn new(graph: &Graph, event: UpdateEvent, apsp: &ApspState) -> Self {
        let mut search = Self {
            event,
            seen: vec![false; graph.node_count()],
            found: Vec::new(),
            head: 0,
        };
        if search.affected(apsp, event.u) {
            search.seen[event.u] = true;
            search.found.push(event.u);
        }
        search
    }

    fn affected(&self, apsp: &ApspState, y: NodeId) -> bool {
        let UpdateEvent { u, v, new_weight } = self.event;
        at_most(apsp.dist(y, u) + new_weight, apsp.dist(y, v))
    }

    fn done(&self) -> bool {
        self.head == self.found.len()
    }

    fn step<T: Tally>(&mut self, graph: &Graph, apsp: &ApspState, tally: &mut T) {
        let x = self.found[self.head];
        self.head += 1;
        tally.visit();
        let preds = graph.in_neighbors(x);
        tally.scan_edges(preds.len());
        for &(y, _) in preds {
            if !self.seen[y] && self.affected(apsp, y) {
                self.seen[y] = true;
                self.found.push(y);
            }
        }
    }

    fn run<T: Tally>(mut self, graph: &Graph, apsp: &ApspState, tally: &mut T) -> Vec<NodeId> {
        while !self.done() {
            self.step(graph, apsp, tally);
        }
        self.found
    }
}

/// `S(v)`: the sources whose distance or path count to `v` changes. Empty
/// when the new weight does not reach `d(u, v)`.
pub fn find_affected_sources<T: Tally>(
    graph: &Graph,
    event: &UpdateEvent,
    apsp: &ApspState,
    tally: &mut T,
) -> Vec<NodeId> {
    SourceSearch::new(graph, *event, apsp).run(graph, apsp, tally)
}

/// Picks the orientation of an undirected update whose affected-source set
/// is smaller, and returns it with that set. Both searches advance in
/// lockstep and stop as soon as one is complete, so the cost stays within
/// twice the smaller side. Directed events are returned unchanged.
///
/// Either orientation stages every affected unordered pair exactly once.
pub fn orient_update<T: Tally>(
    graph: &Graph,
    event: &UpdateEvent,
    apsp: &ApspState,
    tally: &mut T,
) -> (UpdateEvent, Vec<NodeId>) {
    if graph.is_directed() {
        return (*event, find_affected_sources(graph, event, apsp, tally));
    }
    let flipped = UpdateEvent::new(event.v, event.u, event.new_weight);
    let mut fwd = SourceSearch::new(graph, *event, apsp);
    let mut back = SourceSearch::new(graph, flipped, apsp);
    loop {
        if fwd.done() {
            return (*event, fwd.found);
        }
        if back.done() {
            return (flipped, back.found);
        }
        fwd.step(graph, apsp, tally);
        back.step(graph, apsp, tally);
    }
}

/// Stages the augmented-APSP changes caused by `event` without touching
/// `apsp` or `graph`. Undirected events may be flipped (see
/// [`orient_update`]); `delta.event` holds the orientation used.
///
/// Returns an empty delta when `ω'(u, v) > d(u, v)`: the new edge then lies
/// on no shortest path.
pub fn apsp_update<T: Tally>(
    graph: &Graph,
    event: &UpdateEvent,
    apsp: &ApspState,
    tally: &mut T,
) -> AffectedDelta {
    if !at_most(event.new_weight, apsp.dist(event.u, event.v)) {
        return AffectedDelta::empty(*event, !graph.is_directed());
    }
    let (event, sources) = orient_update(graph, event, apsp, tally);
    let UpdateEvent { u, v, new_weight } = event;
    let mut delta = AffectedDelta::empty(event, !graph.is_directed());

    let n = graph.node_count();
    let mut slot = vec![NOT_A_SOURCE; n];
    for (i, &s) in sources.iter().enumerate() {
        slot[s] = i as u32;
    }
    let mut source_targets: Vec<Vec<NodeId>> = vec![Vec::new(); sources.len()];

    let mut seen = vec![false; n];
    let mut targets = vec![v];
    let mut parent_index = vec![0usize];
    let mut predecessor = vec![v];
    let mut target_sources: Vec<Vec<NodeId>> = Vec::new();
    seen[v] = true;

    let mut head = 0;
    while head < targets.len() {
        let t = targets[head];
        tally.visit();
        let dvt = apsp.dist(v, t);
        let sigma_vt = apsp.sigma(v, t);
        let candidates: &[NodeId] = if head == 0 {
            &sources
        } else {
            &target_sources[parent_index[head]]
        };
        tally.scan_sources(candidates.len());

        let mut affected_here = Vec::new();
        for &s in candidates {
            let through = apsp.dist(s, u) + new_weight + dvt;
            let old_dist = apsp.dist(s, t);
            let old_sigma = apsp.sigma(s, t);
            let via_edge = apsp.sigma(s, u) * sigma_vt;
            let (new_dist, new_sigma) = if strictly_less(through, old_dist) {
                (through, via_edge)
            } else if same_dist(through, old_dist) {
                (old_dist, old_sigma + via_edge)
            } else {
                continue;
            };
            delta.staged.push(StagedPair {
                source: s,
                target: t,
                old_dist,
                old_sigma,
                new_dist,
                new_sigma,
            });
            source_targets[slot[s] as usize].push(t);
            affected_here.push(s);
        }
        target_sources.push(affected_here);

        // Children must be shortest-path successors of t from v so that the
        // source-list inclusion holds on weighted graphs as well.
        let succ = graph.out_neighbors(t);
        tally.scan_edges(succ.len());
        for &(w, weight) in succ {
            if seen[w] {
                continue;
            }
            let dvw = apsp.dist(v, w);
            if at_most(new_weight + dvw, apsp.dist(u, w)) && same_dist(dvt + weight, dvw) {
                seen[w] = true;
                targets.push(w);
                parent_index.push(head);
                predecessor.push(t);
            }
        }
        head += 1;
    }

    delta.affected_sources = sources;
    delta.source_targets = source_targets;
    delta.affected_targets = targets;
    delta.target_sources = target_sources;
    delta.predecessor = predecessor;
    delta
}

enum Frontier {
    /// Unit weights: one bucket per hop distance, scanned from the top.
    Buckets { levels: Vec<Vec<NodeId>>, top: usize },
    Heap(BinaryHeap<(OrderedFloat<f64>, NodeId)>),
}

/// Reusable per-source workspace for the dependency passes: the max-first
/// queue over distances from the source and the `Δ` accumulators.
///
/// Membership marks are epoch-stamped so nothing is cleared between sources.
pub struct DependencyWork {
    delta: Vec<f64>,
    queued: Vec<u32>,
    is_target: Vec<u32>,
    epoch: u32,
    inserted: Vec<NodeId>,
    extracted: Vec<NodeId>,
    frontier: Frontier,
}

impl DependencyWork {
    pub fn new(graph: &Graph) -> Self {
        let n = graph.node_count();
        let frontier = if graph.is_unit() {
            Frontier::Buckets {
                levels: Vec::new(),
                top: 0,
            }
        } else {
            Frontier::Heap(BinaryHeap::new())
        };
        Self {
            delta: vec![0.0; n],
            queued: vec![0; n],
            is_target: vec![0; n],
            epoch: 0,
            inserted: Vec::new(),
            extracted: Vec::new(),
            frontier,
        }
    }

    /// Nodes inserted into the queue during the last pass.
    pub fn inserted(&self) -> &[NodeId] {
        &self.inserted
    }

    /// Nodes in extraction order during the last pass.
    pub fn extracted(&self) -> &[NodeId] {
        &self.extracted
    }

    /// `(node, Δ)` for every node the last pass touched.
    pub fn accumulated(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.inserted.iter().map(|&x| (x, self.delta[x]))
    }

    fn begin(&mut self, targets: &[NodeId]) {
        if self.epoch == u32::MAX {
            self.queued.fill(0);
            self.is_target.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.inserted.clear();
        self.extracted.clear();
        for &t in targets {
            self.is_target[t] = self.epoch;
        }
    }

    fn is_target(&self, x: NodeId) -> bool {
        self.is_target[x] == self.epoch
    }

    fn insert(&mut self, x: NodeId, key: f64) -> bool {
        if self.queued[x] == self.epoch {
            return false;
        }
        self.queued[x] = self.epoch;
        self.delta[x] = 0.0;
        self.inserted.push(x);
        match &mut self.frontier {
            Frontier::Buckets { levels, top } => {
                let level = key as usize;
                if levels.len() <= level {
                    levels.resize_with(level + 1, Vec::new);
                }
                levels[level].push(x);
                *top = (*top).max(level);
            }
            Frontier::Heap(heap) => heap.push((OrderedFloat(key), x)),
        }
        true
    }

    fn extract_max(&mut self) -> Option<NodeId> {
        let x = match &mut self.frontier {
            Frontier::Buckets { levels, top } => loop {
                if let Some(x) = levels.get_mut(*top).and_then(Vec::pop) {
                    break Some(x);
                }
                if *top == 0 {
                    break None;
                }
                *top -= 1;
            },
            Frontier::Heap(heap) => heap.pop().map(|(_, x)| x),
        }?;
        self.extracted.push(x);
        Some(x)
    }
}

/// Shared body of both dependency passes. `graph` and `apsp` must describe
/// the same generation (both old or both new); `sign` is -1 or +1.
#[allow(clippy::too_many_arguments)]
fn accumulate_affected<T: Tally>(
    graph: &Graph,
    s: NodeId,
    targets: &[NodeId],
    apsp: &ApspState,
    scores: &mut Betweenness,
    sign: f64,
    work: &mut DependencyWork,
    tally: &mut T,
) {
    let factor = if graph.is_directed() { sign } else { 2.0 * sign };
    work.begin(targets);
    for &t in targets {
        let d = apsp.dist(s, t);
        // Unreachable before the update: no old paths to remove.
        if d.is_finite() && work.insert(t, d) {
            tally.pq_insert();
        }
    }
    while let Some(w) = work.extract_max() {
        tally.pq_extract();
        tally.visit();
        let dw = work.delta[w];
        scores.add(w, factor * dw);
        let dsw = apsp.dist(s, w);
        let carried = if work.is_target(w) { 1.0 + dw } else { dw };
        let ratio = carried / apsp.sigma(s, w);
        let preds = graph.in_neighbors(w);
        tally.scan_edges(preds.len());
        for &(y, weight) in preds {
            if y == s {
                continue;
            }
            let dsy = apsp.dist(s, y);
            if !same_dist(dsw, dsy + weight) {
                continue;
            }
            if work.insert(y, dsy) {
                tally.pq_insert();
            }
            work.delta[y] += apsp.sigma(s, y) * ratio;
        }
    }
}

/// Removes the old-path contributions of affected source `s`.
///
/// Must run before [`commit`] and before the graph is mutated.
pub fn dependency_decrease<T: Tally>(
    graph: &Graph,
    s: NodeId,
    delta: &AffectedDelta,
    apsp: &ApspState,
    scores: &mut Betweenness,
    work: &mut DependencyWork,
    tally: &mut T,
) {
    accumulate_affected(graph, s, delta.targets_of(s), apsp, scores, -1.0, work, tally);
}

/// Adds the new-path contributions of affected source `s`.
///
/// Must run after the graph is mutated and the delta committed.
pub fn dependency_increase<T: Tally>(
    graph: &Graph,
    s: NodeId,
    delta: &AffectedDelta,
    apsp: &ApspState,
    scores: &mut Betweenness,
    work: &mut DependencyWork,
    tally: &mut T,
) {
    accumulate_affected(graph, s, delta.targets_of(s), apsp, scores, 1.0, work, tally);
}

pub(crate) fn check_sizes(
    graph: &Graph,
    apsp: &ApspState,
    scores: &Betweenness,
) -> Result<(), EngineError> {
    let n = graph.node_count();
    for state in [apsp.node_count(), scores.len()] {
        if state != n {
            return Err(EngineError::SizeMismatch { state, graph: n });
        }
    }
    Ok(())
}

/// Full incremental update with separate tallies for the two phases.
///
/// Returns the report and the committed delta.
pub fn ibet_update_with<T: Tally>(
    graph: &mut Graph,
    apsp: &mut ApspState,
    scores: &mut Betweenness,
    event: &UpdateEvent,
    apsp_tally: &mut T,
    dep_tally: &mut T,
) -> Result<(UpdateReport, AffectedDelta), EngineError> {
    check_sizes(graph, apsp, scores)?;
    let outcome = graph.validate_update(event)?;
    if outcome == UpdateOutcome::NoOp {
        return Ok((
            UpdateReport::noop(Engine::Ibet),
            AffectedDelta::empty(*event, !graph.is_directed()),
        ));
    }

    let t0 = Instant::now();
    let delta = apsp_update(graph, event, apsp, apsp_tally);
    let t1 = Instant::now();

    let mut work = DependencyWork::new(graph);
    for &s in &delta.affected_sources {
        dependency_decrease(graph, s, &delta, apsp, scores, &mut work, dep_tally);
    }
    let t2 = Instant::now();

    graph.apply_update(event)?;
    commit(apsp, &delta);
    let t3 = Instant::now();

    for &s in &delta.affected_sources {
        dependency_increase(graph, s, &delta, apsp, scores, &mut work, dep_tally);
    }
    let t4 = Instant::now();

    let report = UpdateReport {
        engine: Engine::Ibet,
        outcome,
        affected_sources: delta.affected_sources.len(),
        affected_targets: if delta.is_empty() { 0 } else { delta.affected_targets.len() },
        affected_pairs: delta.staged.len(),
        apsp_time: (t1 - t0) + (t3 - t2),
        dependency_time: (t2 - t1) + (t4 - t3),
        counters: None,
    };
    Ok((report, delta))
}

/// Applies `event` to `graph` and brings `apsp` and `scores` up to date.
pub fn ibet_update(
    graph: &mut Graph,
    apsp: &mut ApspState,
    scores: &mut Betweenness,
    event: &UpdateEvent,
) -> Result<UpdateReport, EngineError> {
    let (mut a, mut b) = (NoTally, NoTally);
    ibet_update_with(graph, apsp, scores, event, &mut a, &mut b).map(|(r, _)| r)
}

/// [`ibet_update`] with operation counters recorded in the report.
pub fn ibet_update_counted(
    graph: &mut Graph,
    apsp: &mut ApspState,
    scores: &mut Betweenness,
    event: &UpdateEvent,
) -> Result<(UpdateReport, AffectedDelta), EngineError> {
    let (mut a, mut b) = (OpCounters::default(), OpCounters::default());
    let (mut report, delta) = ibet_update_with(graph, apsp, scores, event, &mut a, &mut b)?;
    report.counters = Some(PhaseCounters {
        apsp: a,
        dependency: b,
    });
    Ok((report, delta))
}
