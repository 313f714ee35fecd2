//! Pair-by-pair incremental baseline.
//!
//! Affected sources are found the same way as in iBet, but every source then
//! runs its own pruned search from `v` to find its affected targets, and the
//! dependency change of each affected pair is applied by walking that pair's
//! shortest-path DAG backwards from the target, once on the old state and
//! once on the new one.

use std::time::Instant;

use crate::apsp::{commit, AffectedDelta, ApspState, StagedPair};
use crate::brandes::Betweenness;
use crate::counters::{NoTally, OpCounters, PhaseCounters, Tally};
use crate::error::EngineError;
use crate::graph::{Graph, NodeId, UpdateEvent, UpdateOutcome};
use crate::ibet::{check_sizes, orient_update};
use crate::report::{Engine, UpdateReport};
use crate::tol::{at_most, same_dist, strictly_less};

struct Marks {
    epoch: u32,
    seen: Vec<u32>,
    list: Vec<NodeId>,
}

impl Marks {
    fn new(n: usize) -> Self {
        Self {
            epoch: 0,
            seen: vec![0; n],
            list: Vec::new(),
        }
    }

    fn begin(&mut self) {
        if self.epoch == u32::MAX {
            self.seen.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.list.clear();
    }

    fn mark(&mut self, x: NodeId) -> bool {
        if self.seen[x] == self.epoch {
            return false;
        }
        self.seen[x] = self.epoch;
        self.list.push(x);
        true
    }
}

/// Stages the changed pairs source by source.
fn stage_pairs<T: Tally>(
    graph: &Graph,
    event: &UpdateEvent,
    apsp: &ApspState,
    marks: &mut Marks,
    tally: &mut T,
) -> AffectedDelta {
    if !at_most(event.new_weight, apsp.dist(event.u, event.v)) {
        return AffectedDelta::empty(*event, !graph.is_directed());
    }
    let (event, sources) = orient_update(graph, event, apsp, tally);
    let UpdateEvent { u, v, new_weight } = event;
    let mut delta = AffectedDelta::empty(event, !graph.is_directed());
    delta.affected_sources = sources;
    let mut all_targets = Marks::new(graph.node_count());
    all_targets.begin();

    for &s in &delta.affected_sources {
        let dsu = apsp.dist(s, u) + new_weight;
        let sigma_su = apsp.sigma(s, u);
        marks.begin();
        marks.mark(v);
        let mut head = 0;
        let mut targets = Vec::new();
        while head < marks.list.len() {
            let t = marks.list[head];
            head += 1;
            tally.visit();
            let through = dsu + apsp.dist(v, t);
            let old_dist = apsp.dist(s, t);
            let old_sigma = apsp.sigma(s, t);
            let via_edge = sigma_su * apsp.sigma(v, t);
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
            targets.push(t);
            all_targets.mark(t);

            let succ = graph.out_neighbors(t);
            tally.scan_edges(succ.len());
            for &(w, _) in succ {
                if marks.seen[w] != marks.epoch
                    && at_most(dsu + apsp.dist(v, w), apsp.dist(s, w))
                {
                    marks.mark(w);
                }
            }
        }
        delta.source_targets.push(targets);
    }
    delta.affected_targets = all_targets.list;
    delta
}

/// Adds `factor * σ_sy σ_yt / σ_st` for every inner node `y` of the
/// shortest `s`-`t` paths in `graph` under `apsp`.
#[allow(clippy::too_many_arguments)]
fn walk_pair<T: Tally>(
    graph: &Graph,
    apsp: &ApspState,
    s: NodeId,
    t: NodeId,
    factor: f64,
    scores: &mut Betweenness,
    marks: &mut Marks,
    tally: &mut T,
) {
    let sigma_st = apsp.sigma(s, t);
    if sigma_st == 0.0 {
        return;
    }
    marks.begin();
    marks.mark(t);
    let mut head = 0;
    while head < marks.list.len() {
        let x = marks.list[head];
        head += 1;
        tally.visit();
        let dsx = apsp.dist(s, x);
        let preds = graph.in_neighbors(x);
        tally.scan_edges(preds.len());
        for &(y, w) in preds {
            if y == s || !same_dist(apsp.dist(s, y) + w, dsx) {
                continue;
            }
            if marks.mark(y) {
                scores.add(y, factor * apsp.sigma(s, y) * apsp.sigma(y, t) / sigma_st);
            }
        }
    }
}

/// Applies `event` and repairs `apsp` and `scores`.
pub fn kwcc_update(
    graph: &mut Graph,
    apsp: &mut ApspState,
    scores: &mut Betweenness,
    event: &UpdateEvent,
) -> Result<UpdateReport, EngineError> {
    kwcc_update_with(graph, apsp, scores, event, &mut NoTally, &mut NoTally)
}

pub fn kwcc_update_counted(
    graph: &mut Graph,
    apsp: &mut ApspState,
    scores: &mut Betweenness,
    event: &UpdateEvent,
) -> Result<UpdateReport, EngineError> {
    let (mut a, mut b) = (OpCounters::default(), OpCounters::default());
    let mut report = kwcc_update_with(graph, apsp, scores, event, &mut a, &mut b)?;
    report.counters = Some(PhaseCounters {
        apsp: a,
        dependency: b,
    });
    Ok(report)
}

pub fn kwcc_update_with<T: Tally>(
    graph: &mut Graph,
    apsp: &mut ApspState,
    scores: &mut Betweenness,
    event: &UpdateEvent,
    apsp_tally: &mut T,
    dep_tally: &mut T,
) -> Result<UpdateReport, EngineError> {
    check_sizes(graph, apsp, scores)?;
    let outcome = graph.validate_update(event)?;
    if outcome == UpdateOutcome::NoOp {
        return Ok(UpdateReport::noop(Engine::Kwcc));
    }
    let factor = if graph.is_directed() { 1.0 } else { 2.0 };
    let mut marks = Marks::new(graph.node_count());

    let t0 = Instant::now();
    let delta = stage_pairs(graph, event, apsp, &mut marks, apsp_tally);
    let t1 = Instant::now();
    for p in &delta.staged {
        walk_pair(graph, apsp, p.source, p.target, -factor, scores, &mut marks, dep_tally);
    }
    let t2 = Instant::now();
    graph.apply_update(event)?;
    commit(apsp, &delta);
    let t3 = Instant::now();
    for p in &delta.staged {
        walk_pair(graph, apsp, p.source, p.target, factor, scores, &mut marks, dep_tally);
    }
    let t4 = Instant::now();

    Ok(UpdateReport {
        engine: Engine::Kwcc,
        outcome,
        affected_sources: delta.affected_sources.len(),
        affected_targets: delta.affected_targets.len(),
        affected_pairs: delta.staged.len(),
        apsp_time: (t1 - t0) + (t3 - t2),
        dependency_time: (t2 - t1) + (t4 - t3),
        counters: None,
    })
}
