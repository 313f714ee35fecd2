//! Source-by-source incremental baseline for unit-weight graphs.
//!
//! Keeps the full dependency matrix `δ_s(x)` next to the distance and
//! path-count matrices. After an insertion every source is checked; for each
//! source whose DAG changes, a traversal from the far endpoint repairs
//! distances and path counts, then the dependencies of every traversed node
//! and its ancestors are recomputed bottom-up.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use crate::apsp::ApspState;
use crate::brandes::{sweep_sources, Betweenness};
use crate::counters::{NoTally, OpCounters, PhaseCounters, Tally};
use crate::error::EngineError;
use crate::graph::{Graph, NodeId, UpdateEvent, UpdateOutcome};
use crate::ibet::check_sizes;
use crate::report::{Engine, UpdateReport};

/// Distances, path counts and per-source dependencies.
#[derive(Clone, Debug, PartialEq)]
pub struct KdbState {
    pub apsp: ApspState,
    n: usize,
    deps: Vec<f64>,
}

impl KdbState {
    /// Bytes needed by the three matrices of an `n`-node graph.
    pub fn bytes_for(n: usize) -> u128 {
        ApspState::bytes_for(n) * 3 / 2
    }

    /// Initial state and Brandes scores from one sweep.
    pub fn build(graph: &Graph) -> Result<(KdbState, Betweenness), EngineError> {
        if !graph.is_unit() {
            return Err(EngineError::Unsupported("kdb handles unit-weight graphs only"));
        }
        let n = graph.node_count();
        let mut apsp = ApspState::empty(n);
        let mut deps = vec![0.0; n * n];
        let mut scores = Betweenness::zeros(n);
        sweep_sources(graph, true, |s, scratch| {
            apsp.fill_row(s, &scratch.dist, &scratch.sigma, &scratch.order);
            for &x in &scratch.order {
                if x != s {
                    deps[s * n + x] = scratch.delta[x];
                    scores.add(x, scratch.delta[x]);
                }
            }
        });
        Ok((KdbState { apsp, n, deps }, scores))
    }

    /// `δ_s(x)`.
    pub fn dependency(&self, s: NodeId, x: NodeId) -> f64 {
        self.deps[s * self.n + x]
    }
}

struct Workspace {
    epoch: u32,
    touched_mark: Vec<u32>,
    region_mark: Vec<u32>,
    old_dist: Vec<f64>,
    touched: Vec<NodeId>,
    queue: VecDeque<NodeId>,
    region: Vec<NodeId>,
    stack: Vec<NodeId>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            epoch: 0,
            touched_mark: vec![0; n],
            region_mark: vec![0; n],
            old_dist: vec![0.0; n],
            touched: Vec::new(),
            queue: VecDeque::new(),
            region: Vec::new(),
            stack: Vec::new(),
        }
    }

    fn begin(&mut self) {
        if self.epoch == u32::MAX {
            self.touched_mark.fill(0);
            self.region_mark.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.touched.clear();
        self.region.clear();
    }

    fn old_dist(&self, x: NodeId, current: f64) -> f64 {
        if self.touched_mark[x] == self.epoch {
            self.old_dist[x]
        } else {
            current
        }
    }
}

/// Applies an edge insertion and repairs `state` and `scores`.
pub fn kdb_update(
    graph: &mut Graph,
    state: &mut KdbState,
    scores: &mut Betweenness,
    event: &UpdateEvent,
) -> Result<UpdateReport, EngineError> {
    kdb_update_with(graph, state, scores, event, &mut NoTally, &mut NoTally)
}

pub fn kdb_update_counted(
    graph: &mut Graph,
    state: &mut KdbState,
    scores: &mut Betweenness,
    event: &UpdateEvent,
) -> Result<UpdateReport, EngineError> {
    let (mut a, mut b) = (OpCounters::default(), OpCounters::default());
    let mut report = kdb_update_with(graph, state, scores, event, &mut a, &mut b)?;
    report.counters = Some(PhaseCounters {
        apsp: a,
        dependency: b,
    });
    Ok(report)
}

pub fn kdb_update_with<T: Tally>(
    graph: &mut Graph,
    state: &mut KdbState,
    scores: &mut Betweenness,
    event: &UpdateEvent,
    apsp_tally: &mut T,
    dep_tally: &mut T,
) -> Result<UpdateReport, EngineError> {
    if !graph.is_unit() {
        return Err(EngineError::Unsupported("kdb handles unit-weight graphs only"));
    }
    check_sizes(graph, &state.apsp, scores)?;
    let outcome = graph.apply_update(event)?;
    if outcome == UpdateOutcome::NoOp {
        return Ok(UpdateReport::noop(Engine::Kdb));
    }

    let n = graph.node_count();
    let mut ws = Workspace::new(n);
    let mut report = UpdateReport::noop(Engine::Kdb);
    report.outcome = outcome;
    let mut target_seen = vec![false; n];
    let (mut apsp_time, mut dep_time) = (Duration::ZERO, Duration::ZERO);

    for s in 0..n {
        let (du, dv) = (state.apsp.dist(s, event.u), state.apsp.dist(s, event.v));
        // `a` is the endpoint nearer to s; directed edges only run u -> v.
        let (da, db, a, b) = if !graph.is_directed() && dv < du {
            (dv, du, event.v, event.u)
        } else {
            (du, dv, event.u, event.v)
        };
        if !da.is_finite() || da >= db {
            continue;
        }

        let t0 = Instant::now();
        if db == da + 1.0 {
            add_paths(graph, state, s, a, b, &mut ws, apsp_tally);
        } else {
            repair_paths(graph, state, s, b, da + 1.0, &mut ws, apsp_tally);
        }
        let t1 = Instant::now();
        repair_dependencies(graph, state, scores, s, event, &mut ws, dep_tally);
        let t2 = Instant::now();
        apsp_time += t1 - t0;
        dep_time += t2 - t1;

        report.affected_sources += 1;
        report.affected_pairs += ws.touched.len();
        for &x in &ws.touched {
            target_seen[x] = true;
        }
    }
    report.affected_targets = target_seen.iter().filter(|&&x| x).count();
    report.apsp_time = apsp_time;
    report.dependency_time = dep_time;
    Ok(report)
}

/// New shortest paths of equal length: every node of the sub-DAG below `b`
/// gains `σ_sa · σ_bt` paths. Distances are unchanged.
fn add_paths<T: Tally>(
    graph: &Graph,
    state: &mut KdbState,
    s: NodeId,
    a: NodeId,
    b: NodeId,
    ws: &mut Workspace,
    tally: &mut T,
) {
    ws.begin();
    let epoch = ws.epoch;
    let apsp = &mut state.apsp;
    let extra = apsp.sigma(s, a);
    let visit = |ws: &mut Workspace, x: NodeId, d: f64| {
        ws.touched_mark[x] = epoch;
        ws.old_dist[x] = d;
        ws.touched.push(x);
        ws.queue.push_back(x);
    };
    visit(ws, b, apsp.dist(s, b));
    while let Some(x) = ws.queue.pop_front() {
        tally.visit();
        let dx = apsp.dist(s, x);
        // Row b cannot change through an edge that ends in b.
        let sigma = apsp.sigma(s, x) + extra * apsp.sigma(b, x);
        apsp.set(s, x, dx, sigma);
        let succ = graph.out_neighbors(x);
        tally.scan_edges(succ.len());
        for &(y, _) in succ {
            if ws.touched_mark[y] != epoch && apsp.dist(s, y) == dx + 1.0 {
                visit(ws, y, dx + 1.0);
            }
        }
    }
}

/// Shortcut: BFS from `b`, which now sits at `start_level`, enqueueing
/// every neighbor `y` of a dequeued `x` with `d(s, y) >= d'(s, x)`.
/// Distances become the minimum over in-neighbors plus one and path counts
/// the sum over new predecessors. Rewrites row `s` in place.
fn repair_paths<T: Tally>(
    graph: &Graph,
    state: &mut KdbState,
    s: NodeId,
    b: NodeId,
    start_level: f64,
    ws: &mut Workspace,
    tally: &mut T,
) {
    ws.begin();
    let epoch = ws.epoch;
    let apsp = &mut state.apsp;

    let enqueue = |ws: &mut Workspace, apsp: &mut ApspState, x: NodeId, level: f64| {
        ws.touched_mark[x] = epoch;
        ws.old_dist[x] = apsp.dist(s, x);
        ws.touched.push(x);
        let sigma = apsp.sigma(s, x);
        apsp.set(s, x, level, sigma);
        ws.queue.push_back(x);
    };
    enqueue(ws, apsp, b, start_level);

    // Nodes first reached at a lower level are dequeued first, so in-neighbors
    // one level up are final whenever a node's count can change. Nodes
    // reached sideways keep their distance and count.
    while let Some(x) = ws.queue.pop_front() {
        tally.visit();
        let level = apsp.dist(s, x);
        let preds = graph.in_neighbors(x);
        tally.scan_edges(preds.len());
        let sigma: f64 = preds
            .iter()
            .filter(|&&(y, _)| apsp.dist(s, y) + 1.0 == level)
            .map(|&(y, _)| apsp.sigma(s, y))
            .sum();
        apsp.set(s, x, level, sigma);

        let succ = graph.out_neighbors(x);
        tally.scan_edges(succ.len());
        for &(y, _) in succ {
            let dy = apsp.dist(s, y);
            if ws.touched_mark[y] != epoch && dy >= level {
                enqueue(ws, apsp, y, dy.min(level + 1.0));
            }
        }
    }
}

/// Recomputes `δ_s` on the touched nodes and all their ancestors in the old
/// or new DAG, deepest first, and moves `scores` by the differences.
fn repair_dependencies<T: Tally>(
    graph: &Graph,
    state: &mut KdbState,
    scores: &mut Betweenness,
    s: NodeId,
    event: &UpdateEvent,
    ws: &mut Workspace,
    tally: &mut T,
) {
    let epoch = ws.epoch;
    let n = state.n;
    let undirected = !graph.is_directed();
    let is_new_edge = |y: NodeId, x: NodeId| {
        (y == event.u && x == event.v) || (undirected && y == event.v && x == event.u)
    };

    ws.stack.clear();
    for i in 0..ws.touched.len() {
        let x = ws.touched[i];
        ws.region_mark[x] = epoch;
        ws.region.push(x);
        ws.stack.push(x);
    }
    while let Some(x) = ws.stack.pop() {
        tally.visit();
        let dx_new = state.apsp.dist(s, x);
        let dx_old = ws.old_dist(x, dx_new);
        let preds = graph.in_neighbors(x);
        tally.scan_edges(preds.len());
        for &(y, _) in preds {
            if ws.region_mark[y] == epoch {
                continue;
            }
            let dy_new = state.apsp.dist(s, y);
            let dy_old = ws.old_dist(y, dy_new);
            let new_pred = dx_new.is_finite() && dy_new + 1.0 == dx_new;
            let old_pred = dx_old.is_finite() && !is_new_edge(y, x) && dy_old + 1.0 == dx_old;
            if new_pred || old_pred {
                ws.region_mark[y] = epoch;
                ws.region.push(y);
                ws.stack.push(y);
            }
        }
    }

    let apsp = &state.apsp;
    ws.region
        .sort_unstable_by(|&x, &y| apsp.dist(s, y).total_cmp(&apsp.dist(s, x)));
    for i in 0..ws.region.len() {
        let x = ws.region[i];
        if x == s {
            continue;
        }
        tally.pq_extract();
        let dx = apsp.dist(s, x);
        if !dx.is_finite() {
            continue;
        }
        let sx = apsp.sigma(s, x);
        let succ = graph.out_neighbors(x);
        tally.scan_edges(succ.len());
        let mut dep = 0.0;
        for &(w, _) in succ {
            if apsp.dist(s, w) == dx + 1.0 {
                dep += sx / apsp.sigma(s, w) * (1.0 + state.deps[s * n + w]);
            }
        }
        let slot = &mut state.deps[s * n + x];
        scores.add(x, dep - *slot);
        *slot = dep;
    }
}
