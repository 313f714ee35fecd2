//! Slow reference computations with no code shared with the engines.
//!
//! Distances come from Floyd-Warshall, path counts from a recurrence over
//! the last hop, and betweenness from the pair formula
//! `σ_st(v) = σ_sv σ_vt` whenever `d(s,v) + d(v,t) = d(s,t)`.
//! Cubic in time and quadratic in memory, so keep graphs small.

use std::collections::BTreeSet;

use crate::graph::{Graph, NodeId};

fn close(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Distances and path counts, indexed `[s][t]`.
#[derive(Clone, Debug)]
pub struct OracleApsp {
    pub dist: Vec<Vec<f64>>,
    pub sigma: Vec<Vec<f64>>,
}

pub fn oracle_apsp(graph: &Graph) -> OracleApsp {
    let n = graph.node_count();
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for (s, row) in dist.iter_mut().enumerate() {
        row[s] = 0.0;
        for &(t, w) in graph.out_neighbors(s) {
            row[t] = row[t].min(w);
        }
    }
    for k in 0..n {
        let through = dist[k].clone();
        for row in dist.iter_mut() {
            let dik = row[k];
            if !dik.is_finite() {
                continue;
            }
            for (cell, dkj) in row.iter_mut().zip(&through) {
                let via = dik + dkj;
                if via < *cell {
                    *cell = via;
                }
            }
        }
    }

    let mut sigma = vec![vec![0.0; n]; n];
    for s in 0..n {
        let mut order: Vec<NodeId> = (0..n).filter(|&t| dist[s][t].is_finite()).collect();
        order.sort_by(|&a, &b| dist[s][a].total_cmp(&dist[s][b]));
        sigma[s][s] = 1.0;
        for &t in order.iter().filter(|&&t| t != s) {
            let mut count = 0.0;
            for &(p, w) in graph.in_neighbors(t) {
                if close(dist[s][p] + w, dist[s][t]) {
                    count += sigma[s][p];
                }
            }
            sigma[s][t] = count;
        }
    }
    OracleApsp { dist, sigma }
}

/// Betweenness over ordered pairs, for directed and undirected graphs alike.
pub fn oracle_betweenness(graph: &Graph) -> Vec<f64> {
    let n = graph.node_count();
    let OracleApsp { dist, sigma } = oracle_apsp(graph);
    let mut scores = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t || !dist[s][t].is_finite() {
                continue;
            }
            for (v, score) in scores.iter_mut().enumerate() {
                if v != s && v != t && close(dist[s][v] + dist[v][t], dist[s][t]) {
                    *score += sigma[s][v] * sigma[v][t] / sigma[s][t];
                }
            }
        }
    }
    scores
}

/// `Σ_{t ∈ targets, t ≠ w} σ_st(w) / σ_st` for every node `w`, straight from
/// the pair formula; zero at `s`.
pub fn oracle_partial_dependency(apsp: &OracleApsp, s: NodeId, targets: &[NodeId]) -> Vec<f64> {
    let n = apsp.dist.len();
    let (dist, sigma) = (&apsp.dist, &apsp.sigma);
    let mut out = vec![0.0; n];
    for (w, slot) in out.iter_mut().enumerate() {
        if w == s {
            continue;
        }
        for &t in targets {
            if t != w && t != s && close(dist[s][w] + dist[w][t], dist[s][t]) {
                *slot += sigma[s][w] * sigma[w][t] / sigma[s][t];
            }
        }
    }
    out
}

/// Ordered pairs whose distance or path count differs between two graphs on
/// the same node set.
pub fn oracle_affected_pairs(before: &Graph, after: &Graph) -> BTreeSet<(NodeId, NodeId)> {
    assert_eq!(before.node_count(), after.node_count());
    let a = oracle_apsp(before);
    let b = oracle_apsp(after);
    let n = before.node_count();
    let mut pairs = BTreeSet::new();
    for s in 0..n {
        for t in 0..n {
            let (d0, d1) = (a.dist[s][t], b.dist[s][t]);
            let dist_changed = d0.is_finite() != d1.is_finite() || (d0.is_finite() && !close(d0, d1));
            if dist_changed || a.sigma[s][t] != b.sigma[s][t] {
                pairs.insert((s, t));
            }
        }
    }
    pairs
}
