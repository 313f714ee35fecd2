//! Small graph generators for tests, examples and benchmarks.

use rand::Rng;

use crate::graph::{Directedness, Graph, NodeId, UpdateEvent, Weighting};

/// Undirected unit-weight path `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> Graph {
    let edges = (1..n).map(|i| (i - 1, i, 1.0));
    Graph::from_edges(n, Directedness::Undirected, Weighting::Unit, edges).unwrap()
}

/// Undirected unit-weight cycle on `n >= 3` nodes.
pub fn cycle(n: usize) -> Graph {
    let edges = (0..n).map(|i| (i, (i + 1) % n, 1.0));
    Graph::from_edges(n, Directedness::Undirected, Weighting::Unit, edges).unwrap()
}

/// Undirected star: center 0 with leaves `1..=leaves`.
pub fn star(leaves: usize) -> Graph {
    let edges = (1..=leaves).map(|i| (0, i, 1.0));
    Graph::from_edges(leaves + 1, Directedness::Undirected, Weighting::Unit, edges).unwrap()
}

/// Undirected `w x h` grid, row-major ids.
pub fn grid(w: usize, h: usize) -> Graph {
    let mut edges = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let x = r * w + c;
            if c + 1 < w {
                edges.push((x, x + 1, 1.0));
            }
            if r + 1 < h {
                edges.push((x, x + w, 1.0));
            }
        }
    }
    Graph::from_edges(w * h, Directedness::Undirected, Weighting::Unit, edges).unwrap()
}

/// Random edge weight: half the time a small integer (to exercise ties),
/// otherwise a real in `[0.5, 4)`.
pub fn random_weight<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.5) {
        rng.gen_range(1..=4) as f64
    } else {
        rng.gen_range(0.5..4.0)
    }
}

/// Erdős–Rényi graph: each ordered (directed) or unordered pair is an edge
/// with probability `p`.
pub fn gnp<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    p: f64,
    directedness: Directedness,
    weighting: Weighting,
) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            let keep = match directedness {
                Directedness::Directed => u != v,
                Directedness::Undirected => u < v,
            };
            if keep && rng.gen_bool(p) {
                let w = match weighting {
                    Weighting::Unit => 1.0,
                    Weighting::Weighted => random_weight(rng),
                };
                edges.push((u, v, w));
            }
        }
    }
    Graph::from_edges(n, directedness, weighting, edges).unwrap()
}

/// A random incremental event: usually an insertion between two
/// non-adjacent nodes; on weighted graphs sometimes a weight decrease of an
/// existing edge. Returns `None` if no event is possible.
pub fn random_event<R: Rng + ?Sized>(rng: &mut R, graph: &Graph) -> Option<UpdateEvent> {
    let n = graph.node_count();
    if n < 2 {
        return None;
    }
    let weighted = !graph.is_unit();
    if weighted && graph.edge_count() > 0 && rng.gen_bool(0.3) {
        let edges = graph.edges();
        let (u, v, w) = edges[rng.gen_range(0..edges.len())];
        let new_weight = if rng.gen_bool(0.5) && w > 1.0 {
            (w - 1.0).max(0.5).floor().max(0.5)
        } else {
            w * rng.gen_range(0.2..0.9)
        };
        if new_weight < w {
            return Some(UpdateEvent::new(u, v, new_weight));
        }
    }
    let free: Vec<(NodeId, NodeId)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| {
            u != v && (graph.is_directed() || u < v) && graph.edge_weight(u, v).is_none()
        })
        .collect();
    if free.is_empty() {
        return None;
    }
    let (u, v) = free[rng.gen_range(0..free.len())];
    let (u, v) = if !graph.is_directed() && rng.gen_bool(0.5) { (v, u) } else { (u, v) };
    let w = if weighted { random_weight(rng) } else { 1.0 };
    Some(UpdateEvent::new(u, v, w))
}
