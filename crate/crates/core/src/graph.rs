//! Mutable weighted graph with in/out adjacency, incremental mutation and
//! edge-list ingestion.
//!
//! Undirected graphs store every edge in both orientations; their in-adjacency
//! is the out-adjacency itself, so only one list per node is kept.

use std::collections::HashMap;
use std::io::BufRead;

use crate::error::GraphError;

/// Dense node identifier in `0..node_count`.
pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Directedness {
    Directed,
    Undirected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Weighting {
    /// Every edge has weight 1.0; engines may use BFS and bucket lists.
    Unit,
    /// Arbitrary strictly positive finite weights.
    Weighted,
}

/// An edge insertion or weight decrease `(u, v, new_weight)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpdateEvent {
    pub u: NodeId,
    pub v: NodeId,
    pub new_weight: f64,
}

impl UpdateEvent {
    pub fn new(u: NodeId, v: NodeId, new_weight: f64) -> Self {
        Self { u, v, new_weight }
    }

    /// Unit-weight insertion of `(u, v)`.
    pub fn unit(u: NodeId, v: NodeId) -> Self {
        Self::new(u, v, 1.0)
    }
}

/// What [`Graph::apply_update`] did to the adjacency structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UpdateOutcome {
    Inserted,
    Decreased,
    NoOp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    directedness: Directedness,
    weighting: Weighting,
    out_adj: Vec<Vec<(NodeId, f64)>>,
    // Empty for undirected graphs.
    in_adj: Vec<Vec<(NodeId, f64)>>,
    edge_count: usize,
    labels: Option<Vec<String>>,
}

impl Graph {
    pub fn new(node_count: usize, directedness: Directedness, weighting: Weighting) -> Self {
        let in_adj = match directedness {
            Directedness::Directed => vec![Vec::new(); node_count],
            Directedness::Undirected => Vec::new(),
        };
        Self {
            directedness,
            weighting,
            out_adj: vec![Vec::new(); node_count],
            in_adj,
            edge_count: 0,
            labels: None,
        }
    }

    pub fn undirected_unit(node_count: usize) -> Self {
        Self::new(node_count, Directedness::Undirected, Weighting::Unit)
    }

    pub fn directed_unit(node_count: usize) -> Self {
        Self::new(node_count, Directedness::Directed, Weighting::Unit)
    }

    /// Builds a graph from `(u, v, w)` triples, collapsing parallel edges to
    /// the minimum weight and dropping self-loops.
    pub fn from_edges(
        node_count: usize,
        directedness: Directedness,
        weighting: Weighting,
        edges: impl IntoIterator<Item = (NodeId, NodeId, f64)>,
    ) -> Result<Self, GraphError> {
        let mut g = Self::new(node_count, directedness, weighting);
        for (u, v, w) in edges {
            g.check_node(u)?;
            g.check_node(v)?;
            if u == v {
                continue;
            }
            let w = g.normalize_weight(w)?;
            g.insert_or_min(u, v, w);
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.out_adj.len()
    }

    /// Number of edges; undirected edges are counted once.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn directedness(&self) -> Directedness {
        self.directedness
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    pub fn is_directed(&self) -> bool {
        self.directedness == Directedness::Directed
    }

    pub fn is_unit(&self) -> bool {
        self.weighting == Weighting::Unit
    }

    pub fn out_neighbors(&self, x: NodeId) -> &[(NodeId, f64)] {
        &self.out_adj[x]
    }

    pub fn in_neighbors(&self, x: NodeId) -> &[(NodeId, f64)] {
        match self.directedness {
            Directedness::Directed => &self.in_adj[x],
            Directedness::Undirected => &self.out_adj[x],
        }
    }

    /// Edges incident to `x` counted once per endpoint: the degree for
    /// undirected graphs, in-degree plus out-degree for directed ones.
    pub fn incident_edge_count(&self, x: NodeId) -> usize {
        match self.directedness {
            Directedness::Directed => self.out_adj[x].len() + self.in_adj[x].len(),
            Directedness::Undirected => self.out_adj[x].len(),
        }
    }

    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        self.out_adj
            .get(u)?
            .iter()
            .find(|&&(x, _)| x == v)
            .map(|&(_, w)| w)
    }

    /// All edges; undirected edges are reported once with `u < v`.
    pub fn edges(&self) -> Vec<(NodeId, NodeId, f64)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, adj) in self.out_adj.iter().enumerate() {
            for &(v, w) in adj {
                if self.is_directed() || u < v {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Original label of `x`, falling back to its dense id.
    pub fn label(&self, x: NodeId) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    /// Appends an isolated node and returns its id.
    pub fn add_node(&mut self) -> NodeId {
        self.out_adj.push(Vec::new());
        if self.is_directed() {
            self.in_adj.push(Vec::new());
        }
        if let Some(l) = &mut self.labels {
            l.push((self.out_adj.len() - 1).to_string());
        }
        self.out_adj.len() - 1
    }

    /// Checks an event against the incremental-only contract without mutating.
    pub fn validate_update(&self, event: &UpdateEvent) -> Result<UpdateOutcome, GraphError> {
        let UpdateEvent { u, v, new_weight } = *event;
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let new_weight = self.normalize_weight(new_weight)?;
        match self.edge_weight(u, v) {
            None => Ok(UpdateOutcome::Inserted),
            Some(old) if new_weight < old => Ok(UpdateOutcome::Decreased),
            Some(old) if new_weight == old => Ok(UpdateOutcome::NoOp),
            Some(old) => Err(GraphError::WeightIncrease {
                u,
                v,
                old,
                new: new_weight,
            }),
        }
    }

    /// Inserts `(u, v)` or lowers its weight. Undirected graphs mutate both
    /// orientations.
    pub fn apply_update(&mut self, event: &UpdateEvent) -> Result<UpdateOutcome, GraphError> {
        let outcome = self.validate_update(event)?;
        let UpdateEvent { u, v, new_weight } = *event;
        match outcome {
            UpdateOutcome::Inserted => self.push_edge(u, v, new_weight),
            UpdateOutcome::Decreased => self.set_weight(u, v, new_weight),
            UpdateOutcome::NoOp => {}
        }
        Ok(outcome)
    }

    /// Removes `(u, v)` (both orientations if undirected) and returns its weight.
    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> Result<f64, GraphError> {
        self.check_node(u)?;
        self.check_node(v)?;
        let w = self
            .edge_weight(u, v)
            .ok_or(GraphError::EdgeNotFound { u, v })?;
        remove_from(&mut self.out_adj[u], v);
        match self.directedness {
            Directedness::Directed => remove_from(&mut self.in_adj[v], u),
            Directedness::Undirected => remove_from(&mut self.out_adj[v], u),
        }
        self.edge_count -= 1;
        Ok(w)
    }

    fn check_node(&self, x: NodeId) -> Result<(), GraphError> {
        if x < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange {
                node: x,
                node_count: self.node_count(),
            })
        }
    }

    fn normalize_weight(&self, w: f64) -> Result<f64, GraphError> {
        if !(w.is_finite() && w > 0.0) {
            return Err(GraphError::NonPositiveWeight(w));
        }
        match self.weighting {
            Weighting::Weighted => Ok(w),
            Weighting::Unit if w == 1.0 => Ok(w),
            Weighting::Unit => Err(GraphError::NonUnitWeight(w)),
        }
    }

    fn insert_or_min(&mut self, u: NodeId, v: NodeId, w: f64) {
        match self.edge_weight(u, v) {
            None => self.push_edge(u, v, w),
            Some(old) if w < old => self.set_weight(u, v, w),
            Some(_) => {}
        }
    }

    fn push_edge(&mut self, u: NodeId, v: NodeId, w: f64) {
        self.out_adj[u].push((v, w));
        match self.directedness {
            Directedness::Directed => self.in_adj[v].push((u, w)),
            Directedness::Undirected => self.out_adj[v].push((u, w)),
        }
        self.edge_count += 1;
    }

    fn set_weight(&mut self, u: NodeId, v: NodeId, w: f64) {
        set_in(&mut self.out_adj[u], v, w);
        match self.directedness {
            Directedness::Directed => set_in(&mut self.in_adj[v], u, w),
            Directedness::Undirected => set_in(&mut self.out_adj[v], u, w),
        }
    }
}

fn remove_from(adj: &mut Vec<(NodeId, f64)>, target: NodeId) {
    if let Some(pos) = adj.iter().position(|&(x, _)| x == target) {
        adj.swap_remove(pos);
    }
}

fn set_in(adj: &mut [(NodeId, f64)], target: NodeId, w: f64) {
    if let Some(e) = adj.iter_mut().find(|e| e.0 == target) {
        e.1 = w;
    }
}

/// Reads a whitespace-separated edge list (`u v` or `u v w` per line).
///
/// Lines starting with `#` or `%` are comments. Node labels are compacted to
/// `0..n` in order of first appearance and kept as the graph's labels.
/// For unit-weight graphs the third column, if any, is ignored; for weighted
/// graphs a missing weight defaults to 1.0. Columns past the third are ignored
/// (KONECT files carry timestamps there).
pub fn load_edge_list<R: BufRead>(
    reader: R,
    directedness: Directedness,
    weighting: Weighting,
) -> Result<Graph, GraphError> {
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges: Vec<(NodeId, NodeId, f64)> = Vec::new();

    let mut intern = |tok: &str| -> NodeId {
        if let Some(&id) = ids.get(tok) {
            return id;
        }
        let id = labels.len();
        labels.push(tok.to_owned());
        ids.insert(tok.to_owned(), id);
        id
    };

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let (a, b) = match (toks.next(), toks.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(GraphError::Parse {
                    line: line_no,
                    message: format!("expected `u v [w]`, got {trimmed:?}"),
                })
            }
        };
        let w = match (weighting, toks.next()) {
            (Weighting::Unit, _) | (Weighting::Weighted, None) => 1.0,
            (Weighting::Weighted, Some(tok)) => {
                let w: f64 = tok.parse().map_err(|_| GraphError::Parse {
                    line: line_no,
                    message: format!("invalid weight {tok:?}"),
                })?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(GraphError::Domain {
                        line: line_no,
                        weight: w,
                    });
                }
                w
            }
        };
        let u = intern(a);
        let v = intern(b);
        if u != v {
            edges.push((u, v, w));
        }
    }

    let mut g = Graph::from_edges(labels.len(), directedness, weighting, edges)?;
    g.labels = Some(labels);
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(
            3,
            Directedness::Undirected,
            Weighting::Unit,
            [(0, 1, 1.0), (1, 2, 1.0)],
        )
        .unwrap()
    }

    fn transpose_consistent(g: &Graph) -> bool {
        (0..g.node_count()).all(|x| {
            g.out_neighbors(x)
                .iter()
                .all(|&(y, w)| g.in_neighbors(y).contains(&(x, w)))
                && g.in_neighbors(x)
                    .iter()
                    .all(|&(y, w)| g.out_neighbors(y).contains(&(x, w)))
        })
    }

    #[test]
    fn load_two_edge_path() {
        let g = load_edge_list("0 1\n1 2\n".as_bytes(), Directedness::Undirected, Weighting::Unit)
            .unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge_weight(1, 0), Some(1.0));
        assert_eq!(g.edge_weight(2, 1), Some(1.0));
        assert!(transpose_consistent(&g));
    }

    #[test]
    fn load_empty_stream() {
        let g = load_edge_list("".as_bytes(), Directedness::Directed, Weighting::Unit).unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn load_collapses_parallel_edges_to_min() {
        let g = load_edge_list(
            "0 1 2.5\n0 1 1.5\n".as_bytes(),
            Directedness::Directed,
            Weighting::Weighted,
        )
        .unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight(0, 1), Some(1.5));
        assert_eq!(g.in_neighbors(1), &[(0, 1.5)]);
    }

    #[test]
    fn load_compacts_labels_and_skips_comments() {
        let text = "% konect header\n# snap header\n10 30\n30 20\n\n20 20\n";
        let g = load_edge_list(text.as_bytes(), Directedness::Directed, Weighting::Unit).unwrap();
        assert_eq!(g.labels().unwrap(), &["10", "30", "20"]);
        assert_eq!(g.edges(), vec![(0, 1, 1.0), (1, 2, 1.0)]);
    }

    #[test]
    fn load_reports_line_numbers() {
        let err = load_edge_list("0 1\n7\n".as_bytes(), Directedness::Directed, Weighting::Unit)
            .unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }), "{err}");

        let err = load_edge_list(
            "0 1 1\n1 2 -3\n".as_bytes(),
            Directedness::Directed,
            Weighting::Weighted,
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::Domain { line: 2, .. }), "{err}");

        let err = load_edge_list(
            "0 1 abc\n".as_bytes(),
            Directedness::Directed,
            Weighting::Weighted,
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn load_is_deterministic() {
        let text = "a b\nc a\nb d\nd c\n";
        let g1 = load_edge_list(text.as_bytes(), Directedness::Undirected, Weighting::Unit).unwrap();
        let g2 = load_edge_list(text.as_bytes(), Directedness::Undirected, Weighting::Unit).unwrap();
        assert_eq!(g1, g2);
    }

    #[test]
    fn apply_update_outcomes() {
        let mut g = path3();
        assert_eq!(
            g.apply_update(&UpdateEvent::unit(0, 2)).unwrap(),
            UpdateOutcome::Inserted
        );
        assert_eq!(g.edge_count(), 3);
        assert_eq!(
            g.apply_update(&UpdateEvent::unit(0, 1)).unwrap(),
            UpdateOutcome::NoOp
        );

        let mut w = Graph::from_edges(
            2,
            Directedness::Undirected,
            Weighting::Weighted,
            [(0, 1, 3.0)],
        )
        .unwrap();
        assert_eq!(
            w.apply_update(&UpdateEvent::new(0, 1, 1.0)).unwrap(),
            UpdateOutcome::Decreased
        );
        assert_eq!(w.edge_weight(1, 0), Some(1.0));
        assert!(matches!(
            w.apply_update(&UpdateEvent::new(1, 0, 2.0)),
            Err(GraphError::WeightIncrease { .. })
        ));
    }

    #[test]
    fn apply_update_rejects_bad_events() {
        let mut g = path3();
        assert!(matches!(
            g.apply_update(&UpdateEvent::unit(1, 1)),
            Err(GraphError::SelfLoop(1))
        ));
        assert!(matches!(
            g.apply_update(&UpdateEvent::unit(0, 9)),
            Err(GraphError::NodeOutOfRange { .. })
        ));
        assert!(matches!(
            g.apply_update(&UpdateEvent::new(0, 2, 2.0)),
            Err(GraphError::NonUnitWeight(_))
        ));
        let mut d = Graph::new(2, Directedness::Directed, Weighting::Weighted);
        assert!(matches!(
            d.apply_update(&UpdateEvent::new(0, 1, 0.0)),
            Err(GraphError::NonPositiveWeight(_))
        ));
    }

    #[test]
    fn remove_edge_cases() {
        let mut g = path3();
        assert_eq!(g.remove_edge(0, 1).unwrap(), 1.0);
        assert_eq!(g.edge_count(), 1);
        assert!(g.in_neighbors(1).iter().all(|&(x, _)| x != 0));
        assert!(matches!(
            path3().remove_edge(0, 2),
            Err(GraphError::EdgeNotFound { u: 0, v: 2 })
        ));
    }

    #[test]
    fn remove_then_reinsert_is_identity_up_to_order() {
        let original = path3();
        let mut g = original.clone();
        let w = g.remove_edge(0, 1).unwrap();
        g.apply_update(&UpdateEvent::new(0, 1, w)).unwrap();
        let mut a = original.edges();
        let mut b = g.edges();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(a, b);
        assert!(transpose_consistent(&g));
    }

    #[test]
    fn directed_transpose_tracks_mutation() {
        let mut g = Graph::new(3, Directedness::Directed, Weighting::Weighted);
        g.apply_update(&UpdateEvent::new(0, 1, 2.0)).unwrap();
        g.apply_update(&UpdateEvent::new(2, 1, 1.0)).unwrap();
        g.apply_update(&UpdateEvent::new(0, 1, 0.5)).unwrap();
        assert!(transpose_consistent(&g));
        assert_eq!(g.in_neighbors(1).len(), 2);
        assert_eq!(g.edge_weight(1, 0), None);
        g.remove_edge(0, 1).unwrap();
        assert!(transpose_consistent(&g));
        assert_eq!(g.incident_edge_count(1), 1);
    }
}
