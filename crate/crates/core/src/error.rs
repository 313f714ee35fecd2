use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: edge weight {weight} is not strictly positive")]
    Domain { line: usize, weight: f64 },
    #[error("node {node} out of range (graph has {node_count} nodes)")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("edge weight {0} is not a finite positive number")]
    NonPositiveWeight(f64),
    #[error("unit-weight graph cannot hold weight {0}")]
    NonUnitWeight(f64),
    #[error("edge ({u}, {v}) weight would increase from {old} to {new}; only incremental updates are supported")]
    WeightIncrease { u: NodeId, v: NodeId, old: f64, new: f64 },
    #[error("edge ({u}, {v}) not found")]
    EdgeNotFound { u: NodeId, v: NodeId },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0}")]
    Unsupported(&'static str),
    #[error("state has {state} nodes but graph has {graph}")]
    SizeMismatch { state: usize, graph: usize },
}
