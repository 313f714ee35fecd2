//! Exact incremental betweenness centrality.
//!
//! The static engine ([`brandes_betweenness`]) computes scores from scratch.
//! [`ibet_update`] keeps an augmented all-pairs state ([`ApspState`]) and the
//! scores current under edge insertions and weight decreases, touching only
//! the affected sources and targets. [`baselines`] holds two other
//! incremental engines for comparison, and [`oracle`] slow reference
//! computations for testing.

pub mod apsp;
pub mod baselines;
pub mod brandes;
pub mod counters;
pub mod error;
pub mod gen;
pub mod graph;
pub mod ibet;
pub mod oracle;
pub mod report;
pub mod tol;

pub use apsp::{commit, init_apsp, init_apsp_with_scores, AffectedDelta, ApspState, StagedPair};
pub use baselines::{kdb_update, kwcc_update, KdbState};
pub use brandes::{
    accumulate_dependencies, brandes_betweenness, brandes_betweenness_timed, sssp_augmented,
    Betweenness, SsspResult,
};
pub use counters::{check_bounds, BoundsVerdict, NoTally, OpCounters, PhaseCounters, Tally};
pub use error::{EngineError, GraphError};
pub use graph::{
    load_edge_list, Directedness, Graph, NodeId, UpdateEvent, UpdateOutcome, Weighting,
};
pub use ibet::{apsp_update, ibet_update, ibet_update_counted, ibet_update_with};
pub use report::{Engine, UpdateReport};
