use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::counters::PhaseCounters;
use crate::graph::UpdateOutcome;

/// The incremental engines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    Ibet,
    Kdb,
    Kwcc,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Ibet, Engine::Kdb, Engine::Kwcc];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Ibet => "ibet",
            Engine::Kdb => "kdb",
            Engine::Kwcc => "kwcc",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ibet" => Ok(Engine::Ibet),
            "kdb" => Ok(Engine::Kdb),
            "kwcc" => Ok(Engine::Kwcc),
            other => Err(format!("unknown engine {other:?} (expected ibet, kdb or kwcc)")),
        }
    }
}

/// Summary of one incremental update.
#[derive(Clone, Debug, PartialEq)]
pub struct UpdateReport {
    pub engine: Engine,
    pub outcome: UpdateOutcome,
    /// Sources whose shortest-path DAG was modified.
    pub affected_sources: usize,
    /// Distinct targets reached by the update (`|T(u)|` for iBet).
    pub affected_targets: usize,
    /// Ordered pairs whose distance or path count changed (KDB: nodes
    /// recomputed, summed over sources).
    pub affected_pairs: usize,
    pub apsp_time: Duration,
    pub dependency_time: Duration,
    pub counters: Option<PhaseCounters>,
}

impl UpdateReport {
    pub fn noop(engine: Engine) -> Self {
        Self {
            engine,
            outcome: UpdateOutcome::NoOp,
            affected_sources: 0,
            affected_targets: 0,
            affected_pairs: 0,
            apsp_time: Duration::ZERO,
            dependency_time: Duration::ZERO,
            counters: None,
        }
    }

    pub fn total_time(&self) -> Duration {
        self.apsp_time + self.dependency_time
    }
}
