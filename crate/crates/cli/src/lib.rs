//! Experiment harness: remove a random edge, build the state for the
//! reduced graph, put the edge back with each engine and time it.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use ibet_core::baselines::{kdb_update, kdb_update_counted, kwcc_update, kwcc_update_counted};
use ibet_core::{
    brandes_betweenness, brandes_betweenness_timed, ibet_update, ibet_update_counted,
    init_apsp_with_scores, ApspState, Betweenness, Engine, EngineError, Graph, GraphError,
    KdbState, NodeId, OpCounters, PhaseCounters, UpdateEvent, UpdateReport,
};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Environment variable holding the memory budget, in bytes, for the
/// quadratic state.
pub const MEMORY_CAP_VAR: &str = "IBET_MEMORY_CAP";
pub const DEFAULT_MEMORY_CAP: u128 = 4 << 30;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{nodes}-node graph needs about {needed} bytes of state, over the {cap} byte cap (set {MEMORY_CAP_VAR} to raise it)")]
    Capacity { nodes: usize, needed: u128, cap: u128 },
    #[error("asked for {trials} trials but the graph has only {edges} edges")]
    TooFewEdges { trials: usize, edges: usize },
    #[error("{0}")]
    Config(String),
}

/// Something that can be timed in a trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algo {
    /// Full recomputation on the updated graph.
    Static,
    Incremental(Engine),
}

impl Algo {
    pub const ALL: [Algo; 4] = [
        Algo::Static,
        Algo::Incremental(Engine::Ibet),
        Algo::Incremental(Engine::Kdb),
        Algo::Incremental(Engine::Kwcc),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Static => "ba",
            Algo::Incremental(e) => e.name(),
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ba" | "brandes" | "static" => Ok(Algo::Static),
            other => other.parse().map(Algo::Incremental),
        }
    }
}

/// Parses a comma-separated algorithm list, dropping duplicates.
pub fn parse_algos(list: &str) -> Result<Vec<Algo>, String> {
    let mut algos: Vec<Algo> = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let a: Algo = part.parse()?;
        if !algos.contains(&a) {
            algos.push(a);
        }
    }
    if algos.is_empty() {
        return Err("empty algorithm list".into());
    }
    Ok(algos)
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub seed: u64,
    pub algos: Vec<Algo>,
    /// Compare every result with a fresh static computation.
    pub verify: bool,
    /// Record operation counters (adds a little time to each update).
    pub counters: bool,
    /// Largest accepted per-node error, relative to `max(1, |reference|)`.
    pub tolerance: f64,
    /// Memory budget; `None` reads [`MEMORY_CAP_VAR`].
    pub memory_cap: Option<u128>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 0,
            algos: Algo::ALL.to_vec(),
            verify: true,
            counters: false,
            tolerance: 1e-8,
            memory_cap: None,
        }
    }
}

/// One timed run inside a trial.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgoRun {
    pub algo: Algo,
    pub apsp_ns: u64,
    pub dependency_ns: u64,
    pub total_ns: u64,
    /// `None` when verification is off.
    pub max_err: Option<f64>,
    pub counters: Option<PhaseCounters>,
    pub affected_pairs: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub edge: (NodeId, NodeId, f64),
    pub runs: Vec<AlgoRun>,
}

impl TrialRecord {
    pub fn run(&self, algo: Algo) -> Option<&AlgoRun> {
        self.runs.iter().find(|r| r.algo == algo)
    }

    pub fn max_err(&self) -> f64 {
        self.runs
            .iter()
            .filter_map(|r| r.max_err)
            .fold(0.0, f64::max)
    }
}

/// Geometric-mean speedup of `fast` over `slow`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Speedup {
    pub slow: Algo,
    pub fast: Algo,
    pub geomean: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub trials: usize,
    pub max_err: Option<f64>,
    pub speedups: Vec<Speedup>,
}

impl Summary {
    pub fn speedup(&self, fast: Algo, slow: Algo) -> Option<f64> {
        self.speedups
            .iter()
            .find(|s| s.fast == fast && s.slow == slow)
            .map(|s| s.geomean)
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "trials: {}", self.trials)?;
        if let Some(e) = self.max_err {
            writeln!(f, "max error: {e:e}")?;
        }
        for s in &self.speedups {
            writeln!(f, "speedup {} over {}: {:.2}x (geometric mean)", s.fast, s.slow, s.geomean)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

impl Experiment {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.records.iter().all(|r| r.max_err() <= tolerance)
    }
}

/// `exp(mean(ln x))`; nonpositive inputs are not expected.
pub fn geometric_mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, count) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, c), x| (s + x.ln(), c + 1));
    if count == 0 {
        f64::NAN
    } else {
        (sum / count as f64).exp()
    }
}

/// Speedup of `fast` over `slow` in one trial; a zero reading counts as 1 ns.
pub fn trial_speedup(slow_ns: u64, fast_ns: u64) -> f64 {
    slow_ns.max(1) as f64 / fast_ns.max(1) as f64
}

/// Bytes of quadratic state the harness holds at once for `algos`.
pub fn required_bytes(n: usize, algos: &[Algo]) -> u128 {
    let kdb = algos.contains(&Algo::Incremental(Engine::Kdb));
    let base = if kdb { KdbState::bytes_for(n) } else { ApspState::bytes_for(n) };
    // The base state plus one working copy.
    2 * base
}

fn memory_cap(config: &ExperimentConfig) -> Result<u128, HarnessError> {
    if let Some(cap) = config.memory_cap {
        return Ok(cap);
    }
    match std::env::var(MEMORY_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| HarnessError::Config(format!("{MEMORY_CAP_VAR}={v:?} is not a byte count"))),
        Err(_) => Ok(DEFAULT_MEMORY_CAP),
    }
}

/// Fails with a capacity error if the quadratic state would not fit.
pub fn check_capacity(n: usize, algos: &[Algo], config: &ExperimentConfig) -> Result<(), HarnessError> {
    let cap = memory_cap(config)?;
    let needed = required_bytes(n, algos);
    if needed > cap {
        return Err(HarnessError::Capacity { nodes: n, needed, cap });
    }
    Ok(())
}

/// `trials` distinct edges, uniformly at random.
pub fn sample_edges(graph: &Graph, trials: usize, seed: u64) -> Result<Vec<(NodeId, NodeId, f64)>, HarnessError> {
    let edges = graph.edges();
    if trials > edges.len() {
        return Err(HarnessError::TooFewEdges { trials, edges: edges.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(index::sample(&mut rng, edges.len(), trials)
        .into_iter()
        .map(|i| edges[i])
        .collect())
}

fn score_error(got: &Betweenness, reference: &Betweenness) -> f64 {
    got.as_slice()
        .iter()
        .zip(reference.as_slice())
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max)
}

enum Base {
    Apsp(ApspState, Betweenness),
    Kdb(KdbState, Betweenness),
}

impl Base {
    fn apsp(&self) -> (&ApspState, &Betweenness) {
        match self {
            Base::Apsp(a, s) => (a, s),
            Base::Kdb(k, s) => (&k.apsp, s),
        }
    }
}

fn run_engine(
    engine: Engine,
    reduced: &Graph,
    base: &Base,
    event: &UpdateEvent,
    counters: bool,
) -> Result<(UpdateReport, Betweenness, u64), HarnessError> {
    let mut graph = reduced.clone();
    let (report, scores, elapsed) = match engine {
        Engine::Kdb => {
            let Base::Kdb(state, scores) = base else {
                return Err(EngineError::Unsupported("kdb handles unit-weight graphs only").into());
            };
            let (mut state, mut scores) = (state.clone(), scores.clone());
            let start = Instant::now();
            let r = if counters {
                kdb_update_counted(&mut graph, &mut state, &mut scores, event)?
            } else {
                kdb_update(&mut graph, &mut state, &mut scores, event)?
            };
            (r, scores, start.elapsed())
        }
        Engine::Ibet | Engine::Kwcc => {
            let (apsp, scores) = base.apsp();
            let (mut apsp, mut scores) = (apsp.clone(), scores.clone());
            let start = Instant::now();
            let r = match (engine, counters) {
                (Engine::Ibet, true) => {
                    ibet_update_counted(&mut graph, &mut apsp, &mut scores, event)?.0
                }
                (Engine::Ibet, false) => ibet_update(&mut graph, &mut apsp, &mut scores, event)?,
                (_, true) => kwcc_update_counted(&mut graph, &mut apsp, &mut scores, event)?,
                (_, false) => kwcc_update(&mut graph, &mut apsp, &mut scores, event)?,
            };
            (r, scores, start.elapsed())
        }
    };
    Ok((report, scores, elapsed.as_nanos() as u64))
}

/// Runs the protocol on `graph`: for each trial, remove a sampled edge,
/// build the state, then re-insert the edge with every selected engine on
/// its own copy of that state.
pub fn run_experiment(graph: &Graph, config: &ExperimentConfig) -> Result<Experiment, HarnessError> {
    if config.trials == 0 {
        return Err(HarnessError::Config("trials must be at least 1".into()));
    }
    if config.algos.is_empty() {
        return Err(HarnessError::Config("no algorithms selected".into()));
    }
    let use_kdb = config.algos.contains(&Algo::Incremental(Engine::Kdb));
    if use_kdb && !graph.is_unit() {
        return Err(EngineError::Unsupported("kdb handles unit-weight graphs only").into());
    }
    check_capacity(graph.node_count(), &config.algos, config)?;

    let edges = sample_edges(graph, config.trials, config.seed)?;
    let reference = config.verify.then(|| brandes_betweenness(graph));
    let mut records = Vec::with_capacity(edges.len());

    for (trial, &(u, v, w)) in edges.iter().enumerate() {
        let mut reduced = graph.clone();
        reduced.remove_edge(u, v)?;
        let event = UpdateEvent::new(u, v, w);
        let base = if use_kdb {
            let (state, scores) = KdbState::build(&reduced)?;
            Base::Kdb(state, scores)
        } else {
            let (apsp, scores) = init_apsp_with_scores(&reduced);
            Base::Apsp(apsp, scores)
        };

        let mut runs = Vec::with_capacity(config.algos.len());
        for &algo in &config.algos {
            let run = match algo {
                Algo::Static => {
                    let start = Instant::now();
                    let (scores, search, dep) = brandes_betweenness_timed(graph);
                    let total = start.elapsed().as_nanos() as u64;
                    AlgoRun {
                        algo,
                        apsp_ns: search.as_nanos() as u64,
                        dependency_ns: dep.as_nanos() as u64,
                        total_ns: total,
                        max_err: reference.as_ref().map(|r| score_error(&scores, r)),
                        counters: config.counters.then(PhaseCounters::default),
                        affected_pairs: 0,
                    }
                }
                Algo::Incremental(engine) => {
                    let (report, scores, total) =
                        run_engine(engine, &reduced, &base, &event, config.counters)?;
                    AlgoRun {
                        algo,
                        apsp_ns: report.apsp_time.as_nanos() as u64,
                        dependency_ns: report.dependency_time.as_nanos() as u64,
                        total_ns: total,
                        max_err: reference.as_ref().map(|r| score_error(&scores, r)),
                        counters: report.counters,
                        affected_pairs: report.affected_pairs,
                    }
                }
            };
            runs.push(run);
        }
        drop(base);
        records.push(TrialRecord {
            trial,
            edge: (u, v, w),
            runs,
        });
    }

    let summary = summarize(&records, &config.algos);
    Ok(Experiment { records, summary })
}

/// Geometric-mean speedups of every engine over the static baseline and
/// of iBet over each other engine.
pub fn summarize(records: &[TrialRecord], algos: &[Algo]) -> Summary {
    let mut pairs = Vec::new();
    if algos.contains(&Algo::Static) {
        for &a in algos.iter().filter(|&&a| a != Algo::Static) {
            pairs.push((Algo::Static, a));
        }
    }
    let ibet = Algo::Incremental(Engine::Ibet);
    if algos.contains(&ibet) {
        for &a in algos.iter().filter(|&&a| matches!(a, Algo::Incremental(e) if e != Engine::Ibet)) {
            pairs.push((a, ibet));
        }
    }
    let speedups = pairs
        .into_iter()
        .map(|(slow, fast)| Speedup {
            slow,
            fast,
            geomean: geometric_mean(records.iter().filter_map(|r| {
                Some(trial_speedup(r.run(slow)?.total_ns, r.run(fast)?.total_ns))
            })),
        })
        .collect();
    let verified = records.iter().flat_map(|r| &r.runs).any(|r| r.max_err.is_some());
    Summary {
        trials: records.len(),
        max_err: verified.then(|| records.iter().map(TrialRecord::max_err).fold(0.0, f64::max)),
        speedups,
    }
}

pub const CSV_HEADER: [&str; 9] = [
    "trial",
    "algo",
    "phase_apsp_ns",
    "phase_dep_ns",
    "total_ns",
    "max_err",
    "nodes_visited",
    "edges_scanned",
    "source_list_scans",
];

/// Columns holding wall-clock readings.
pub const TIMING_COLUMNS: [&str; 3] = ["phase_apsp_ns", "phase_dep_ns", "total_ns"];

/// Writes one row per trial and algorithm. Unmeasured fields are empty.
pub fn write_csv<W: std::io::Write>(records: &[TrialRecord], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        for run in &r.runs {
            let c: Option<OpCounters> = run.counters.map(|c| c.combined());
            let opt = |x: Option<u64>| x.map(|x| x.to_string()).unwrap_or_default();
            w.write_record([
                r.trial.to_string(),
                run.algo.to_string(),
                run.apsp_ns.to_string(),
                run.dependency_ns.to_string(),
                run.total_ns.to_string(),
                run.max_err.map(|e| e.to_string()).unwrap_or_default(),
                opt(c.map(|c| c.nodes_visited)),
                opt(c.map(|c| c.edges_scanned)),
                opt(c.map(|c| c.source_list_scans)),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[TrialRecord], path: &Path) -> Result<(), HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::Config("no records to write".into()));
    }
    write_csv(records, std::fs::File::create(path)?)
}

/// Writes static scores as `node,label,betweenness`.
pub fn write_scores_csv<W: std::io::Write>(graph: &Graph, scores: &Betweenness, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "label", "betweenness"])?;
    for (x, s) in scores.as_slice().iter().enumerate() {
        w.write_record([x.to_string(), graph.label(x), s.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ibet_core::gen;

    fn config(trials: usize, algos: &[Algo]) -> ExperimentConfig {
        ExperimentConfig {
            trials,
            seed: 7,
            algos: algos.to_vec(),
            counters: true,
            memory_cap: Some(DEFAULT_MEMORY_CAP),
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn single_trial_on_path() {
        let exp = run_experiment(&gen::path(4), &config(1, &[Algo::Incremental(Engine::Ibet)])).unwrap();
        assert_eq!(exp.records.len(), 1);
        assert_eq!(exp.records[0].max_err(), 0.0);
        assert!(exp.summary.speedups.is_empty());
    }

    #[test]
    fn all_engines_agree_with_static() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = gen::gnp(&mut rng, 30, 0.15, ibet_core::Directedness::Undirected, ibet_core::Weighting::Unit);
        let exp = run_experiment(&g, &config(10, &Algo::ALL)).unwrap();
        assert!(exp.passed(1e-8));
        assert_eq!(exp.summary.speedups.len(), 5);
        assert!(exp.summary.speedups.iter().all(|s| s.geomean > 0.0));
    }

    #[test]
    fn sampling_is_distinct_and_deterministic() {
        let g = gen::grid(5, 5);
        let a = sample_edges(&g, 40, 9).unwrap();
        assert_eq!(a, sample_edges(&g, 40, 9).unwrap());
        let mut keys: Vec<_> = a.iter().map(|e| (e.0, e.1)).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), 40);
        assert!(matches!(sample_edges(&g, 41, 9), Err(HarnessError::TooFewEdges { .. })));
    }

    #[test]
    fn capacity_guard_fires_before_allocation() {
        let g = Graph::undirected_unit(1 << 20);
        let mut c = config(1, &[Algo::Incremental(Engine::Ibet)]);
        c.memory_cap = Some(1 << 30);
        assert!(matches!(run_experiment(&g, &c), Err(HarnessError::Capacity { .. })));
    }

    #[test]
    fn kdb_rejects_weighted_graphs() {
        let g = Graph::from_edges(
            2,
            ibet_core::Directedness::Undirected,
            ibet_core::Weighting::Weighted,
            [(0, 1, 2.0)],
        )
        .unwrap();
        assert!(run_experiment(&g, &config(1, &Algo::ALL)).is_err());
    }

    #[test]
    fn csv_has_header_plus_one_row() {
        let exp = run_experiment(&gen::path(4), &config(1, &[Algo::Incremental(Engine::Ibet)])).unwrap();
        let mut buf = Vec::new();
        write_csv(&exp.records, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    }

    #[test]
    fn csv_round_trips_numbers() {
        let exp = run_experiment(&gen::grid(4, 4), &config(5, &Algo::ALL)).unwrap();
        let mut buf = Vec::new();
        write_csv(&exp.records, &mut buf).unwrap();
        let mut rd = csv::Reader::from_reader(buf.as_slice());
        let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
        let runs: Vec<(&TrialRecord, &AlgoRun)> =
            exp.records.iter().flat_map(|r| r.runs.iter().map(move |x| (r, x))).collect();
        assert_eq!(rows.len(), runs.len());
        for (row, (rec, run)) in rows.iter().zip(runs) {
            assert_eq!(row[0].parse::<usize>().unwrap(), rec.trial);
            assert_eq!(row[1].parse::<Algo>().unwrap(), run.algo);
            assert_eq!(row[2].parse::<u64>().unwrap(), run.apsp_ns);
            assert_eq!(row[3].parse::<u64>().unwrap(), run.dependency_ns);
            assert_eq!(row[4].parse::<u64>().unwrap(), run.total_ns);
            assert_eq!(row[5].parse::<f64>().unwrap(), run.max_err.unwrap());
            let c = run.counters.unwrap().combined();
            assert_eq!(row[6].parse::<u64>().unwrap(), c.nodes_visited);
            assert_eq!(row[7].parse::<u64>().unwrap(), c.edges_scanned);
            assert_eq!(row[8].parse::<u64>().unwrap(), c.source_list_scans);
        }
    }

    #[test]
    fn summary_geomean_matches_csv_rows() {
        let exp = run_experiment(&gen::grid(4, 4), &config(6, &Algo::ALL)).unwrap();
        let mut buf = Vec::new();
        write_csv(&exp.records, &mut buf).unwrap();
        let mut rd = csv::Reader::from_reader(buf.as_slice());
        let mut ba = Vec::new();
        let mut ib = Vec::new();
        for row in rd.records().map(Result::unwrap) {
            let ns: u64 = row[4].parse().unwrap();
            match &row[1] {
                "ba" => ba.push(ns),
                "ibet" => ib.push(ns),
                _ => {}
            }
        }
        let logs: Vec<f64> = ba.iter().zip(&ib).map(|(&b, &i)| (b.max(1) as f64 / i.max(1) as f64).ln()).collect();
        let from_csv = (logs.iter().sum::<f64>() / logs.len() as f64).exp();
        let summary = exp.summary.speedup(Algo::Incremental(Engine::Ibet), Algo::Static).unwrap();
        assert!((from_csv - summary).abs() <= 1e-12 * summary);
    }

    #[test]
    fn geometric_mean_basics() {
        assert!((geometric_mean([2.0, 8.0]) - 4.0).abs() < 1e-12);
        assert!(geometric_mean([]).is_nan());
    }

    #[test]
    fn algo_names_parse() {
        assert_eq!(parse_algos("ibet, KDB,kwcc,ba,ibet").unwrap().len(), 4);
        assert!(parse_algos("ibet,foo").is_err());
        assert!(parse_algos("").is_err());
    }
}
