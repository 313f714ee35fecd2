use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ibet_cli::{
    check_capacity, emit_csv, parse_algos, run_experiment, write_scores_csv, Algo, ExperimentConfig,
    HarnessError,
};
use ibet_core::{brandes_betweenness, load_edge_list, Directedness, Graph, Weighting};

#[derive(Parser)]
#[command(name = "ibet", version, about = "Exact incremental betweenness centrality")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Static betweenness of every node.
    Compute {
        #[command(flatten)]
        graph: GraphArgs,
        /// Output CSV (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Timed re-insertion trials.
    Bench {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        trials: TrialArgs,
        /// Skip the comparison with a fresh static computation.
        #[arg(long)]
        no_verify: bool,
        /// Record operation counters.
        #[arg(long)]
        counters: bool,
        /// Output CSV (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-insertion trials checked against static recomputation; exits
    /// nonzero on any mismatch.
    Verify {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        trials: TrialArgs,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list, one `u v [w]` per line.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    weighted: bool,
}

#[derive(Args)]
struct TrialArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated subset of ba, ibet, kdb, kwcc.
    #[arg(long, default_value = "ba,ibet,kdb,kwcc")]
    algos: String,
}

impl TrialArgs {
    fn algos(&self) -> Result<Vec<Algo>, HarnessError> {
        parse_algos(&self.algos).map_err(HarnessError::Config)
    }
}

impl GraphArgs {
    fn load(&self) -> Result<Graph, HarnessError> {
        let file = File::open(&self.graph)?;
        let dir = if self.directed { Directedness::Directed } else { Directedness::Undirected };
        let wt = if self.weighted { Weighting::Weighted } else { Weighting::Unit };
        Ok(load_edge_list(BufReader::new(file), dir, wt)?)
    }
}

fn output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Compute { graph, out } => {
            let g = graph.load()?;
            check_capacity(g.node_count(), &[], &ExperimentConfig::default())?;
            let scores = brandes_betweenness(&g);
            write_scores_csv(&g, &scores, output(&out)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { graph, trials, no_verify, counters, out } => {
            let g = graph.load()?;
            let config = ExperimentConfig {
                algos: trials.algos()?,
                trials: trials.trials,
                seed: trials.seed,
                verify: !no_verify,
                counters,
                ..ExperimentConfig::default()
            };
            let exp = run_experiment(&g, &config)?;
            match &out {
                Some(p) => emit_csv(&exp.records, p)?,
                None => ibet_cli::write_csv(&exp.records, io::stdout().lock())?,
            }
            eprint!("{}", exp.summary);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { graph, trials, tolerance } => {
            let g = graph.load()?;
            let config = ExperimentConfig {
                algos: trials.algos()?,
                trials: trials.trials,
                seed: trials.seed,
                tolerance,
                ..ExperimentConfig::default()
            };
            let exp = run_experiment(&g, &config)?;
            let bad: Vec<_> = exp.records.iter().filter(|r| r.max_err() > tolerance).collect();
            for r in &bad {
                eprintln!("trial {} edge ({}, {}): error {:e}", r.trial, r.edge.0, r.edge.1, r.max_err());
            }
            if bad.is_empty() {
                println!("ok: {} trials within {tolerance:e}", exp.records.len());
                Ok(ExitCode::SUCCESS)
            } else {
                println!("FAILED: {} of {} trials", bad.len(), exp.records.len());
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
