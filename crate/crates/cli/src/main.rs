//! `ugcsp`: generate instances, solve them exactly, play pebble games and
//! run SDP relaxations. Exit codes: 0 ok, 1 usage/input error,
//! 2 precondition or budget failure, 3 strategy violation.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ugcsp_core::{AssertLevel, Error};

#[derive(Parser, Debug)]
#[command(name = "ugcsp", version, about = "Unique Games / CSP gap constructions, games and SDPs")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Leave the `timestamp` field out of JSON outputs.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Invariant checking inside Duplicator strategies.
    #[arg(long, global = true, value_enum, default_value_t = LevelArg::Edges)]
    pub assert_level: LevelArg,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum LevelArg {
    Off,
    Edges,
    Full,
}

impl From<LevelArg> for AssertLevel {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::Off => AssertLevel::Off,
            LevelArg::Edges => AssertLevel::Edges,
            LevelArg::Full => AssertLevel::Full,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build instances and graphs.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Write the label-lifted instance G(U).
    Lift {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 1 << 12)]
        max_vertices: u64,
    },
    /// Exact optimum of an instance file.
    Solve(SolveArgs),
    /// Play the bijective pebble game and write a transcript.
    Game(GameArgs),
    /// SDP relaxations.
    #[command(subcommand)]
    Sdp(SdpCommand),
    /// Parameter set for (α, γ, ε).
    Params {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        epsilon: f64,
        /// Print JSON instead of the one-line summary.
        #[arg(long)]
        json: bool,
    },
    /// Collect every JSON file of a run directory into one summary.
    Report {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum GenCommand {
    /// Complete-graph instance that is not δ-satisfiable.
    Unsat {
        #[arg(long)]
        delta: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Klein pair: base graph, U1, U2 and a JSON sidecar.
    Klein {
        /// Use the fixed K_4 colouring.
        #[arg(long, conflicts_with_all = ["cops_k", "graph"])]
        k4: bool,
        /// Use cops_robbers_graph(K).
        #[arg(long, conflicts_with = "graph")]
        cops_k: Option<usize>,
        /// A bipartite cubic graph file.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Graph file of cops_robbers_graph(k).
    CopsGraph {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random F_2^m pair over a regular base graph.
    RandomPair {
        #[arg(long, conflicts_with = "petersen")]
        graph: Option<PathBuf>,
        #[arg(long)]
        petersen: bool,
        #[arg(long)]
        ell: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        girth_override: bool,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SolverArg {
    Brute,
    Propagate,
    Tree,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(value_enum)]
    pub solver: SolverArg,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the witness as `assign` lines.
    #[arg(long)]
    pub witness: Option<PathBuf>,
    #[arg(long, default_value_t = 1 << 28)]
    pub budget: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DuplicatorArg {
    Identity,
    K2,
    Cops,
    Tree,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SpoilerArg {
    Random,
    Exhaustive,
}

#[derive(Args, Debug)]
pub struct GameArgs {
    #[arg(long, value_enum)]
    pub duplicator: DuplicatorArg,
    #[arg(long, value_enum, default_value_t = SpoilerArg::Random)]
    pub spoiler: SpoilerArg,
    /// Base instance for structure A (identity / k2).
    #[arg(long)]
    pub a: Option<PathBuf>,
    /// Base instance for structure B (identity / k2).
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// Sidecar written by `gen klein` (cops).
    #[arg(long)]
    pub klein: Option<PathBuf>,
    /// Sidecar written by `gen random-pair` (tree).
    #[arg(long)]
    pub pair: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 100)]
    pub rounds: usize,
    /// Search depth for the exhaustive Spoiler.
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    #[arg(long, default_value_t = 1 << 24)]
    pub budget: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum NormArg {
    Weight,
    Count,
}

#[derive(Args, Debug)]
pub struct SolverFlags {
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
}

#[derive(Subcommand, Debug)]
pub enum SdpCommand {
    /// MaxCut SDP with the GW estimate and hyperplane rounding.
    Maxcut {
        #[arg(long)]
        graph: PathBuf,
        /// Lines `<u> <v> <weight>`; unlisted edges weigh 1.
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[command(flatten)]
        solver: SolverFlags,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        sdpa: Option<PathBuf>,
    },
    /// LC relaxation of a CSP instance.
    Lc {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = NormArg::Weight)]
        normalize: NormArg,
        #[command(flatten)]
        solver: SolverFlags,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        sdpa: Option<PathBuf>,
    },
    /// Gap-curve table over a family of CSP files.
    Gap {
        #[arg(long, num_args = 1.., required = true)]
        family: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
        /// Comma-separated lookup points.
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
        grid: Vec<f64>,
        #[arg(long, value_enum, default_value_t = NormArg::Weight)]
        normalize: NormArg,
        #[command(flatten)]
        solver: SolverFlags,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Exit code for a failed run.
fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(commands::Violation(_)) = err.downcast_ref() {
        return 3;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::StrategyViolation { .. }) => 3,
        Some(
            Error::Precondition(_)
            | Error::SearchTooLarge(_)
            | Error::SizeLimit(_)
            | Error::Convergence { .. }
            | Error::NotInSpan,
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
