//! `graphnash`: solve, enumerate, select, render and verify equilibria of
//! graphical games stored as JSON files.
//!
//! Results go to stdout (or `--out`), logs to stderr. Exit codes: 0 success,
//! 1 I/O failure, 2 unparsable input or bad arguments, 3 input that fails
//! validation, 4 solver precondition not met.

mod commands;
mod error;
mod gamefile;
mod output;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{
    EnumerateArgs, Engine, GenArgs, GraphKind, PolicyName, RenderArgs, RenderEngine, RenderFormat, SelectArgs,
    SolveArgs, VerifyArgs,
};
use error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "graphnash", version, about = "Nash equilibria of graphical games on trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute one equilibrium.
    Solve {
        file: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Engine::Approx)]
        engine: Engine,
        #[arg(long, default_value_t = 0)]
        root: usize,
        #[arg(long, value_enum, default_value_t = PolicyName::First)]
        policy: PolicyName,
        /// Seed for `--policy random`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Grid resolution override (testing only).
        #[arg(long)]
        grid_m: Option<usize>,
        /// Round decimal payoffs to fractions with at most this denominator
        /// before running the exact engine.
        #[arg(long, value_name = "DENOMINATOR")]
        rationalize: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List every grid equilibrium the tables represent, in lexicographic
    /// order.
    Enumerate {
        file: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
        #[arg(long)]
        grid_m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        root: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Best grid equilibrium for an objective.
    Select {
        file: PathBuf,
        /// `social`, `welfare` or `player:<id>`.
        #[arg(long)]
        objective: String,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        root: usize,
        #[arg(long)]
        grid_m: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a vertex's table over (child value, own value).
    RenderTable {
        file: PathBuf,
        #[arg(long)]
        vertex: usize,
        #[arg(long, value_enum, default_value_t = RenderEngine::Both)]
        engine: RenderEngine,
        #[arg(long, default_value_t = 0)]
        root: usize,
        /// Slack of the approximate table; defaults to the rounding bound.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 32)]
        grid_m: usize,
        #[arg(long, value_enum, default_value_t = RenderFormat::Txt)]
        format: RenderFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report per-player regrets of a profile.
    Verify {
        file: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a random game file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        actions: usize,
        #[arg(long, value_enum, default_value_t = GraphKind::Tree)]
        graph: GraphKind,
        /// Edges added on top of the spanning tree for `--graph random`.
        #[arg(long, default_value_t = 1)]
        extra: usize,
        /// Make payoffs exact multiples of 1/DENOMINATOR.
        #[arg(long)]
        denominator: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Solve { file, eps, engine, root, policy, seed, grid_m, rationalize, out } => {
            commands::solve(&SolveArgs { file, eps, engine, root, policy, seed, grid_m, rationalize, out })
        }
        Command::Enumerate { file, eps, limit, grid_m, root, out } => {
            commands::enumerate(&EnumerateArgs { file, eps, limit, grid_m, root, out })
        }
        Command::Select { file, objective, eps, root, grid_m, out } => {
            commands::select(&SelectArgs { file, objective, eps, root, grid_m, out })
        }
        Command::RenderTable { file, vertex, engine, root, eps, grid_m, format, out } => {
            commands::render_table(&RenderArgs { file, vertex, engine, root, eps_local: eps, grid_m, format, out })
        }
        Command::Verify { file, profile, eps, out } => commands::verify(&VerifyArgs { file, profile, eps, out }),
        Command::Gen { n, max_degree, seed, actions, graph, extra, denominator, out } => {
            commands::gen(&GenArgs { n, max_degree, seed, actions, graph, extra, denominator, out })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
