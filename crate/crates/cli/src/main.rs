//! `ulam`: solve, tabulate, verify and certify Renyi-Ulam liar games.
//!
//! Exit codes: 0 success, 1 failed check, 2 flag error, 3 budget or capacity,
//! 4 policy refused, 5 no winning strategy.

mod commands;
mod play;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ulam_core::{Error, GameVariant, StateVector};

pub const EXIT_FAILED: u8 = 1;
pub const EXIT_FLAGS: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_REFUSED: u8 = 4;
pub const EXIT_NO_STRATEGY: u8 = 5;

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Parser)]
#[command(name = "ulam", version, about = "Exact solver and covering toolkit for Renyi-Ulam liar games")]
pub struct Cli {
    /// Worker threads; 0 uses every core. ULAM_THREADS takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Question budget for the exact solver.
    #[arg(long, global = true, default_value_t = ulam_core::solver::DEFAULT_QUESTION_BUDGET)]
    pub budget: u64,
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Variant {
    Pathological,
    Original,
}

impl From<Variant> for GameVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Pathological => GameVariant::Pathological,
            Variant::Original => GameVariant::Original,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableMode {
    Formula,
    Dp,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyKind {
    OneLie,
    TwoLie,
}

/// A position: state vector, rounds, and the redundant lie count.
#[derive(Debug, Args)]
pub struct Position {
    #[arg(long, value_enum, default_value = "pathological")]
    pub variant: Variant,
    /// Comma-separated counts x0,x1,...,xk.
    #[arg(long, value_parser = parse_state)]
    pub state: StateVector,
    #[arg(long)]
    pub rounds: u32,
    /// Must equal the state length minus one when given.
    #[arg(long)]
    pub lies: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide who wins a position.
    Solve {
        #[command(flatten)]
        pos: Position,
        /// Write Paul's strategy tree here when Paul wins.
        #[arg(long)]
        tree: Option<std::path::PathBuf>,
        /// Memo file loaded before solving (if present) and rewritten after.
        #[arg(long)]
        cache: Option<std::path::PathBuf>,
    },
    /// Print F*_k(q) for q = 1..max-rounds.
    Table {
        #[arg(long)]
        lies: usize,
        #[arg(long)]
        max_rounds: u32,
        #[arg(long, value_enum, default_value = "formula")]
        mode: TableMode,
        /// Append the sphere bound and the gap to every row.
        #[arg(long)]
        bounds: bool,
    },
    /// Replay a constructive policy against every answer sequence.
    VerifyPolicy {
        #[arg(long, value_enum)]
        kind: PolicyKind,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        rounds: u32,
        /// Losing branches listed at most.
        #[arg(long, default_value_t = 32)]
        failure_cap: usize,
    },
    /// Build a quasiball covering (or packing) from Paul's strategy.
    Cover {
        #[command(flatten)]
        pos: Position,
        /// Certificate output path; the report is printed either way.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Parse and validate a certificate file.
    CheckCover { path: std::path::PathBuf },
    /// Play Carole against the engine on standard input.
    Play {
        #[command(flatten)]
        pos: Position,
    },
    /// Simulate fictitious play for a two-lie position.
    Fictitious {
        /// State with weight exactly 2^rounds; drawn at random when omitted.
        #[arg(long, value_parser = parse_state)]
        state: Option<StateVector>,
        #[arg(long)]
        rounds: u32,
        /// Branches explored exhaustively, or sampled beyond that.
        #[arg(long, default_value_t = 100_000)]
        branches: u64,
    },
    /// Dump or load the solver memo.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    /// Solve a position and write the resulting memo.
    Dump {
        #[command(flatten)]
        pos: Position,
        #[arg(long)]
        out: std::path::PathBuf,
    },
    /// Check a memo file and report its size.
    Load {
        #[arg(long, value_enum, default_value = "pathological")]
        variant: Variant,
        #[arg(long)]
        lies: usize,
        path: std::path::PathBuf,
    },
}

fn parse_state(s: &str) -> Result<StateVector, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failed command: the message goes to stderr and `code` is the exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Capacity(_) | Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::Parse(_) | Error::Shape { .. } => EXIT_FLAGS,
            _ => EXIT_FAILED,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_FAILED, e.to_string())
    }
}

fn threads(flag: usize) -> Result<usize, Failure> {
    let n = match std::env::var("ULAM_THREADS") {
        Ok(v) => v
            .parse()
            .map_err(|_| Failure::new(EXIT_FLAGS, format!("ULAM_THREADS={v:?} is not a thread count")))?,
        Err(_) => flag,
    };
    Ok(match n {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads(cli.threads).and_then(|t| commands::run(&cli, t));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
