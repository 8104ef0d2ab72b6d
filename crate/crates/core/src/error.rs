use thiserror::Error;

use crate::game::Violation;

/// Errors produced by the solvers and their supporting machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid player {player} (game has {n} players)")]
    InvalidPlayer { player: usize, n: usize },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid epsilon {0}: must be finite and positive")]
    InvalidEpsilon(f64),

    #[error("game graph is not a tree")]
    NotATree,

    #[error("game graph is disconnected")]
    Disconnected,

    #[error("game failed validation: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("unsatisfiable parameters: {0}")]
    Unsatisfiable(String),

    #[error("no equilibrium found: root table is empty")]
    NoEquilibriumFound,

    #[error("exact solver requires rational payoffs for every player")]
    NonRationalPayoffs,

    #[error("enumeration of {size} items exceeds the limit of {limit}")]
    SizeGuard { size: u128, limit: u128 },

    #[error("quotient graph of the clustering is not a tree: {0}")]
    QuotientNotTree(String),

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("tables were computed without witness retention")]
    MissingWitnesses,

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, SolverError>;
