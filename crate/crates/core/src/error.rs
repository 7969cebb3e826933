use thiserror::Error;

use crate::instance::ObjectiveMode;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("player {player} is outside 1..={n}")]
    InvalidSelection { player: usize, n: usize },

    #[error("invalid instance: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),

    #[error("infeasible configuration: {0}")]
    InfeasibleConfig(String),

    #[error("instance has {n} players, above the brute-force cap of {cap}; use a polynomial solver (mincut, laminar, treedp) or export the LP")]
    SizeLimit { n: usize, cap: usize },

    #[error("solver expects {expected} mode, instance is {found}")]
    WrongMode {
        expected: ObjectiveMode,
        found: ObjectiveMode,
    },

    #[error("set family is not laminar: {0}")]
    NotLaminar(String),

    #[error("duplicate {kind} set {members:?}")]
    DuplicateSet { kind: &'static str, members: Vec<usize> },

    #[error("unsupported instance shape: {0}")]
    Shape(String),

    #[error("invalid tree decomposition: {}", .0.join("; "))]
    Decomposition(Vec<String>),

    #[error("structural error: {0}")]
    Structure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("LP solver failed: {0}")]
    Solver(String),

    #[error("not reproducible at this scale: {0}")]
    NotReproducible(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
