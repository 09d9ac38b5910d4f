//! Error type shared by all modules of the crate.

use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by schedule decoding, predictor training, search and
/// the toy laboratory.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Tensor/vector dimensions do not line up.
    Shape(String),
    /// An operation was called in a state where it is not meaningful.
    State(String),
    /// A scalar argument is outside its mathematical domain.
    Domain(String),
    /// A schedule violates the constraints of its space or zoo.
    InvalidSchedule(String),
    /// Invalid configuration value.
    Config(String),
    /// The budget cannot be met by any nonempty schedule.
    InfeasibleBudget(String),
    /// A ranking pair violates the required quality ordering.
    PairSelection(String),
    /// The training loss became non-finite.
    TrainingDiverged { epoch: usize },
    /// Brute-force enumeration refused: the space is too large.
    SpaceTooLarge { size: String, limit: u64 },
    /// A persisted artifact does not match the current zoo.
    IncompatibleCheckpoint(String),
    /// Malformed persisted data.
    Parse { line: usize, message: String },
    /// Underlying I/O failure.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape(m) => write!(f, "shape error: {m}"),
            Error::State(m) => write!(f, "state error: {m}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::InvalidSchedule(m) => write!(f, "invalid schedule: {m}"),
            Error::Config(m) => write!(f, "config error: {m}"),
            Error::InfeasibleBudget(m) => write!(f, "infeasible budget: {m}"),
            Error::PairSelection(m) => write!(f, "pair selection error: {m}"),
            Error::TrainingDiverged { epoch } => {
                write!(f, "training diverged: non-finite loss at epoch {epoch}")
            }
            Error::SpaceTooLarge { size, limit } => {
                write!(f, "search space too large: {size} schedules (limit {limit})")
            }
            Error::IncompatibleCheckpoint(m) => write!(f, "incompatible checkpoint: {m}"),
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
