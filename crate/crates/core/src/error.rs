use std::path::PathBuf;

/// Errors raised across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("points {0} and {1} coincide within the merge tolerance")]
    DuplicatePoint(usize, usize),
    #[error("degenerate simplex: {0}")]
    Degenerate(String),
    #[error("refinement exceeded {0} insertions")]
    RefinementLimit(usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("enumeration budget exceeded: {candidates} candidates > limit {limit}")]
    SizeLimit { candidates: u128, limit: u128 },
    #[error("({0}, {1}) is not an edge of any simplex")]
    NotAnEdge(usize, usize),
    #[error("no biclique exists: graph has no positive-weight edge")]
    Infeasible,
    #[error("no cutting line produced a candidate biclique")]
    NoCandidate,
    #[error("incomplete disjunction spec: {0}")]
    SpecIncomplete(String),
    #[error("no admissible simplex ordering for the incremental model: {0}")]
    OrderingUnavailable(String),
    #[error("model has {0} binaries; verification supports at most {1}")]
    TooManyBinaries(usize, usize),
    #[error("mesh does not cover the operating domain: {0}")]
    DomainMismatch(String),
    #[error("solver command not found: {0}")]
    SolverNotFound(String),
    #[error("solution failed local validation: {0}")]
    ValidationFailed(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("fitting stopped after {} iterations above the tolerance", .0.report.records.len())]
    MaxIterExceeded(Box<crate::fitting::FitResult>),
    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
