use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Majorana index set: {0}")]
    InvalidIndices(String),
    #[error("locality {0} is odd; an even number of Majorana operators is required")]
    OddLocality(usize),
    #[error("brickwork circuits need an even number of qubits, got {0}")]
    OddQubitCount(usize),
    #[error("qubit count mismatch: expected {expected}, got {got}")]
    QubitMismatch { expected: usize, got: usize },
    #[error("matrix is not orthogonal (max deviation {0:.3e})")]
    NotOrthogonal(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("observable has no terms")]
    EmptyObservable,
    #[error("{0} qubits exceeds the dense-simulation limit of {max}", max = crate::statevector::MAX_DENSE_QUBITS)]
    TooManyQubits(usize),
    #[error("shadow eigenvalue for {set} is {alpha:e}; the term cannot be estimated at depth {depth}")]
    Unestimable { set: String, alpha: f64, depth: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
