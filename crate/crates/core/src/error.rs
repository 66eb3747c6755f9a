use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("instance too large: {what} is {size}, limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("Hamiltonian has no terms")]
    EmptyHamiltonian,
    #[error("circuit has no gates")]
    EmptyCircuit,
    #[error("term acts on {support} qubits, at most {limit} supported")]
    TermTooLarge { support: usize, limit: usize },
    #[error("state is not an eigenvector (residual {residual:.3e})")]
    NotEigenvector { residual: f64 },
    #[error("distributions use different metrics")]
    MetricMismatch,
    #[error("oracle failure: {0}")]
    OracleFailure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }
}
