use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),

    #[error("expected a {expected}x{expected} matrix, got {got}x{got}")]
    UnexpectedDimension { expected: usize, got: usize },

    #[error("dimension {0} is not a power of two")]
    NotQubitDimension(usize),

    #[error("entry count {entries} does not form a square matrix")]
    NotSquare { entries: usize },

    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("not Hermitian: max asymmetry {asymmetry:.3e} exceeds tolerance {tol:.1e}")]
    NotHermitian { asymmetry: f64, tol: f64 },

    #[error("trace is not 1: |Tr - 1| = {deviation:.3e} exceeds tolerance {tol:.1e}")]
    InvalidTrace { deviation: f64, tol: f64 },

    #[error("not positive semidefinite: minimum eigenvalue {min_eigenvalue:.3e} below -{tol:.1e}")]
    NotPositive { min_eigenvalue: f64, tol: f64 },

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("site {site} out of range for {qubits} qubit(s)")]
    SiteOutOfRange { site: usize, qubits: usize },

    #[error("invalid map parameters (alpha = {alpha}, beta = {beta}): {reason}")]
    InvalidMapParams {
        alpha: f64,
        beta: f64,
        reason: &'static str,
    },

    #[error("trace-term constant c = {0} must be finite and non-negative")]
    InvalidTraceConstant(f64),

    #[error("negative rate at t = {t}: {name} = {value}")]
    NegativeRate {
        t: f64,
        name: &'static str,
        value: f64,
    },

    #[error("time must be non-negative and finite, got {0}")]
    InvalidTime(f64),

    #[error("{name} = {value} outside [0, 1]")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("invalid rate descriptor `{descriptor}`: {reason}")]
    RateDescriptor { descriptor: String, reason: String },

    #[error("invalid rate table: {0}")]
    RateTable(String),

    #[error("malformed state file: {0}")]
    StateFormat(String),

    #[error("trajectory aborted at t = {t}: {source}")]
    TrajectoryStep {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
