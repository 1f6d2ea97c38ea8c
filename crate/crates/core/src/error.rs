use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error(
        "series did not reach tolerance {abs_tol:e} within {max_terms} terms (tail bound {tail:e})"
    )]
    NonConvergent {
        abs_tol: f64,
        max_terms: usize,
        tail: f64,
    },

    #[error("kernel k_{{{d},{m}}} is singular at xi = {xi}")]
    SingularPoint { d: usize, m: usize, xi: f64 },

    #[error("tail of the majorant series is unbounded for d = {d}, m = {m} (requires 2m > d - 1)")]
    Unbounded { d: usize, m: usize },

    #[error("no closed form for (d, m, ell) = ({d}, {m}, {ell})")]
    NotInCatalog { d: usize, m: usize, ell: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("operator T_lambda needs lambda > 0 (d >= 3), got d = {0}")]
    DegenerateLambda(usize),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("kernel k_{{{d},{m}}} is infinite on the diagonal; fitting needs 2m >= d")]
    SingularKernelDiagonal { d: usize, m: usize },

    #[error("points are not unisolvent for the trend space (rank {rank} < {q})")]
    NotUnisolvent { rank: usize, q: usize },

    #[error("saddle-point system is singular (reciprocal condition estimate {rcond:e})")]
    SingularSystem { rcond: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("points {i} and {j} coincide (chordal distance {dist:e})")]
    DuplicatePoints { i: usize, j: usize, dist: f64 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("{0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::Io(_)
            | Error::DimensionMismatch { .. }
            | Error::DuplicatePoints { .. } => 3,
            Error::Domain(_)
            | Error::Unsupported(_)
            | Error::NotInCatalog { .. }
            | Error::InvalidProblem(_) => 2,
            _ => 4,
        }
    }
}
