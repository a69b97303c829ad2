use thiserror::Error;

/// Errors raised anywhere in the correction-function pipeline.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid orbital: {0}")]
    InvalidSpec(String),

    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("quadrature did not converge at p = {p}: estimated relative error {estimate:.3e}")]
    QuadratureFailure { p: f64, estimate: f64 },

    #[error(
        "boundary condition undefined: zeta_min^2 - E + E0 = {discriminant:.6e} < 0 (E guess above threshold)"
    )]
    BoundaryCondition { discriminant: f64 },

    #[error("boundary iteration did not converge after {iterations} iterations (last |dE| = {last_delta:.3e})")]
    NoConvergence {
        iterations: usize,
        last_delta: f64,
        trace: Vec<f64>,
    },

    #[error("eigensolver failure: {0}")]
    Solver(String),

    #[error("optimizer exceeded {evaluations} evaluations (best E = {best_energy:.8} at zeta = ({best_zeta1:.6}, {best_zeta2:.6}))")]
    Optimization {
        evaluations: usize,
        best_zeta1: f64,
        best_zeta2: f64,
        best_energy: f64,
    },

    #[error("degenerate configuration: particles {0} and {1} coincide")]
    DegenerateConfiguration(usize, usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
