use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QesError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("index error: row {row}, band {band} lies outside the {rows}x{cols} footprint")]
    Index {
        row: usize,
        band: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("length mismatch: expected {expected} coefficients, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("degenerate pivot U_{n} (|U_n| = {magnitude:e} relative to its row)")]
    DegeneratePivot { n: usize, magnitude: f64 },

    #[error("singular Jacobian (equilibrated condition number {condition:e})")]
    SingularJacobian { condition: f64 },

    #[error("no convergence after {iterations} iterations (last move {last_move:e})")]
    NoConvergence { iterations: usize, last_move: f64 },

    #[error("eigenvalue iteration failed to converge for a {size}x{size} matrix after {iterations} sweeps")]
    Eigen { size: usize, iterations: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = QesError> = std::result::Result<T, E>;
