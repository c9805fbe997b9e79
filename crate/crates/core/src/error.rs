use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the evaluators and the zero/pole engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of the function (e.g. `Im τ ≤ 0`).
    #[error("domain error: {0}")]
    Domain(String),
    /// A series, product or lattice sum did not reach its tolerance.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// Evaluation requested at (or numerically on top of) a pole.
    #[error("pole at {at}: {what}")]
    Pole { at: Complex64, what: String },
    /// An iterative solver ran out of iterations.
    #[error("no convergence after {iterations} iterations: {what}")]
    NonConvergence { iterations: usize, what: String },
    /// Quadrature around a cell did not settle, even after re-jittering.
    #[error("singularity on or near integration boundary: {0}")]
    BoundarySingularity(String),
    /// The argument-principle integral was not close to an integer.
    #[error("winding number {value} is not close to an integer")]
    NonIntegerWinding { value: f64 },
    /// Numerical differentiation disagreed with its own Richardson step.
    #[error("numerical instability: {0}")]
    Instability(String),
    /// Phase unwrapping failed along a sample path.
    #[error("branch tracking failed: {0}")]
    BranchTracking(String),
    /// Least-squares design matrix is (numerically) rank deficient.
    #[error("rank-deficient fit: {0}")]
    RankDeficient(String),
    /// Invalid configuration or constructor argument.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
