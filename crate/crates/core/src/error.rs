use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the admissible parameter domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Mesh or grid parameters are invalid.
    #[error("invalid grading: {0}")]
    InvalidGrading(String),

    /// An iterative solver did not converge.
    #[error("no convergence in {solver} after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// A linear system was (numerically) singular.
    #[error("singular system: {0}")]
    Singular(String),

    /// The solution the spectral routine relies on does not have Morse index one.
    #[error("Morse index precondition violated: {0}")]
    MorsePrecondition(String),

    /// The radial shooting solver could not bracket or reach a profile.
    #[error("shooting failed: {0}")]
    Shooting(String),

    /// Not enough samples or dynamic range to fit a decay exponent.
    #[error("decay fit rejected: {0}")]
    DecayFit(String),

    /// Mode cutoff too small to cover every contributing angular mode.
    #[error("k_max = {k_max} is too small, need at least {required}")]
    ModeCutoff { k_max: usize, required: usize },

    /// Array sizes do not match.
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    /// A conservation bound or invariant was violated.
    #[error("bound violated: {0}")]
    Bound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
