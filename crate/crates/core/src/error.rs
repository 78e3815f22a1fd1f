//! Error type shared by all modules in the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix expected to be positive semi-definite has a significantly
    /// negative eigenvalue.
    #[error("matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    /// The eigensolver failed to reduce the off-diagonal mass below
    /// tolerance within the sweep cap.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:.3e})")]
    EigenFailure { sweeps: usize, residual: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid cost vector: {0}")]
    InvalidCostVector(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid guess order: {0}")]
    InvalidOrder(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("unknown letter '{0}'")]
    UnknownLetter(String),

    /// Raised when an infinite tail cost would enter a cost operator.
    /// A finite value in that regime requires a POVM whose outcomes never
    /// assign weight to letters outside their own guess order
    /// (tr[E_g rho_x] = 0 whenever x is not listed in g); this library does
    /// not decide whether such a POVM exists and supports only the cases
    /// K = |X| or finite tail cost.
    #[error("infinite tail cost with K={k} < |X|={letters}: {context}")]
    InfiniteCost {
        k: usize,
        letters: usize,
        context: String,
    },

    /// Problem too large for an exhaustive build.
    #[error("problem size {actual} exceeds cap {cap}; use the active-set upper bound for large instances")]
    SizeCapExceeded { actual: u128, cap: u128 },

    #[error("invalid conic problem: {0}")]
    InvalidProblem(String),

    /// The iterative solver hit its iteration cap. The best iterate found
    /// is attached.
    #[error("solver reached max iterations ({iterations}) with residuals (primal {primal_residual:.3e}, dual {dual_residual:.3e}, gap {gap:.3e})")]
    SolverStalled {
        iterations: usize,
        primal_residual: f64,
        dual_residual: f64,
        gap: f64,
        best: Box<crate::sdp::ConicSolution>,
    },

    /// Wall-clock budget exhausted before any useful work was possible.
    #[error("time budget {budget:.1}s exhausted: {context}")]
    BudgetExhausted { budget: f64, context: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
