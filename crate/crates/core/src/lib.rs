//! Guesswork with quantum side information.
//!
//! Computes the minimum expected number of sequential "is X = x?" queries
//! needed to identify a classical letter when the guesser holds a correlated
//! quantum system, together with the measurement strategies that attain it
//! and entropic bounds that bracket it.
//!
//! The main entry points:
//!
//! - [`ensemble::CqEnsemble`] / [`ensemble::CostVector`] describe a problem
//!   instance (letter probabilities, side-information states, guess costs).
//! - [`solver::solve_primal`] computes the value exactly as a semi-definite
//!   program over guess orders; [`solver::solve_dual`] solves the dual, and
//!   [`solver::verify_optimality`] checks the certificate `Y <= R_g`.
//! - [`active_set::active_set_upper_bound`] grows a working set of dual
//!   constraints with simulated annealing, giving anytime upper bounds on
//!   instances far beyond exhaustive reach.
//! - [`strategy`] compiles an optimal one-shot measurement into a sequential
//!   (guess-by-guess) protocol and back.
//! - [`entropic`] hosts Renyi / Arikan / Pliam / Massey bounds and the
//!   imperfect-key certificate.
//! - [`io`] parses and writes the JSON instance documents used by the CLI
//!   and generates the built-in example families.

pub mod active_set;
pub mod ensemble;
pub mod entropic;
pub mod error;
pub mod io;
pub mod linalg;
pub mod misdp;
pub mod sdp;
pub mod solver;
pub mod strategy;

pub use error::{Error, Result};

/// Default seed for every randomized component (example generators,
/// annealer restarts, sampled certificate checks).
pub const DEFAULT_SEED: u64 = 7;
