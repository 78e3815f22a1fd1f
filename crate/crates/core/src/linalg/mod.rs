//! Dense complex Hermitian linear algebra kernel.
//!
//! Everything else in the crate sits on top of this module: ensembles hold
//! [`HermitianMatrix`] states, the conic solver projects onto the PSD cone
//! through [`eig`], and strategies multiply raw [`CMatrix`] measurement
//! operators. All types are immutable after construction and the
//! operations are pure functions, so values can be shared freely across
//! threads.

mod eig;
mod hermitian;
mod matrix;

pub use eig::{
    eig, eigenvalues, fidelity, min_eigenvalue, pinv_psd, pinv_sqrt_psd, psd_project, sqrt_psd,
    trace_norm, EigenDecomposition, NOT_PSD_TOL, PINV_CUTOFF, PSD_TOL,
};
pub use hermitian::HermitianMatrix;
pub use matrix::{C64, CMatrix, CVector};
