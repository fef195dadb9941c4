//! Dense complex linear algebra kernel shared by every analysis.

mod basis;
mod decomp;
pub mod exact;
mod matrix;
mod tolerance;

pub use basis::{orthonormal_extend, SubspaceBasis};
pub use decomp::{
    eigen, eigenvalues, hermitian_eigen, least_squares, null_space, numerical_rank, operator_norm,
    psd_sqrt_and_inv_sqrt, singular_values, EigenPair,
};
pub use matrix::{pauli_matrices, ComplexMatrix, C64};
pub(crate) use matrix::{ONE, ZERO};
pub use tolerance::TolerancePolicy;
