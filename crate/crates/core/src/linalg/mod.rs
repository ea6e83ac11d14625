//! Dense complex linear algebra shared by every other module.

mod eigen;
mod matrix;
mod sparse;

pub use eigen::{expm_hermitian_scaled, hermitian_eig, hermitian_eigvals, HermitianEig, HERMITIAN_TOL};
pub use matrix::{frob_dist, kron, ComplexMatrix};
pub use sparse::SparseMatrix;
