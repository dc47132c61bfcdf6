//! Dense complex linear algebra: matrices, pure states, density operators and
//! a small Hermitian eigensolver.

mod density;
mod eigen;
mod matrix;
mod state;

pub(crate) use density::scatter_offsets;
pub use density::{partial_trace, spin_flip, DensityMatrix};
pub use eigen::{eigh, eigvals_hermitian, HermitianEigen, HERMITIAN_TOL, JACOBI_TOL};
pub use matrix::{kron, kron_all, ComplexMatrix};
pub use state::{apply, StateVector, PHASE_ZERO_TOL};

pub use num_complex::Complex64;
