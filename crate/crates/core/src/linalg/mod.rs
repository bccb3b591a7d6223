//! Small dense linear algebra: a row-major matrix, LU solves, a real
//! nonsymmetric eigenvalue solver and the matrix exponential.

mod eig;
mod expm;
mod matrix;

pub use eig::eigenvalues;
pub use expm::expm;
pub use matrix::Matrix;

pub use num_complex::Complex64;
