//! Shared numerical kernels: Bessel functions, quadrature rules, sparse
//! symmetric matrices with a banded Cholesky solver, and a blocked
//! shift-invert eigensolver for generalized symmetric pencils.

pub mod bessel;
pub mod condest;
pub mod eig;
pub mod quadrature;
pub mod sparse;
