//! Dense complex linear algebra.

pub mod eigen;
pub mod matrix;
pub mod ops;
pub mod random;

pub use eigen::{
    eigvalsh, herm_eig, herm_exp_conjugate, min_eigenvalue, op_norm, psd_project, sqrt_psd, HermEigen, HermFlow,
};
pub use matrix::{ComplexMatrix, C64, I, ONE, ZERO};
pub use ops::{anticommutator, commutator, frob_norm, hs_inner, kron, partial_trace, partial_transpose, pauli, Subsystem};
pub use random::{random_density, random_ginibre, random_haar_vector, random_hermitian, random_unitary, RngStream};
