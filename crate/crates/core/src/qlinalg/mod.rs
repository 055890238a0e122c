//! Dense complex linear algebra for spaces of dimension 2..16: tensor
//! products, partial traces, Hermitian eigendecomposition, von Neumann
//! entropy, and Haar-random state sampling.

mod density;
mod haar;
mod matrix;

pub use density::{
    binary_entropy, partial_trace, von_neumann_entropy, DensityMatrix, PureStateVector,
    EIGENVALUE_CLIP, HERMITIAN_TOL,
};
pub use haar::{haar_random_pure_state, haar_sample};
pub use matrix::{
    eig_hermitian, eigvals_hermitian, sqrt_psd, tensor, tensor_vec, ComplexSquareMatrix, MAX_DIM,
};
