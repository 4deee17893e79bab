//! Dense complex matrices, Hilbert-Schmidt geometry, rank-revealing null
//! spaces and realification.

mod eigen;
mod matrix;
mod nullspace;
mod realify;
mod solve;
mod subspace;
mod svd;
mod system;

pub use eigen::{cluster_sorted, hermitian_eigen};
pub use matrix::{hs_inner, ComplexMatrix, C64, I, ONE, ZERO};
pub use nullspace::{dense_kernel, normalize_phase, null_space, null_space_real, sparse_kernel, Cutoff, Kernel, SparseRow};
pub use realify::{derealify, realify, RealifiedSystem};
pub use solve::{least_norm, restrict};
pub use subspace::{membership, orthonormalize, orthonormalize_in, Field, MatrixSubspace, Membership, SpanBuilder};
pub use system::ConstraintSystem;

pub(crate) use svd::checked_svd;

#[allow(unused_imports)]
pub(crate) use matrix::hs_inner_unchecked;
