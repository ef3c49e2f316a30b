//! Exact linear algebra over the two-element field.
//!
//! Vectors and subspaces live in F₂ⁿ with `n <= 64` and are packed into a
//! single word; matrices may be of any shape.

mod bitvec;
mod matrix;
mod subspace;

pub use bitvec::{BitVec, MAX_DIM};
pub use matrix::BitMatrix;
pub use subspace::{enumerate_subspaces, subspaces_of_dim, Subspace};

pub(crate) use bitvec::{low_mask, parity};

/// Dimension of the row space of `m`.
pub fn rank(m: &BitMatrix) -> usize {
    m.rank()
}

/// Solution space of `m · v = 0`.
pub fn kernel(m: &BitMatrix) -> Subspace {
    m.kernel()
}

/// Some `x` with `m · x = b`, or `None` when inconsistent.
pub fn solve(m: &BitMatrix, b: &BitVec) -> crate::Result<Option<BitVec>> {
    m.solve(b)
}
