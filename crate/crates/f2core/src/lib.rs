//! Dense linear algebra over F2 with bit-packed rows.
//!
//! # Conventions
//!
//! Vectors are columns and matrices act on the left. A matrix `m` with
//! `m.rows() == r` and `m.cols() == c` is a linear map `F2^c -> F2^r`, and
//! `m.mul_vec(x)` computes `m·x`. Column `j` of a map's matrix is the image
//! of the `j`-th basis vector; [`BitMatrix::from_columns`] builds a matrix in
//! exactly that way.
//!
//! Storage is row-major with 64-bit words. Padding bits past the last
//! logical column are always zero, so whole-word comparisons and XORs are
//! exact.
//!
//! Every operation that has to pick a basis (kernels, complements,
//! solutions) does so canonically from the reduced row-echelon form, so
//! results are reproducible bit for bit.

mod bitvec;
mod matrix;
mod subspace;

pub use bitvec::BitVec;
pub use matrix::{kernel_basis, rref, solve, BitMatrix, Rref, Solver};
pub use subspace::{quotient_section, QuotientSpace, Subspace};

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}
