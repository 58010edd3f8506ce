//! Semiring-generic sparse and dense containers plus the kernels the
//! forward-backward recursions are written in.
//!
//! The storage convention that matters: an *absent* entry means the semiring
//! zero 0̄, not the number 0. For the log-semifield 0̄ = −∞ while 1̄ = 0, so a
//! numeric-zero-keyed sparse format would drop the multiplicative identities
//! and keep the annihilators. Everything here keys on structural presence
//! instead; explicitly stored 0̄ values are permitted and
//! [`SparseMatrix::canonicalize`] removes them.
//!
//! All kernels accumulate in a fixed order (ascending stored index, starting
//! from 0̄) so results are reproducible and batched computations match their
//! sequential counterparts bit for bit. Parallel execution splits across
//! output indices only, which preserves that order.

mod dense;
mod matrix;
mod vector;

pub use dense::DenseMatrix;
pub use matrix::{block_diagonal, SparseMatrix};
pub use vector::{vstack, SparseVector};

use thiserror::Error;

use crate::semiring::Semiring;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SparseError {
    #[error("entry ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("index {index} out of range for a dimension-{dim} vector")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("{context}: expected dimension {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("indices must be strictly increasing (saw {index} twice or out of order)")]
    UnsortedIndices { index: usize },
    #[error("dimensions must be positive")]
    ZeroDimension,
    #[error("at least one block is required")]
    EmptyBlockList,
}

/// Element-wise ⊗ of two equal-length vectors: `(u ∘ v)_i = u_i ⊗ v_i`.
///
/// The result is 0̄ wherever either operand is 0̄, since 0̄ annihilates.
pub fn hadamard<W: Semiring>(u: &[W], v: &[W]) -> Result<Vec<W>, SparseError> {
    if u.len() != v.len() {
        return Err(SparseError::DimensionMismatch {
            context: "hadamard",
            expected: u.len(),
            actual: v.len(),
        });
    }
    Ok(u.iter().zip(v).map(|(&a, &b)| a.otimes(b)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{LogWeight, Semiring};

    fn lw(v: f64) -> LogWeight {
        LogWeight::new(v).unwrap()
    }

    #[test]
    fn hadamard_identities() {
        let u = vec![lw(1.0), lw(2.0)];
        let ones = vec![LogWeight::one(); 2];
        let zeros = vec![LogWeight::zero(); 2];
        assert_eq!(hadamard(&u, &ones).unwrap(), u);
        assert_eq!(hadamard(&u, &zeros).unwrap(), zeros);
        assert_eq!(
            hadamard(&[lw(1.0), lw(2.0)], &[lw(3.0), lw(4.0)]).unwrap(),
            vec![lw(4.0), lw(6.0)]
        );
    }

    #[test]
    fn hadamard_rejects_length_mismatch() {
        let u = vec![lw(1.0)];
        let v = vec![lw(1.0), lw(2.0)];
        assert!(hadamard(&u, &v).is_err());
    }
}
