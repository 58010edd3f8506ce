//! Dual-layout sparse matrix and the two matrix–vector kernels.

use rayon::prelude::*;

use super::SparseError;
use crate::semiring::Semiring;

// Below this many output entries the rayon dispatch overhead dominates.
const PAR_THRESHOLD: usize = 4096;

/// A rows × cols sparse matrix of semiring weights; an absent entry means 0̄.
///
/// Storage is kept in both compressed-row and compressed-column layouts so
/// that [`matvec`](SparseMatrix::matvec) and
/// [`matvec_transposed`](SparseMatrix::matvec_transposed) each traverse
/// memory contiguously. Within each row/column the stored indices are
/// strictly increasing, which fixes the ⊕ accumulation order.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<W> {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    csr_cols: Vec<usize>,
    csr_vals: Vec<W>,
    col_ptr: Vec<usize>,
    csc_rows: Vec<usize>,
    csc_vals: Vec<W>,
}

impl<W: Semiring> SparseMatrix<W> {
    /// Builds from (row, col, weight) triplets. Duplicate coordinates are
    /// ⊕-combined in their order of appearance.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, W)],
    ) -> Result<Self, SparseError> {
        if rows == 0 || cols == 0 {
            return Err(SparseError::ZeroDimension);
        }
        for &(r, c, _) in triplets {
            if r >= rows || c >= cols {
                return Err(SparseError::EntryOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
        }
        let mut sorted: Vec<(usize, usize, W)> = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut combined: Vec<(usize, usize, W)> = Vec::with_capacity(sorted.len());
        for (r, c, w) in sorted {
            match combined.last_mut() {
                Some((lr, lc, acc)) if *lr == r && *lc == c => *acc = acc.oplus(w),
                _ => combined.push((r, c, w)),
            }
        }
        Ok(Self::from_sorted_unique(rows, cols, &combined))
    }

    /// `entries` must be sorted by (row, col) with no duplicates.
    fn from_sorted_unique(rows: usize, cols: usize, entries: &[(usize, usize, W)]) -> Self {
        let nnz = entries.len();
        let mut row_ptr = vec![0usize; rows + 1];
        for &(r, _, _) in entries {
            row_ptr[r + 1] += 1;
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let csr_cols: Vec<usize> = entries.iter().map(|&(_, c, _)| c).collect();
        let csr_vals: Vec<W> = entries.iter().map(|&(_, _, w)| w).collect();

        // Counting sort by column; row-major input order keeps rows ascending
        // within each column.
        let mut col_ptr = vec![0usize; cols + 1];
        for &(_, c, _) in entries {
            col_ptr[c + 1] += 1;
        }
        for c in 0..cols {
            col_ptr[c + 1] += col_ptr[c];
        }
        let mut next = col_ptr.clone();
        let mut csc_rows = vec![0usize; nnz];
        let mut csc_vals = vec![W::zero(); nnz];
        for &(r, c, w) in entries {
            let slot = next[c];
            csc_rows[slot] = r;
            csc_vals[slot] = w;
            next[c] += 1;
        }

        SparseMatrix {
            rows,
            cols,
            row_ptr,
            csr_cols,
            csr_vals,
            col_ptr,
            csc_rows,
            csc_vals,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of structurally stored entries (some may hold 0̄ until
    /// [`canonicalize`](SparseMatrix::canonicalize) is applied).
    pub fn nnz(&self) -> usize {
        self.csr_vals.len()
    }

    /// The weight at (row, col); 0̄ when the coordinate is not stored.
    pub fn lookup(&self, row: usize, col: usize) -> W {
        assert!(
            row < self.rows && col < self.cols,
            "matrix index out of range"
        );
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.csr_cols[lo..hi].binary_search(&col) {
            Ok(pos) => self.csr_vals[lo + pos],
            Err(_) => W::zero(),
        }
    }

    /// Stored entries of one row: (column indices, weights), ascending.
    pub fn row_entries(&self, row: usize) -> (&[usize], &[W]) {
        assert!(row < self.rows, "row out of range");
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        (&self.csr_cols[lo..hi], &self.csr_vals[lo..hi])
    }

    /// Stored entries of one column: (row indices, weights), ascending.
    pub fn col_entries(&self, col: usize) -> (&[usize], &[W]) {
        assert!(col < self.cols, "column out of range");
        let lo = self.col_ptr[col];
        let hi = self.col_ptr[col + 1];
        (&self.csc_rows[lo..hi], &self.csc_vals[lo..hi])
    }

    /// Stored triplets in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, W)> + '_ {
        (0..self.rows).flat_map(move |r| {
            let (cols, vals) = self.row_entries(r);
            cols.iter().zip(vals).map(move |(&c, &w)| (r, c, w))
        })
    }

    /// `y_i = ⊕_j M_ij ⊗ x_j`, accumulated in ascending column order.
    pub fn matvec(&self, x: &[W]) -> Result<Vec<W>, SparseError> {
        if x.len() != self.cols {
            return Err(SparseError::DimensionMismatch {
                context: "matvec input",
                expected: self.cols,
                actual: x.len(),
            });
        }
        let run = |i: usize| {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let mut acc = W::zero();
            for k in lo..hi {
                acc = acc.oplus(self.csr_vals[k].otimes(x[self.csr_cols[k]]));
            }
            acc
        };
        Ok(if self.rows >= PAR_THRESHOLD {
            (0..self.rows).into_par_iter().map(run).collect()
        } else {
            (0..self.rows).map(run).collect()
        })
    }

    /// `y_j = ⊕_i M_ij ⊗ x_i`, accumulated in ascending row order.
    pub fn matvec_transposed(&self, x: &[W]) -> Result<Vec<W>, SparseError> {
        if x.len() != self.rows {
            return Err(SparseError::DimensionMismatch {
                context: "transposed matvec input",
                expected: self.rows,
                actual: x.len(),
            });
        }
        let run = |j: usize| {
            let lo = self.col_ptr[j];
            let hi = self.col_ptr[j + 1];
            let mut acc = W::zero();
            for k in lo..hi {
                acc = acc.oplus(self.csc_vals[k].otimes(x[self.csc_rows[k]]));
            }
            acc
        };
        Ok(if self.cols >= PAR_THRESHOLD {
            (0..self.cols).into_par_iter().map(run).collect()
        } else {
            (0..self.cols).map(run).collect()
        })
    }

    /// The explicit transpose. Costs only a layout swap, and
    /// `t.matvec(x)` traverses exactly as `self.matvec_transposed(x)` does.
    pub fn transpose(&self) -> SparseMatrix<W> {
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            row_ptr: self.col_ptr.clone(),
            csr_cols: self.csc_rows.clone(),
            csr_vals: self.csc_vals.clone(),
            col_ptr: self.row_ptr.clone(),
            csc_rows: self.csr_cols.clone(),
            csc_vals: self.csr_vals.clone(),
        }
    }

    /// Drops stored entries whose value is 0̄. Behaviorally identical under
    /// the kernels, since 0̄ terms contribute the ⊕ identity.
    pub fn canonicalize(&self) -> SparseMatrix<W> {
        let kept: Vec<(usize, usize, W)> =
            self.triplets().filter(|&(_, _, w)| !w.is_zero()).collect();
        Self::from_sorted_unique(self.rows, self.cols, &kept)
    }

    /// Rebuilds the matrix with every weight passed through `f`.
    pub fn try_map<V: Semiring, E>(
        &self,
        mut f: impl FnMut(W) -> Result<V, E>,
    ) -> Result<SparseMatrix<V>, E> {
        let entries = self
            .triplets()
            .map(|(r, c, w)| Ok((r, c, f(w)?)))
            .collect::<Result<Vec<_>, E>>()?;
        Ok(SparseMatrix::from_sorted_unique(
            self.rows, self.cols, &entries,
        ))
    }
}

/// `diag(blocks[0], …, blocks[n-1])`: block i is offset by the summed
/// dimensions of the blocks before it; everything off-block is 0̄.
pub fn block_diagonal<W: Semiring>(
    blocks: &[SparseMatrix<W>],
) -> Result<SparseMatrix<W>, SparseError> {
    if blocks.is_empty() {
        return Err(SparseError::EmptyBlockList);
    }
    let rows: usize = blocks.iter().map(|b| b.rows).sum();
    let cols: usize = blocks.iter().map(|b| b.cols).sum();
    let mut entries = Vec::with_capacity(blocks.iter().map(|b| b.nnz()).sum());
    let mut row_off = 0;
    let mut col_off = 0;
    for block in blocks {
        entries.extend(
            block
                .triplets()
                .map(|(r, c, w)| (row_off + r, col_off + c, w)),
        );
        row_off += block.rows;
        col_off += block.cols;
    }
    Ok(SparseMatrix::from_sorted_unique(rows, cols, &entries))
}
