//! Row-major dense matrix used for likelihood payloads and lattices.

use super::SparseError;

/// A rows × cols row-major dense matrix. Entry types are typically weights,
/// but plain reals are used too (e.g. gradients).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy> DenseMatrix<T> {
    /// Builds from row-major data; `data.len()` must be exactly rows·cols
    /// and both dimensions must be positive.
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, SparseError> {
        if rows == 0 || cols == 0 {
            return Err(SparseError::ZeroDimension);
        }
        if data.len() != rows * cols {
            return Err(SparseError::DimensionMismatch {
                context: "dense matrix payload",
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Result<Self, SparseError> {
        Self::new(rows, cols, vec![value; rows * cols])
    }

    /// Assembles a rows × cols matrix from `cols` column vectors of length
    /// `rows` (the natural layout when a recursion produces one column per
    /// frame).
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Result<Self, SparseError> {
        if rows == 0 || columns.is_empty() {
            return Err(SparseError::ZeroDimension);
        }
        let cols = columns.len();
        for col in columns {
            if col.len() != rows {
                return Err(SparseError::DimensionMismatch {
                    context: "dense matrix column",
                    expected: rows,
                    actual: col.len(),
                });
            }
        }
        let mut data = vec![columns[0][0]; rows * cols];
        for (c, col) in columns.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                data[r * cols + c] = v;
            }
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        assert!(
            row < self.rows && col < self.cols,
            "dense index out of range"
        );
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        assert!(row < self.rows, "dense row out of range");
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<T> {
        assert!(col < self.cols, "dense column out of range");
        (0..self.rows)
            .map(|r| self.data[r * self.cols + col])
            .collect()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Copy>(&self, f: impl FnMut(T) -> U) -> DenseMatrix<U> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().copied().map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_round_trip() {
        let m = DenseMatrix::new(2, 3, vec![1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(m.get(0, 2), 3);
        assert_eq!(m.get(1, 0), 4);
        assert_eq!(m.row(1), &[4, 5, 6]);
        assert_eq!(m.column(1), vec![2, 5]);
    }

    #[test]
    fn from_columns_matches_get() {
        let m = DenseMatrix::from_columns(2, &[vec![1, 4], vec![2, 5], vec![3, 6]]).unwrap();
        assert_eq!(m, DenseMatrix::new(2, 3, vec![1, 2, 3, 4, 5, 6]).unwrap());
    }

    #[test]
    fn shape_errors() {
        assert!(DenseMatrix::new(0, 3, Vec::<i32>::new()).is_err());
        assert!(DenseMatrix::new(2, 2, vec![1, 2, 3]).is_err());
        assert!(DenseMatrix::from_columns(2, &[vec![1], vec![2, 3]]).is_err());
    }
}
