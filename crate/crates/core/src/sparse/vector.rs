//! Sparse vectors keyed on the semiring zero.

use super::SparseError;
use crate::semiring::Semiring;

/// A sparse vector of semiring weights; an absent index means 0̄.
///
/// Entries are kept sorted by strictly increasing index. A stored weight may
/// itself be 0̄ (structural presence and value are independent).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<W> {
    dim: usize,
    entries: Vec<(usize, W)>,
}

impl<W: Semiring> SparseVector<W> {
    /// Builds from entries already sorted by strictly increasing index.
    pub fn new(dim: usize, entries: Vec<(usize, W)>) -> Result<Self, SparseError> {
        if dim == 0 {
            return Err(SparseError::ZeroDimension);
        }
        let mut prev: Option<usize> = None;
        for &(index, _) in &entries {
            if index >= dim {
                return Err(SparseError::IndexOutOfRange { index, dim });
            }
            if prev.is_some_and(|p| p >= index) {
                return Err(SparseError::UnsortedIndices { index });
            }
            prev = Some(index);
        }
        Ok(SparseVector { dim, entries })
    }

    /// Builds from arbitrary (index, weight) pairs: sorts by index and
    /// ⊕-combines duplicates in their order of appearance.
    pub fn from_pairs(dim: usize, pairs: Vec<(usize, W)>) -> Result<Self, SparseError> {
        if dim == 0 {
            return Err(SparseError::ZeroDimension);
        }
        for &(index, _) in &pairs {
            if index >= dim {
                return Err(SparseError::IndexOutOfRange { index, dim });
            }
        }
        let mut sorted = pairs;
        sorted.sort_by_key(|&(index, _)| index);
        let mut entries: Vec<(usize, W)> = Vec::with_capacity(sorted.len());
        for (index, w) in sorted {
            match entries.last_mut() {
                Some((last, acc)) if *last == index => *acc = acc.oplus(w),
                _ => entries.push((index, w)),
            }
        }
        Ok(SparseVector { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, W)] {
        &self.entries
    }

    /// Number of structurally stored entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// The weight at `index`; 0̄ when the index is not stored.
    pub fn get(&self, index: usize) -> W {
        assert!(index < self.dim, "vector index out of range");
        match self.entries.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => W::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<W> {
        let mut out = vec![W::zero(); self.dim];
        for &(index, w) in &self.entries {
            out[index] = w;
        }
        out
    }

    /// True if at least one stored entry has a non-0̄ value.
    pub fn has_nonzero(&self) -> bool {
        self.entries.iter().any(|&(_, w)| !w.is_zero())
    }

    /// Rebuilds the vector with every weight passed through `f`.
    pub fn try_map<V: Semiring, E>(
        &self,
        mut f: impl FnMut(W) -> Result<V, E>,
    ) -> Result<SparseVector<V>, E> {
        let entries = self
            .entries
            .iter()
            .map(|&(i, w)| Ok((i, f(w)?)))
            .collect::<Result<Vec<_>, E>>()?;
        Ok(SparseVector {
            dim: self.dim,
            entries,
        })
    }
}

/// Stacks vectors into one, offsetting each block by the dimensions before it.
pub fn vstack<W: Semiring>(vectors: &[SparseVector<W>]) -> Result<SparseVector<W>, SparseError> {
    if vectors.is_empty() {
        return Err(SparseError::EmptyBlockList);
    }
    let dim = vectors.iter().map(|v| v.dim).sum();
    let mut entries = Vec::with_capacity(vectors.iter().map(|v| v.nnz()).sum());
    let mut offset = 0;
    for v in vectors {
        entries.extend(v.entries.iter().map(|&(i, w)| (offset + i, w)));
        offset += v.dim;
    }
    Ok(SparseVector { dim, entries })
}
