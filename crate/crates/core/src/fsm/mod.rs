//! Weighted state graphs: the Markov process behind the recursions.
//!
//! A [`WeightedGraph`] is a transition matrix `T` (entry `(i, j)` holds the
//! score of the arc `i → j`, i.e. `log p(z_n = j | z_{n-1} = i)` in the log
//! domain) together with an initial vector `pi` and a final vector `omega`.
//! The forward recursion therefore uses the transposed product `Tᵀ α`.
//!
//! Graphs are immutable after construction and freely shareable across
//! threads. Batch composition stacks several graphs into one block-diagonal
//! system so a single recursion serves the whole batch.

mod random;
mod text;

pub use random::{random_graph, GraphKind};
pub use text::{load_graph, save_graph};

use thiserror::Error;

use crate::semiring::{LogWeight, Semiring, WeightError};
use crate::sparse::{block_diagonal, vstack, SparseError, SparseMatrix, SparseVector};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph must have at least one state")]
    NoStates,
    #[error("graph has no initial state with non-0̄ weight")]
    NoInitialState,
    #[error("graph has no final state with non-0̄ weight")]
    NoFinalState,
    #[error("infeasible shape for a {kind} graph: {states} states, {arcs} arcs ({detail})")]
    InfeasibleShape {
        kind: GraphKind,
        states: usize,
        arcs: usize,
        detail: String,
    },
    #[error("batch arity mismatch: {graphs} graphs but {lengths} lengths")]
    BatchArity { graphs: usize, lengths: usize },
    #[error("batch must contain at least one member")]
    EmptyBatch,
    #[error("frame counts must be positive (member {member})")]
    ZeroLength { member: usize },
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Transition matrix plus initial and final weight vectors.
///
/// Invariants: `T` is `K × K`; `pi` and `omega` each carry at least one
/// non-0̄ entry. With `omega` all-1̄ the total lattice weight degenerates to
/// the plain sum of final forward scores; weighted finals cover graphs
/// derived from real FSTs.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<W: Semiring = LogWeight> {
    transitions: SparseMatrix<W>,
    initial: SparseVector<W>,
    finals: SparseVector<W>,
}

impl<W: Semiring> WeightedGraph<W> {
    pub fn new(
        transitions: SparseMatrix<W>,
        initial: SparseVector<W>,
        finals: SparseVector<W>,
    ) -> Result<Self, GraphError> {
        let k = transitions.rows();
        if k == 0 {
            return Err(GraphError::NoStates);
        }
        if transitions.cols() != k {
            return Err(SparseError::DimensionMismatch {
                context: "transition matrix must be square",
                expected: k,
                actual: transitions.cols(),
            }
            .into());
        }
        for (dim, context) in [
            (initial.dim(), "initial vector"),
            (finals.dim(), "final vector"),
        ] {
            if dim != k {
                return Err(SparseError::DimensionMismatch {
                    context,
                    expected: k,
                    actual: dim,
                }
                .into());
            }
        }
        if !initial.has_nonzero() {
            return Err(GraphError::NoInitialState);
        }
        if !finals.has_nonzero() {
            return Err(GraphError::NoFinalState);
        }
        Ok(WeightedGraph {
            transitions,
            initial,
            finals,
        })
    }

    pub fn num_states(&self) -> usize {
        self.transitions.rows()
    }

    pub fn transitions(&self) -> &SparseMatrix<W> {
        &self.transitions
    }

    pub fn initial(&self) -> &SparseVector<W> {
        &self.initial
    }

    pub fn finals(&self) -> &SparseVector<W> {
        &self.finals
    }

    /// Stored arc count of the transition matrix.
    pub fn num_arcs(&self) -> usize {
        self.transitions.nnz()
    }

    /// Rebuilds the graph in another semiring through the log-probability
    /// embedding. Fails if a weight does not fit the target domain.
    pub fn convert<V: Semiring>(&self) -> Result<WeightedGraph<V>, WeightError> {
        let embed = |w: W| V::from_log_prob(w.to_log_prob());
        Ok(WeightedGraph {
            transitions: self.transitions.try_map(embed)?,
            initial: self.initial.try_map(embed)?,
            finals: self.finals.try_map(embed)?,
        })
    }

    /// Checks that every state with outgoing arcs has its row ⊕-sum equal to
    /// 1̄ within `tol` (in log-probability units). A validation utility only:
    /// LF-MMI graphs legitimately carry unnormalized scores.
    pub fn is_stochastic(&self, tol: f64) -> bool {
        (0..self.num_states()).all(|state| {
            let (_, vals) = self.transitions.row_entries(state);
            if vals.is_empty() {
                return true;
            }
            let sum = vals.iter().fold(W::zero(), |acc, &w| acc.oplus(w));
            sum.to_log_prob().abs() <= tol
        })
    }

    /// True when every state is reachable from an initial state and
    /// co-reachable to a final state (no dead states).
    pub fn is_trim(&self) -> bool {
        let k = self.num_states();
        let forward = self.sweep(true);
        let backward = self.sweep(false);
        (0..k).all(|s| forward[s] && backward[s])
    }

    fn sweep(&self, from_initial: bool) -> Vec<bool> {
        let seeds = if from_initial {
            &self.initial
        } else {
            &self.finals
        };
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<usize> = seeds
            .entries()
            .iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|&(s, _)| s)
            .collect();
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(s) = stack.pop() {
            let (next, vals) = if from_initial {
                self.transitions.row_entries(s)
            } else {
                self.transitions.col_entries(s)
            };
            for (&t, w) in next.iter().zip(vals) {
                if !w.is_zero() && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }
}

/// Appends a self-looping end-of-sequence state: every final state gets an
/// arc to it carrying its final weight, the new state self-loops with 1̄ and
/// becomes the only final. Padding likelihood frames with 1̄ on this state
/// (and 0̄ elsewhere) then leaves the total lattice weight unchanged, which
/// is what lets mixed-length batches share one recursion.
pub fn add_phony_final<W: Semiring>(g: &WeightedGraph<W>) -> WeightedGraph<W> {
    let k = g.num_states();
    let phony = k;
    let mut triplets: Vec<(usize, usize, W)> = g.transitions.triplets().collect();
    for &(state, w) in g.finals.entries() {
        if !w.is_zero() {
            triplets.push((state, phony, w));
        }
    }
    triplets.push((phony, phony, W::one()));
    let transitions = SparseMatrix::from_triplets(k + 1, k + 1, &triplets)
        .expect("phony-final indices are in range by construction");
    let initial = SparseVector::new(k + 1, g.initial.entries().to_vec())
        .expect("initial entries remain valid in the widened graph");
    let finals =
        SparseVector::new(k + 1, vec![(phony, W::one())]).expect("phony final entry is in range");
    WeightedGraph {
        transitions,
        initial,
        finals,
    }
}

/// A batch of graphs composed into one block-diagonal system.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchGraph<W: Semiring = LogWeight> {
    composed: WeightedGraph<W>,
    offsets: Vec<usize>,
    lengths: Vec<usize>,
}

impl<W: Semiring> BatchGraph<W> {
    /// The block-diagonal composition of all members.
    pub fn composed(&self) -> &WeightedGraph<W> {
        &self.composed
    }

    /// Per-member state offsets into the composed index space;
    /// `offsets[0] == 0` and offsets are strictly increasing.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Per-member frame counts, fixed at composition time.
    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn members(&self) -> usize {
        self.offsets.len()
    }

    pub fn member_states(&self, member: usize) -> usize {
        assert!(member < self.members(), "member out of range");
        let lo = self.offsets[member];
        let hi = self
            .offsets
            .get(member + 1)
            .copied()
            .unwrap_or_else(|| self.composed.num_states());
        hi - lo
    }

    /// Recovers one member graph from the composed system. Structural
    /// round-trip: slicing returns exactly the graph that was composed in.
    pub fn slice_member(&self, member: usize) -> WeightedGraph<W> {
        let lo = self.offsets[member];
        let k = self.member_states(member);
        let mut triplets = Vec::new();
        for row in lo..lo + k {
            let (cols, vals) = self.composed.transitions.row_entries(row);
            for (&c, &w) in cols.iter().zip(vals) {
                debug_assert!(c >= lo && c < lo + k, "block-diagonal structure violated");
                triplets.push((row - lo, c - lo, w));
            }
        }
        let slice_vec = |v: &SparseVector<W>| {
            let entries: Vec<(usize, W)> = v
                .entries()
                .iter()
                .filter(|&&(i, _)| i >= lo && i < lo + k)
                .map(|&(i, w)| (i - lo, w))
                .collect();
            SparseVector::new(k, entries).expect("sliced entries stay sorted and in range")
        };
        WeightedGraph {
            transitions: SparseMatrix::from_triplets(k, k, &triplets)
                .expect("sliced triplets are in range"),
            initial: slice_vec(&self.composed.initial),
            finals: slice_vec(&self.composed.finals),
        }
    }
}

/// Stacks `graphs` into a block-diagonal [`BatchGraph`]; `lengths[i]` is the
/// frame count member `i` will be run with.
pub fn compose_batch<W: Semiring>(
    graphs: &[WeightedGraph<W>],
    lengths: &[usize],
) -> Result<BatchGraph<W>, GraphError> {
    if graphs.is_empty() {
        return Err(GraphError::EmptyBatch);
    }
    if graphs.len() != lengths.len() {
        return Err(GraphError::BatchArity {
            graphs: graphs.len(),
            lengths: lengths.len(),
        });
    }
    if let Some(member) = lengths.iter().position(|&n| n == 0) {
        return Err(GraphError::ZeroLength { member });
    }
    let transitions: Vec<SparseMatrix<W>> = graphs.iter().map(|g| g.transitions.clone()).collect();
    let initials: Vec<SparseVector<W>> = graphs.iter().map(|g| g.initial.clone()).collect();
    let finals: Vec<SparseVector<W>> = graphs.iter().map(|g| g.finals.clone()).collect();
    let composed = WeightedGraph {
        transitions: block_diagonal(&transitions)?,
        initial: vstack(&initials)?,
        finals: vstack(&finals)?,
    };
    let mut offsets = Vec::with_capacity(graphs.len());
    let mut acc = 0;
    for g in graphs {
        offsets.push(acc);
        acc += g.num_states();
    }
    Ok(BatchGraph {
        composed,
        offsets,
        lengths: lengths.to_vec(),
    })
}

/// Composes `count` copies of one graph, each to be run with `frames`
/// frames — the mini-batch simulation pattern.
pub fn replicate<W: Semiring>(
    g: &WeightedGraph<W>,
    count: usize,
    frames: usize,
) -> Result<BatchGraph<W>, GraphError> {
    let graphs = vec![g.clone(); count];
    compose_batch(&graphs, &vec![frames; count])
}
