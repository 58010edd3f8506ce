//! Forward-backward and Viterbi inference as sparse matrix operations over
//! pluggable semirings, with batched block-diagonal composition and the
//! LF-MMI loss/gradient built on top.
//!
//! The recursions are two kernels applied per frame,
//!
//! ```text
//! α_n = v_n ∘ (Tᵀ α_{n-1})        β_n = T (β_{n+1} ∘ v_{n+1})
//! ```
//!
//! where `T` is the sparse transition matrix, `v_n` the per-frame likelihood
//! column and `∘` the element-wise product — all read in a semiring of the
//! caller's choice. Run them in the log-semifield and they are the
//! numerically stable forward-backward algorithm; swap in the tropical
//! semiring and the same forward pass computes Viterbi best-path scores; the
//! plain probability semiring reproduces the textbook recursion (and its
//! underflow).
//!
//! Module map:
//! - [`semiring`]: the algebra contract and the three weight types.
//! - [`sparse`]: 0̄-keyed sparse containers and the matrix–vector kernels.
//! - [`fsm`]: weighted state graphs, text serialization, batch composition
//!   and synthetic graph generation.
//! - [`inference`]: forward, backward, posteriors, Viterbi, the batched
//!   recursion and the brute-force path-enumeration oracle.
//! - [`mod@lfmmi`]: the LF-MMI objective value and its gradient.
//!
//! All containers are immutable after construction and all operations are
//! pure, so values can be shared freely across threads. Kernels may fan out
//! across output indices via rayon — install a rayon thread pool to control
//! the parallelism degree — and are bit-for-bit deterministic regardless of
//! thread count.

pub mod fsm;
pub mod inference;
pub mod lfmmi;
pub mod semiring;
pub mod sparse;

pub use fsm::{
    add_phony_final, compose_batch, load_graph, random_graph, replicate, save_graph, BatchGraph,
    GraphError, GraphKind, WeightedGraph,
};
pub use inference::{
    backward, brute_force, forward, forward_backward, forward_backward_batch,
    forward_backward_lattice, log_marginal, posteriors, score_path, viterbi, BruteForce, FBResult,
    InferenceError, LikelihoodTensor, PosteriorMatrix, ViterbiPath,
};
pub use lfmmi::{lfmmi, lfmmi_batch, BatchLoss, LfmmiError, LossResult};
pub use semiring::{
    LogWeight, ProbWeight, Scalar, Semifield, Semiring, TropicalWeight, WeightError,
};
pub use sparse::{
    block_diagonal, hadamard, vstack, DenseMatrix, SparseError, SparseMatrix, SparseVector,
};
