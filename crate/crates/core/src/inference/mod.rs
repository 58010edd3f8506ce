//! Forward, backward, posterior, marginal and Viterbi computations, single
//! sequence and batched.
//!
//! The forward pass is `α_n = v_n ∘ (Tᵀ α_{n-1})` with base case
//! `α_1 = v_1 ∘ pi`; the backward pass is `β_n = T (β_{n+1} ∘ v_{n+1})` with
//! base case `β_N = omega`. These bases make the lattice identity
//! `⊕_k α_n(k) ⊗ β_n(k) = logZ` hold at every frame, with
//! `logZ = ⊕_k α_N(k) ⊗ omega(k)`. α and β lattices are materialized densely
//! (K × N): posteriors need every cell and no pruning is done.
//!
//! Everything is generic over the semiring: [`LogWeight`] gives the
//! numerically stable algorithm, [`crate::semiring::ProbWeight`] the textbook
//! recursion, and the tropical instantiation (plus backpointers) lives in
//! [`viterbi`].

mod oracle;
mod viterbi;

pub use oracle::{brute_force, BruteForce, ENUMERATION_GUARD};
pub use viterbi::{score_path, viterbi, ViterbiPath};

use thiserror::Error;

use crate::fsm::{add_phony_final, compose_batch, BatchGraph, WeightedGraph};
use crate::semiring::{LogWeight, Semifield, Semiring, WeightError};
use crate::sparse::{hadamard, DenseMatrix, SparseError, SparseVector};

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("likelihood tensor covers {actual} states but the graph has {expected}")]
    StateMismatch { expected: usize, actual: usize },
    #[error("batch member {member}: likelihoods cover {actual} states, graph has {expected}")]
    MemberStateMismatch {
        member: usize,
        expected: usize,
        actual: usize,
    },
    #[error("batch member {member}: composed for {expected} frames, likelihoods have {actual}")]
    MemberFrameMismatch {
        member: usize,
        expected: usize,
        actual: usize,
    },
    #[error("batch expects {expected} likelihood tensors, got {actual}")]
    BatchArity { expected: usize, actual: usize },
    #[error(
        "empty lattice{}: no accepting path carries non-0̄ weight",
        .member.map(|m| format!(" (batch member {m})")).unwrap_or_default()
    )]
    EmptyLattice { member: Option<usize> },
    #[error("state sequence space {states}^{frames} exceeds the enumeration guard of {limit}")]
    EnumerationGuard {
        states: usize,
        frames: usize,
        limit: u64,
    },
    #[error("path does not fit the lattice: {0}")]
    InvalidPath(String),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// K × N matrix of per-state, per-frame observation scores; entry `(i, n)`
/// holds `log p(x_n | z_n = i)` read into the semiring at hand.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodTensor<W: Semiring = LogWeight> {
    values: DenseMatrix<W>,
}

impl<W: Semiring> LikelihoodTensor<W> {
    pub fn new(values: DenseMatrix<W>) -> Self {
        LikelihoodTensor { values }
    }

    /// Builds from row-major (state-major) raw log-probabilities.
    pub fn from_log_probs(
        states: usize,
        frames: usize,
        log_probs: &[f64],
    ) -> Result<Self, InferenceError> {
        let weights = log_probs
            .iter()
            .map(|&lp| W::from_log_prob(lp))
            .collect::<Result<Vec<W>, WeightError>>()?;
        Ok(LikelihoodTensor {
            values: DenseMatrix::new(states, frames, weights)?,
        })
    }

    pub fn num_states(&self) -> usize {
        self.values.rows()
    }

    pub fn num_frames(&self) -> usize {
        self.values.cols()
    }

    pub fn get(&self, state: usize, frame: usize) -> W {
        self.values.get(state, frame)
    }

    /// Column `n`: the likelihood vector `v_n`.
    pub fn frame(&self, frame: usize) -> Vec<W> {
        self.values.column(frame)
    }

    pub fn values(&self) -> &DenseMatrix<W> {
        &self.values
    }

    /// Re-reads the tensor in another semiring via the log-prob embedding.
    pub fn convert<V: Semiring>(&self) -> Result<LikelihoodTensor<V>, WeightError> {
        let mut err = None;
        let values = self
            .values
            .map(|w| match V::from_log_prob(w.to_log_prob()) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    V::zero()
                }
            });
        match err {
            None => Ok(LikelihoodTensor { values }),
            Some(e) => Err(e),
        }
    }
}

/// α and β lattices with the total lattice weight; `log_z` is never 0̄ (the
/// constructors reject empty lattices).
#[derive(Debug, Clone, PartialEq)]
pub struct FBResult<W: Semiring = LogWeight> {
    alphas: DenseMatrix<W>,
    betas: DenseMatrix<W>,
    log_z: W,
}

impl<W: Semiring> FBResult<W> {
    pub fn alphas(&self) -> &DenseMatrix<W> {
        &self.alphas
    }

    pub fn betas(&self) -> &DenseMatrix<W> {
        &self.betas
    }

    pub fn log_z(&self) -> W {
        self.log_z
    }
}

/// Per-frame state posterior distribution in the computation's semiring;
/// stored values are semiring weights (log-domain for [`LogWeight`]) and
/// [`probabilities`](PosteriorMatrix::probabilities) is the
/// probability-domain view. Each frame's probabilities sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorMatrix<W: Semiring = LogWeight> {
    values: DenseMatrix<W>,
}

impl<W: Semiring> PosteriorMatrix<W> {
    pub(crate) fn from_values(values: DenseMatrix<W>) -> Self {
        PosteriorMatrix { values }
    }

    pub fn num_states(&self) -> usize {
        self.values.rows()
    }

    pub fn num_frames(&self) -> usize {
        self.values.cols()
    }

    pub fn get(&self, state: usize, frame: usize) -> W {
        self.values.get(state, frame)
    }

    pub fn values(&self) -> &DenseMatrix<W> {
        &self.values
    }

    pub fn probabilities(&self) -> DenseMatrix<f64> {
        self.values.map(|w| w.to_log_prob().exp())
    }
}

fn check_dims<W: Semiring>(
    g: &WeightedGraph<W>,
    likelihoods: &LikelihoodTensor<W>,
) -> Result<(), InferenceError> {
    if g.num_states() != likelihoods.num_states() {
        return Err(InferenceError::StateMismatch {
            expected: g.num_states(),
            actual: likelihoods.num_states(),
        });
    }
    Ok(())
}

/// Forward pass: column `n` of the result is `α_n`. Entries stay 0̄ exactly
/// for states unreachable in `n` steps.
pub fn forward<W: Semiring>(
    g: &WeightedGraph<W>,
    likelihoods: &LikelihoodTensor<W>,
) -> Result<DenseMatrix<W>, InferenceError> {
    check_dims(g, likelihoods)?;
    let frames = likelihoods.num_frames();
    let mut columns: Vec<Vec<W>> = Vec::with_capacity(frames);
    columns.push(hadamard(&likelihoods.frame(0), &g.initial().to_dense())?);
    for n in 1..frames {
        let propagated = g.transitions().matvec_transposed(&columns[n - 1])?;
        columns.push(hadamard(&likelihoods.frame(n), &propagated)?);
    }
    Ok(DenseMatrix::from_columns(g.num_states(), &columns)?)
}

/// Backward pass: column `n` of the result is `β_n`; the Hadamard product
/// uses frame `n + 1` likelihoods and the last column is `omega` densified.
pub fn backward<W: Semiring>(
    g: &WeightedGraph<W>,
    likelihoods: &LikelihoodTensor<W>,
) -> Result<DenseMatrix<W>, InferenceError> {
    check_dims(g, likelihoods)?;
    let frames = likelihoods.num_frames();
    let mut columns: Vec<Vec<W>> = vec![Vec::new(); frames];
    columns[frames - 1] = g.finals().to_dense();
    for n in (0..frames - 1).rev() {
        let emitted = hadamard(&columns[n + 1], &likelihoods.frame(n + 1))?;
        columns[n] = g.transitions().matvec(&emitted)?;
    }
    Ok(DenseMatrix::from_columns(g.num_states(), &columns)?)
}

/// `⊕_k α_N(k) ⊗ omega(k)` without the empty-lattice check. 0̄ means no
/// accepting path carries weight (or, in the probability semiring, that the
/// computation underflowed).
pub fn raw_marginal<W: Semiring>(alpha_last: &[W], finals: &SparseVector<W>) -> W {
    finals.entries().iter().fold(W::zero(), |acc, &(state, w)| {
        acc.oplus(alpha_last[state].otimes(w))
    })
}

/// Total lattice weight from a forward lattice. A 0̄ result is reported as an
/// empty-lattice error: downstream posterior division by 0̄ is undefined.
pub fn log_marginal<W: Semiring>(
    alphas: &DenseMatrix<W>,
    finals: &SparseVector<W>,
) -> Result<W, InferenceError> {
    if alphas.rows() != finals.dim() {
        return Err(InferenceError::StateMismatch {
            expected: finals.dim(),
            actual: alphas.rows(),
        });
    }
    let last = alphas.column(alphas.cols() - 1);
    let z = raw_marginal(&last, finals);
    if z.is_zero() {
        return Err(InferenceError::EmptyLattice { member: None });
    }
    Ok(z)
}

/// Runs both passes and computes the total lattice weight.
pub fn forward_backward_lattice<W: Semiring>(
    g: &WeightedGraph<W>,
    likelihoods: &LikelihoodTensor<W>,
) -> Result<FBResult<W>, InferenceError> {
    let alphas = forward(g, likelihoods)?;
    let log_z = log_marginal(&alphas, g.finals())?;
    let betas = backward(g, likelihoods)?;
    Ok(FBResult {
        alphas,
        betas,
        log_z,
    })
}

/// `γ_n(k) = α_n(k) ⊗ β_n(k) ⊘ logZ`. States with `α ⊗ β = 0̄` get
/// posterior exactly 0̄.
pub fn posteriors<W: Semifield>(fb: &FBResult<W>) -> PosteriorMatrix<W> {
    let log_z = fb.log_z;
    let data: Vec<W> = fb
        .alphas
        .data()
        .iter()
        .zip(fb.betas.data())
        .map(|(&a, &b)| {
            a.otimes(b)
                .oslash(log_z)
                .expect("FBResult guarantees a non-0̄ lattice weight")
        })
        .collect();
    let values = DenseMatrix::new(fb.alphas.rows(), fb.alphas.cols(), data)
        .expect("posterior matrix inherits the lattice shape");
    PosteriorMatrix::from_values(values)
}

/// The composed operation: posteriors plus total lattice weight.
pub fn forward_backward<W: Semifield>(
    g: &WeightedGraph<W>,
    likelihoods: &LikelihoodTensor<W>,
) -> Result<(PosteriorMatrix<W>, W), InferenceError> {
    let fb = forward_backward_lattice(g, likelihoods)?;
    let gammas = posteriors(&fb);
    Ok((gammas, fb.log_z))
}

/// Batched forward-backward: one recursion over the block-diagonal system.
///
/// Every member is extended with the phony end-of-sequence state and the
/// stacked likelihood columns are padded with 0̄ (1̄ on the phony state) past
/// each member's true length, so mixed-length batches share a single
/// `max(N)+1`-step recursion. Padded frames and the phony state are excluded
/// from the returned posteriors.
///
/// Per-member results are bit-identical to solo [`forward_backward`] runs:
/// the deterministic ascending-index accumulation makes the block-diagonal
/// recursion compute exactly the same float operations per member.
pub fn forward_backward_batch<W: Semifield>(
    bg: &BatchGraph<W>,
    likelihoods: &[LikelihoodTensor<W>],
) -> Result<Vec<(PosteriorMatrix<W>, W)>, InferenceError> {
    batch_members_raw(bg, likelihoods)?
        .into_iter()
        .enumerate()
        .map(|(member, result)| {
            result.ok_or(InferenceError::EmptyLattice {
                member: Some(member),
            })
        })
        .collect()
}

/// Per-member posterior/weight pairs; `None` marks an empty lattice.
pub(crate) type RawBatchOutputs<W> = Vec<Option<(PosteriorMatrix<W>, W)>>;

/// Batch recursion with per-member empty lattices reported as `None` instead
/// of failing the whole call; dimension problems still fail it.
pub(crate) fn batch_members_raw<W: Semifield>(
    bg: &BatchGraph<W>,
    likelihoods: &[LikelihoodTensor<W>],
) -> Result<RawBatchOutputs<W>, InferenceError> {
    let members = bg.members();
    if likelihoods.len() != members {
        return Err(InferenceError::BatchArity {
            expected: members,
            actual: likelihoods.len(),
        });
    }
    for (member, tensor) in likelihoods.iter().enumerate() {
        if tensor.num_states() != bg.member_states(member) {
            return Err(InferenceError::MemberStateMismatch {
                member,
                expected: bg.member_states(member),
                actual: tensor.num_states(),
            });
        }
        if tensor.num_frames() != bg.lengths()[member] {
            return Err(InferenceError::MemberFrameMismatch {
                member,
                expected: bg.lengths()[member],
                actual: tensor.num_frames(),
            });
        }
    }

    let augmented: Vec<WeightedGraph<W>> = (0..members)
        .map(|m| add_phony_final(&bg.slice_member(m)))
        .collect();
    let steps = bg.lengths().iter().max().copied().unwrap_or(0) + 1;
    let padded = compose_batch(&augmented, &vec![steps; members])
        .expect("augmented batch is non-empty and well-formed");
    let system = padded.composed();
    let total_states = system.num_states();

    let mut columns: Vec<Vec<W>> = Vec::with_capacity(steps);
    for n in 0..steps {
        let mut column = Vec::with_capacity(total_states);
        for (member, tensor) in likelihoods.iter().enumerate() {
            let states = bg.member_states(member);
            if n < bg.lengths()[member] {
                column.extend((0..states).map(|k| tensor.get(k, n)));
                column.push(W::zero());
            } else {
                column.extend(std::iter::repeat_n(W::zero(), states));
                column.push(W::one());
            }
        }
        columns.push(column);
    }
    let stacked = LikelihoodTensor::new(DenseMatrix::from_columns(total_states, &columns)?);

    let alphas = forward(system, &stacked)?;
    let betas = backward(system, &stacked)?;

    let mut results = Vec::with_capacity(members);
    for member in 0..members {
        let offset = padded.offsets()[member];
        let states = bg.member_states(member);
        let frames = bg.lengths()[member];
        let phony = offset + states;
        // The phony state's final α is exactly the member's lattice weight:
        // the arcs into it apply omega and its 1̄ self-loop preserves the
        // value through the padding.
        let log_z = alphas.get(phony, steps - 1);
        if log_z.is_zero() {
            results.push(None);
            continue;
        }
        let mut data = Vec::with_capacity(states * frames);
        for k in 0..states {
            for n in 0..frames {
                let cell = alphas.get(offset + k, n).otimes(betas.get(offset + k, n));
                data.push(cell.oslash(log_z).expect("non-0̄ divisor checked above"));
            }
        }
        results.push(Some((
            PosteriorMatrix::from_values(DenseMatrix::new(states, frames, data)?),
            log_z,
        )));
    }
    Ok(results)
}
