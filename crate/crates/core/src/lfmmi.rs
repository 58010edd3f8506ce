//! LF-MMI objective value and gradient.
//!
//! For one utterance with network outputs `Φ` (entry `(i, n)` read as
//! `log p(x_n | z_n = i)`), a numerator graph (the utterance-specific
//! alignment automaton) and a denominator graph (the competing-hypothesis
//! language model over the same emission index space):
//!
//! ```text
//! L     = logZ_num − logZ_den
//! ∂L/∂φ = γ_num − γ_den            (probability-domain posteriors)
//! ```
//!
//! Both lattices are computed exactly in the log-semifield; there is no
//! leaky-HMM style approximation and none is available as an option. The
//! loss is per utterance, unnormalized by frame count; callers that want a
//! per-frame loss divide by [`LossResult::frames`] (batch totals expose the
//! frame count for the same reason).

use thiserror::Error;

use crate::fsm::{compose_batch, GraphError, WeightedGraph};
use crate::inference::{batch_members_raw, forward_backward, InferenceError, LikelihoodTensor};
use crate::semiring::LogWeight;
use crate::sparse::DenseMatrix;

#[derive(Debug, Error)]
pub enum LfmmiError {
    #[error(
        "numerator lattice is empty{}: the alignment admits no path of this length",
        .utterance.map(|u| format!(" for utterance {u}")).unwrap_or_default()
    )]
    EmptyNumerator { utterance: Option<usize> },
    #[error(
        "denominator lattice is empty{}",
        .utterance.map(|u| format!(" for utterance {u}")).unwrap_or_default()
    )]
    EmptyDenominator { utterance: Option<usize> },
    #[error(
        "emission spaces disagree: numerator has {num} states, denominator {den}, likelihoods {phi}"
    )]
    EmissionSpaceMismatch { num: usize, den: usize, phi: usize },
    #[error("batch arity mismatch: {nums} numerator graphs but {phis} likelihood tensors")]
    BatchArity { nums: usize, phis: usize },
    #[error("batch must contain at least one utterance")]
    EmptyBatch,
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Loss, gradient and the two lattice weights behind them.
///
/// Gradient entries are differences of probabilities, so they lie in
/// [−1, 1] and every frame's column sums to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LossResult {
    pub loss: f64,
    /// `∂L/∂φ_{n,i}` as a K × N matrix of plain reals.
    pub grad: DenseMatrix<f64>,
    pub log_z_num: LogWeight,
    pub log_z_den: LogWeight,
}

impl LossResult {
    pub fn frames(&self) -> usize {
        self.grad.cols()
    }
}

/// Per-utterance results of a batch plus their running totals.
#[derive(Debug)]
pub struct BatchLoss {
    /// One result per utterance; failures (e.g. an utterance whose
    /// numerator admits no path of the given length) are reported per
    /// member and excluded from the totals.
    pub members: Vec<Result<LossResult, LfmmiError>>,
    /// Summed loss over the successful members.
    pub total_loss: f64,
    /// Summed frame count over the successful members, for callers that
    /// normalize or accumulate gradients over several batches.
    pub total_frames: usize,
}

fn check_emission_space(
    num: &WeightedGraph<LogWeight>,
    den: &WeightedGraph<LogWeight>,
    phi: &LikelihoodTensor<LogWeight>,
) -> Result<(), LfmmiError> {
    if num.num_states() != den.num_states() || num.num_states() != phi.num_states() {
        return Err(LfmmiError::EmissionSpaceMismatch {
            num: num.num_states(),
            den: den.num_states(),
            phi: phi.num_states(),
        });
    }
    Ok(())
}

fn grad_from_posteriors(
    num: &crate::inference::PosteriorMatrix<LogWeight>,
    den: &crate::inference::PosteriorMatrix<LogWeight>,
) -> DenseMatrix<f64> {
    let np = num.probabilities();
    let dp = den.probabilities();
    let data: Vec<f64> = np
        .data()
        .iter()
        .zip(dp.data())
        .map(|(a, b)| a - b)
        .collect();
    DenseMatrix::new(np.rows(), np.cols(), data).expect("posterior shapes agree")
}

/// LF-MMI loss and gradient for one utterance.
pub fn lfmmi(
    num: &WeightedGraph<LogWeight>,
    den: &WeightedGraph<LogWeight>,
    phi: &LikelihoodTensor<LogWeight>,
) -> Result<LossResult, LfmmiError> {
    check_emission_space(num, den, phi)?;
    let (num_post, log_z_num) = forward_backward(num, phi).map_err(|e| match e {
        InferenceError::EmptyLattice { .. } => LfmmiError::EmptyNumerator { utterance: None },
        other => other.into(),
    })?;
    let (den_post, log_z_den) = forward_backward(den, phi).map_err(|e| match e {
        InferenceError::EmptyLattice { .. } => LfmmiError::EmptyDenominator { utterance: None },
        other => other.into(),
    })?;
    Ok(LossResult {
        loss: log_z_num.value() - log_z_den.value(),
        grad: grad_from_posteriors(&num_post, &den_post),
        log_z_num,
        log_z_den,
    })
}

/// LF-MMI over a batch of utterances sharing one denominator graph.
///
/// Numerators and the replicated denominator each run as one block-diagonal
/// batched recursion, so per-member results are bit-identical to solo
/// [`lfmmi`] calls. Utterance-level failures (mismatched emission spaces,
/// empty lattices) are reported per member; only batch-level arity problems
/// fail the whole call.
pub fn lfmmi_batch(
    nums: &[WeightedGraph<LogWeight>],
    den: &WeightedGraph<LogWeight>,
    phis: &[LikelihoodTensor<LogWeight>],
) -> Result<BatchLoss, LfmmiError> {
    if nums.is_empty() {
        return Err(LfmmiError::EmptyBatch);
    }
    if nums.len() != phis.len() {
        return Err(LfmmiError::BatchArity {
            nums: nums.len(),
            phis: phis.len(),
        });
    }

    let mut members: Vec<Option<LfmmiError>> = Vec::with_capacity(nums.len());
    let mut valid: Vec<usize> = Vec::new();
    for (u, (num, phi)) in nums.iter().zip(phis).enumerate() {
        match check_emission_space(num, den, phi) {
            Ok(()) => {
                members.push(None);
                valid.push(u);
            }
            Err(e) => members.push(Some(e)),
        }
    }

    let mut results: Vec<Option<Result<LossResult, LfmmiError>>> =
        members.into_iter().map(|e| e.map(Err)).collect();

    if !valid.is_empty() {
        let lengths: Vec<usize> = valid.iter().map(|&u| phis[u].num_frames()).collect();
        let num_graphs: Vec<WeightedGraph<LogWeight>> =
            valid.iter().map(|&u| nums[u].clone()).collect();
        let den_graphs: Vec<WeightedGraph<LogWeight>> = vec![den.clone(); valid.len()];
        let tensors: Vec<LikelihoodTensor<LogWeight>> =
            valid.iter().map(|&u| phis[u].clone()).collect();

        let num_batch = compose_batch(&num_graphs, &lengths)?;
        let den_batch = compose_batch(&den_graphs, &lengths)?;
        let num_out = batch_members_raw(&num_batch, &tensors)?;
        let den_out = batch_members_raw(&den_batch, &tensors)?;

        for ((&u, num_member), den_member) in valid.iter().zip(num_out).zip(den_out) {
            let result = match (num_member, den_member) {
                (None, _) => Err(LfmmiError::EmptyNumerator { utterance: Some(u) }),
                (_, None) => Err(LfmmiError::EmptyDenominator { utterance: Some(u) }),
                (Some((num_post, log_z_num)), Some((den_post, log_z_den))) => Ok(LossResult {
                    loss: log_z_num.value() - log_z_den.value(),
                    grad: grad_from_posteriors(&num_post, &den_post),
                    log_z_num,
                    log_z_den,
                }),
            };
            results[u] = Some(result);
        }
    }

    let members: Vec<Result<LossResult, LfmmiError>> = results
        .into_iter()
        .map(|r| r.expect("every member was assigned a result"))
        .collect();
    let total_loss = members
        .iter()
        .filter_map(|m| m.as_ref().ok())
        .map(|m| m.loss)
        .sum();
    let total_frames = members
        .iter()
        .filter_map(|m| m.as_ref().ok())
        .map(|m| m.frames())
        .sum();
    Ok(BatchLoss {
        members,
        total_loss,
        total_frames,
    })
}
