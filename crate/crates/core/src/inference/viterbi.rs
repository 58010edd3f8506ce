//! Best-path decoding: the forward recursion over the tropical semiring plus
//! backpointers.

use super::{InferenceError, LikelihoodTensor};
use crate::fsm::WeightedGraph;
use crate::semiring::{LogWeight, Semiring, TropicalWeight};
use crate::sparse::hadamard;

/// A best state sequence and its tropical score:
/// `pi(s_1) + Σ_n φ_n(s_n) + Σ_n T(s_{n-1}, s_n) + omega(s_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViterbiPath {
    pub states: Vec<usize>,
    pub score: TropicalWeight,
}

/// Decodes the highest-scoring state sequence.
///
/// This is the forward recursion instantiated over [`TropicalWeight`]: ⊕
/// becomes max, so `δ_n = v_n ∘ (Tᵀ δ_{n-1})` carries best-prefix scores and
/// backpointers recover the argmax. Ties break toward the lowest state index
/// at every argmax.
pub fn viterbi(
    g: &WeightedGraph<LogWeight>,
    likelihoods: &LikelihoodTensor<LogWeight>,
) -> Result<ViterbiPath, InferenceError> {
    if g.num_states() != likelihoods.num_states() {
        return Err(InferenceError::StateMismatch {
            expected: g.num_states(),
            actual: likelihoods.num_states(),
        });
    }
    let tg: WeightedGraph<TropicalWeight> = g
        .convert()
        .expect("log weights embed losslessly into the tropical semiring");
    let tv: LikelihoodTensor<TropicalWeight> = likelihoods
        .convert()
        .expect("log weights embed losslessly into the tropical semiring");

    let states = g.num_states();
    let frames = tv.num_frames();
    let mut delta = hadamard(&tv.frame(0), &tg.initial().to_dense())?;
    // backpointers[n - 1][j]: best predecessor of state j at frame n.
    let mut backpointers: Vec<Vec<usize>> = Vec::with_capacity(frames.saturating_sub(1));
    for n in 1..frames {
        let mut next = vec![TropicalWeight::zero(); states];
        let mut pointers = vec![usize::MAX; states];
        let frame = tv.frame(n);
        for j in 0..states {
            let (rows, vals) = tg.transitions().col_entries(j);
            let mut best = TropicalWeight::zero();
            let mut best_pred = usize::MAX;
            for (&i, &w) in rows.iter().zip(vals) {
                let candidate = w.otimes(delta[i]);
                // Strict improvement over ascending predecessors keeps the
                // lowest index on ties.
                if candidate.value() > best.value() {
                    best = candidate;
                    best_pred = i;
                }
            }
            next[j] = frame[j].otimes(best);
            pointers[j] = best_pred;
        }
        delta = next;
        backpointers.push(pointers);
    }

    let mut best = TropicalWeight::zero();
    let mut best_final = usize::MAX;
    for &(state, w) in tg.finals().entries() {
        let candidate = delta[state].otimes(w);
        if candidate.value() > best.value() {
            best = candidate;
            best_final = state;
        }
    }
    if best_final == usize::MAX {
        return Err(InferenceError::EmptyLattice { member: None });
    }

    let mut path = vec![0usize; frames];
    path[frames - 1] = best_final;
    for n in (1..frames).rev() {
        let pred = backpointers[n - 1][path[n]];
        debug_assert_ne!(
            pred,
            usize::MAX,
            "finite score implies a complete backtrace"
        );
        path[n - 1] = pred;
    }
    Ok(ViterbiPath {
        states: path,
        score: best,
    })
}

/// Re-scores a state sequence arc by arc, with the same operation order as
/// the Viterbi recursion: a path returned by [`viterbi`] re-scores to its
/// reported score exactly.
pub fn score_path(
    g: &WeightedGraph<LogWeight>,
    likelihoods: &LikelihoodTensor<LogWeight>,
    states: &[usize],
) -> Result<TropicalWeight, InferenceError> {
    if g.num_states() != likelihoods.num_states() {
        return Err(InferenceError::StateMismatch {
            expected: g.num_states(),
            actual: likelihoods.num_states(),
        });
    }
    if states.len() != likelihoods.num_frames() {
        return Err(InferenceError::InvalidPath(format!(
            "path has {} states but the lattice has {} frames",
            states.len(),
            likelihoods.num_frames()
        )));
    }
    if let Some(&bad) = states.iter().find(|&&s| s >= g.num_states()) {
        return Err(InferenceError::InvalidPath(format!(
            "state {bad} out of range for a {}-state graph",
            g.num_states()
        )));
    }
    let embed = |w: LogWeight| {
        TropicalWeight::from_log_prob(w.to_log_prob())
            .expect("log weights embed losslessly into the tropical semiring")
    };
    let mut acc = embed(g.initial().get(states[0]));
    acc = embed(likelihoods.get(states[0], 0)).otimes(acc);
    for n in 1..states.len() {
        acc = embed(g.transitions().lookup(states[n - 1], states[n])).otimes(acc);
        acc = embed(likelihoods.get(states[n], n)).otimes(acc);
    }
    Ok(acc.otimes(embed(g.finals().get(states[states.len() - 1]))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::Semiring;
    use crate::sparse::{SparseMatrix, SparseVector};

    fn lw(v: f64) -> LogWeight {
        LogWeight::new(v).unwrap()
    }

    fn tensor(rows: usize, cols: usize, values: &[f64]) -> LikelihoodTensor {
        LikelihoodTensor::from_log_probs(rows, cols, values).unwrap()
    }

    #[test]
    fn one_state_path() {
        let g = WeightedGraph::new(
            SparseMatrix::from_triplets(1, 1, &[(0, 0, LogWeight::one())]).unwrap(),
            SparseVector::new(1, vec![(0, LogWeight::one())]).unwrap(),
            SparseVector::new(1, vec![(0, LogWeight::one())]).unwrap(),
        )
        .unwrap();
        let v = tensor(1, 3, &[-1.0, -2.0, -3.0]);
        let path = viterbi(&g, &v).unwrap();
        assert_eq!(path.states, vec![0, 0, 0]);
        assert_eq!(path.score.value(), -6.0);
        assert_eq!(score_path(&g, &v, &path.states).unwrap(), path.score);
    }

    #[test]
    fn picks_the_better_branch() {
        // Two disjoint branches from state 0: through 1 (cheap) or 2 (dear).
        let g = WeightedGraph::new(
            SparseMatrix::from_triplets(
                4,
                4,
                &[
                    (0, 1, lw(-0.5)),
                    (0, 2, lw(-2.0)),
                    (1, 3, lw(-0.5)),
                    (2, 3, lw(-0.5)),
                ],
            )
            .unwrap(),
            SparseVector::new(4, vec![(0, LogWeight::one())]).unwrap(),
            SparseVector::new(4, vec![(3, LogWeight::one())]).unwrap(),
        )
        .unwrap();
        let v = tensor(4, 3, &[0.0; 12]);
        let path = viterbi(&g, &v).unwrap();
        assert_eq!(path.states, vec![0, 1, 3]);
        assert_eq!(path.score.value(), -1.0);
    }

    #[test]
    fn ties_break_toward_the_lowest_state() {
        // Both middle states are equally good.
        let g = WeightedGraph::new(
            SparseMatrix::from_triplets(
                4,
                4,
                &[
                    (0, 1, lw(-1.0)),
                    (0, 2, lw(-1.0)),
                    (1, 3, lw(-1.0)),
                    (2, 3, lw(-1.0)),
                ],
            )
            .unwrap(),
            SparseVector::new(4, vec![(0, LogWeight::one())]).unwrap(),
            SparseVector::new(4, vec![(3, LogWeight::one())]).unwrap(),
        )
        .unwrap();
        let v = tensor(4, 3, &[0.0; 12]);
        let path = viterbi(&g, &v).unwrap();
        assert_eq!(path.states, vec![0, 1, 3]);
    }

    #[test]
    fn viterbi_score_never_exceeds_log_marginal() {
        let g = WeightedGraph::new(
            SparseMatrix::from_triplets(
                2,
                2,
                &[(0, 0, lw(-0.6)), (0, 1, lw(-0.8)), (1, 1, lw(-0.2))],
            )
            .unwrap(),
            SparseVector::new(2, vec![(0, LogWeight::one())]).unwrap(),
            SparseVector::new(2, vec![(1, LogWeight::one())]).unwrap(),
        )
        .unwrap();
        let v = tensor(2, 4, &[-0.1, -0.9, -0.4, -0.3, -0.7, -0.2, -0.8, -0.6]);
        let best = viterbi(&g, &v).unwrap();
        let (_, log_z) = crate::inference::forward_backward(&g, &v).unwrap();
        assert!(best.score.value() <= log_z.value());
    }

    #[test]
    fn empty_lattice_is_an_error() {
        // Final state unreachable within the frame budget.
        let g = WeightedGraph::new(
            SparseMatrix::from_triplets(3, 3, &[(0, 1, lw(-0.1)), (1, 2, lw(-0.1))]).unwrap(),
            SparseVector::new(3, vec![(0, LogWeight::one())]).unwrap(),
            SparseVector::new(3, vec![(2, LogWeight::one())]).unwrap(),
        )
        .unwrap();
        let v = tensor(3, 2, &[0.0; 6]);
        assert!(matches!(
            viterbi(&g, &v),
            Err(InferenceError::EmptyLattice { member: None })
        ));
    }
}
