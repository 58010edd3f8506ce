//! Brute-force path enumeration: the independent reference the fast
//! recursions are tested against.
//!
//! Every length-N state sequence is scored as
//! `pi(s_1) ⊗ Π_n v_n(s_n) ⊗ Π_n T(s_{n-1}, s_n) ⊗ omega(s_N)` and the
//! scores are combined with log-domain ⊕ (for the total and the posteriors)
//! and with max (for the best path). Sums run in the probability domain
//! after shifting by the maximum score, with Kahan compensation, so the
//! result is accurate to a few ulps — independent of the sequential
//! log-sum-exp route the recursions take.

use super::{InferenceError, LikelihoodTensor, PosteriorMatrix, ViterbiPath};
use crate::fsm::WeightedGraph;
use crate::semiring::{LogWeight, Semiring, TropicalWeight};
use crate::sparse::DenseMatrix;

/// `K^N` must stay at or below this many paths.
pub const ENUMERATION_GUARD: u64 = 10_000_000;

/// Exhaustive reference results for one lattice.
#[derive(Debug, Clone)]
pub struct BruteForce {
    /// Total lattice weight; 0̄ when no accepting path carries weight.
    pub log_z: LogWeight,
    /// Per-frame state posteriors (all-0̄ for an empty lattice).
    pub posteriors: PosteriorMatrix<LogWeight>,
    /// Highest-scoring path; empty with score 0̄ for an empty lattice.
    pub best: ViterbiPath,
}

struct Kahan {
    sum: f64,
    compensation: f64,
}

impl Kahan {
    fn new() -> Self {
        Kahan {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    fn add(&mut self, x: f64) {
        let y = x - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }
}

fn advance(path: &mut [usize], states: usize) -> bool {
    for slot in path.iter_mut().rev() {
        if *slot + 1 < states {
            *slot += 1;
            return true;
        }
        *slot = 0;
    }
    false
}

/// Enumerates all `K^N` state sequences. Guarded: errors when the space
/// exceeds [`ENUMERATION_GUARD`].
pub fn brute_force(
    g: &WeightedGraph<LogWeight>,
    likelihoods: &LikelihoodTensor<LogWeight>,
) -> Result<BruteForce, InferenceError> {
    if g.num_states() != likelihoods.num_states() {
        return Err(InferenceError::StateMismatch {
            expected: g.num_states(),
            actual: likelihoods.num_states(),
        });
    }
    let states = g.num_states();
    let frames = likelihoods.num_frames();
    let in_guard = (states as u64)
        .checked_pow(frames as u32)
        .is_some_and(|total| total <= ENUMERATION_GUARD);
    if !in_guard {
        return Err(InferenceError::EnumerationGuard {
            states,
            frames,
            limit: ENUMERATION_GUARD,
        });
    }

    let pi = g.initial().to_dense();
    let omega = g.finals().to_dense();
    // Same association order as the recursions unrolled along one path, so
    // the tropical maximum matches the Viterbi score exactly.
    let score_of = |path: &[usize]| -> f64 {
        let mut acc = pi[path[0]].value();
        acc += likelihoods.get(path[0], 0).value();
        for n in 1..frames {
            acc += g.transitions().lookup(path[n - 1], path[n]).value();
            acc += likelihoods.get(path[n], n).value();
        }
        acc + omega[path[frames - 1]].value()
    };

    // Pass 1: maximum and argmax (first maximum in lexicographic order).
    let mut best_score = f64::NEG_INFINITY;
    let mut best_path: Vec<usize> = Vec::new();
    let mut path = vec![0usize; frames];
    loop {
        let s = score_of(&path);
        if s > best_score {
            best_score = s;
            best_path = path.clone();
        }
        if !advance(&mut path, states) {
            break;
        }
    }

    if best_score == f64::NEG_INFINITY {
        let zeros = DenseMatrix::filled(states, frames, LogWeight::zero())
            .expect("lattice dimensions are positive");
        return Ok(BruteForce {
            log_z: LogWeight::zero(),
            posteriors: PosteriorMatrix::from_values(zeros),
            best: ViterbiPath {
                states: Vec::new(),
                score: TropicalWeight::zero(),
            },
        });
    }

    // Pass 2: compensated sums in the probability domain, shifted by the
    // maximum so the best path contributes exactly 1.
    let mut total = Kahan::new();
    let mut cells: Vec<Kahan> = (0..states * frames).map(|_| Kahan::new()).collect();
    let mut path = vec![0usize; frames];
    loop {
        let s = score_of(&path);
        if s != f64::NEG_INFINITY {
            let w = (s - best_score).exp();
            total.add(w);
            for (n, &state) in path.iter().enumerate() {
                cells[state * frames + n].add(w);
            }
        }
        if !advance(&mut path, states) {
            break;
        }
    }

    let log_z = LogWeight::new(best_score + total.sum.ln()).expect("finite total");
    let gamma: Vec<LogWeight> = cells
        .iter()
        .map(|cell| LogWeight::new((cell.sum / total.sum).ln()).expect("posterior ratio in [0, 1]"))
        .collect();
    let posteriors = PosteriorMatrix::from_values(
        DenseMatrix::new(states, frames, gamma).expect("lattice dimensions are positive"),
    );
    Ok(BruteForce {
        log_z,
        posteriors,
        best: ViterbiPath {
            states: best_path,
            score: TropicalWeight::new(best_score).expect("finite best score"),
        },
    })
}
