//! Deterministic synthetic graph generation for tests and benchmarks.

use std::collections::HashSet;
use std::fmt;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GraphError, WeightedGraph};
use crate::semiring::{LogWeight, Semiring};
use crate::sparse::{SparseMatrix, SparseVector};

/// Shape family of a generated graph.
///
/// `LeftToRightAlignment` mimics utterance alignment graphs: a self-looping
/// chain with a few forward skips and a single final state. `ErgodicNgram`
/// mimics phonotactic language-model graphs: a strongly connected ring with
/// many random arcs and several final states; state 0 is initial *and* final
/// with a self-loop, so a non-empty lattice exists for every frame count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    LeftToRightAlignment,
    ErgodicNgram,
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::LeftToRightAlignment => write!(f, "alignment"),
            GraphKind::ErgodicNgram => write!(f, "ngram"),
        }
    }
}

/// Generates a trim graph with exactly `num_states` states and `num_arcs`
/// stored weights, where the arc budget counts transition entries plus final
/// weights. Deterministic for a given (states, arcs, seed, kind) quadruple.
///
/// Arc weights are logs of per-state normalized random positives, the final
/// weight participating in its state's normalization, so the graph is close
/// to stochastic when transitions and finals are counted together.
///
/// Alignment graphs accept only paths of at least `num_states` frames;
/// ngram graphs accept every positive frame count.
pub fn random_graph(
    num_states: usize,
    num_arcs: usize,
    seed: u64,
    kind: GraphKind,
) -> Result<WeightedGraph<LogWeight>, GraphError> {
    if num_states == 0 {
        return Err(GraphError::NoStates);
    }
    let infeasible = |detail: String| GraphError::InfeasibleShape {
        kind,
        states: num_states,
        arcs: num_arcs,
        detail,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = num_states;

    // (arc set, final states) with |arcs| + |finals| == num_arcs.
    let (arcs, final_states): (Vec<(usize, usize)>, Vec<usize>) = match kind {
        GraphKind::LeftToRightAlignment => {
            // K self-loops + (K-1) chain arcs + 1 final weight, then forward
            // skips (i → j, j ≥ i+2).
            let base = 2 * k;
            let max_skips = if k >= 2 { (k - 1) * (k - 2) / 2 } else { 0 };
            if num_arcs < base || num_arcs > base + max_skips {
                return Err(infeasible(format!(
                    "alignment graphs need between {base} and {} arcs",
                    base + max_skips
                )));
            }
            let mut set: HashSet<(usize, usize)> = HashSet::new();
            for i in 0..k {
                set.insert((i, i));
                if i + 1 < k {
                    set.insert((i, i + 1));
                }
            }
            let mut remaining = num_arcs - base;
            while remaining > 0 {
                let src = rng.random_range(0..k - 2);
                let dst = rng.random_range(src + 2..k);
                if set.insert((src, dst)) {
                    remaining -= 1;
                }
            }
            let mut arcs: Vec<(usize, usize)> = set.into_iter().collect();
            arcs.sort_unstable();
            (arcs, vec![k - 1])
        }
        GraphKind::ErgodicNgram => {
            // Directed ring for strong connectivity, a self-loop on state 0,
            // one final per ~64 states (state 0 always final), then random
            // filler arcs anywhere.
            let num_finals = (k / 64).max(1);
            let mut set: HashSet<(usize, usize)> = HashSet::new();
            for i in 0..k {
                set.insert((i, (i + 1) % k));
            }
            set.insert((0, 0));
            let base = set.len() + num_finals;
            if num_arcs < base || num_arcs > k * k + num_finals {
                return Err(infeasible(format!(
                    "ngram graphs need between {base} and {} arcs",
                    k * k + num_finals
                )));
            }
            let mut finals: Vec<usize> = vec![0];
            let mut final_set: HashSet<usize> = finals.iter().copied().collect();
            while finals.len() < num_finals {
                let s = rng.random_range(0..k);
                if final_set.insert(s) {
                    finals.push(s);
                }
            }
            finals.sort_unstable();
            let mut remaining = num_arcs - set.len() - num_finals;
            while remaining > 0 {
                let src = rng.random_range(0..k);
                let dst = rng.random_range(0..k);
                if set.insert((src, dst)) {
                    remaining -= 1;
                }
            }
            let mut arcs: Vec<(usize, usize)> = set.into_iter().collect();
            arcs.sort_unstable();
            (arcs, finals)
        }
    };

    // Weights: per source state, draw a positive score for each outgoing arc
    // (destination-ascending) and for the final slot if the state is final,
    // then normalize. The sorted arc list makes the draw order independent
    // of hash-set iteration, keeping generation byte-deterministic.
    let is_final: HashSet<usize> = final_states.iter().copied().collect();
    let mut triplets: Vec<(usize, usize, LogWeight)> = Vec::with_capacity(arcs.len());
    let mut final_weights: Vec<(usize, LogWeight)> = Vec::with_capacity(final_states.len());
    let mut cursor = 0;
    for state in 0..k {
        let row_start = cursor;
        while cursor < arcs.len() && arcs[cursor].0 == state {
            cursor += 1;
        }
        let out_arcs = &arcs[row_start..cursor];
        let state_is_final = is_final.contains(&state);
        let slots = out_arcs.len() + usize::from(state_is_final);
        if slots == 0 {
            continue;
        }
        let scores: Vec<f64> = (0..slots).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = scores.iter().sum();
        for (&(src, dst), &score) in out_arcs.iter().zip(&scores) {
            triplets.push((src, dst, LogWeight::new((score / total).ln())?));
        }
        if state_is_final {
            let score = scores[out_arcs.len()];
            final_weights.push((state, LogWeight::new((score / total).ln())?));
        }
    }

    let initial = SparseVector::new(k, vec![(0, LogWeight::one())])?;
    let graph = WeightedGraph::new(
        SparseMatrix::from_triplets(k, k, &triplets)?,
        initial,
        SparseVector::new(k, final_weights)?,
    )?;
    debug_assert!(graph.is_trim());
    Ok(graph)
}
