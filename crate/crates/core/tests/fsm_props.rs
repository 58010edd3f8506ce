//! Property tests for graph serialization, batching and the phony-final
//! padding rule.

use proptest::prelude::*;

use sfb_core::fsm::{
    add_phony_final, compose_batch, load_graph, random_graph, save_graph, GraphKind, WeightedGraph,
};
use sfb_core::inference::{brute_force, forward, log_marginal, LikelihoodTensor};
use sfb_core::semiring::{LogWeight, Semiring};
use sfb_core::sparse::DenseMatrix;

fn arb_graph() -> impl Strategy<Value = WeightedGraph<LogWeight>> {
    (2usize..=5, 0u64..1000, prop::bool::ANY, 0usize..=4).prop_map(|(k, seed, alignment, extra)| {
        if alignment {
            let skips = extra.min((k - 1) * (k - 2) / 2);
            random_graph(k, 2 * k + skips, seed, GraphKind::LeftToRightAlignment).unwrap()
        } else {
            let arcs = (2 * k + 2 + extra).min(k * k + 1);
            random_graph(k, arcs, seed, GraphKind::ErgodicNgram).unwrap()
        }
    })
}

fn likelihoods(k: usize, frames: usize, seed: u64) -> LikelihoodTensor<LogWeight> {
    // Cheap deterministic pseudo-likelihoods in [−3, 0].
    let data: Vec<LogWeight> = (0..k * frames)
        .map(|i| {
            let x = ((seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add((i as u64).wrapping_mul(1442695040888963407))
                % 1000) as f64)
                / 1000.0;
            LogWeight::new(-3.0 * x).unwrap()
        })
        .collect();
    LikelihoodTensor::new(DenseMatrix::new(k, frames, data).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip_recovers_the_graph(g in arb_graph()) {
        let text = save_graph(&g);
        let reparsed = load_graph(text.as_bytes()).unwrap();
        prop_assert_eq!(&reparsed, &g);
        // And the serialization itself is canonical.
        prop_assert_eq!(save_graph(&reparsed), text);
    }

    #[test]
    fn compose_then_slice_recovers_each_member(
        a in arb_graph(),
        b in arb_graph(),
        c in arb_graph(),
    ) {
        let members = [a, b, c];
        let batch = compose_batch(&members, &[4, 6, 5]).unwrap();
        let total: usize = members.iter().map(|g| g.num_states()).sum();
        prop_assert_eq!(batch.composed().num_states(), total);
        for (i, g) in members.iter().enumerate() {
            prop_assert_eq!(&batch.slice_member(i), g);
        }
    }

    #[test]
    fn generated_graphs_are_trim_and_deterministic(
        k in 2usize..=8,
        extra in 0usize..=6,
        seed in 0u64..500,
    ) {
        let skips = extra.min((k - 1) * (k - 2) / 2);
        let g1 = random_graph(k, 2 * k + skips, seed, GraphKind::LeftToRightAlignment).unwrap();
        let g2 = random_graph(k, 2 * k + skips, seed, GraphKind::LeftToRightAlignment).unwrap();
        prop_assert_eq!(save_graph(&g1), save_graph(&g2));
        prop_assert!(g1.is_trim());
        let ngram_arcs = (2 * k + 2 + extra).min(k * k + 1);
        let d1 = random_graph(k, ngram_arcs, seed, GraphKind::ErgodicNgram).unwrap();
        prop_assert!(d1.is_trim());
        prop_assert_eq!(d1.num_arcs() + d1.finals().nnz(), ngram_arcs);
    }

    #[test]
    fn phony_final_preserves_the_lattice_weight_under_padding(
        k in 2usize..=4,
        seed in 0u64..200,
        padding in 1usize..=3,
    ) {
        // A graph accepting exactly-k-frame paths, padded past its length.
        let skips = if k >= 3 { 1 } else { 0 };
        let g = random_graph(k, 2 * k + skips, seed, GraphKind::LeftToRightAlignment).unwrap();
        let frames = k + 1;
        let v = likelihoods(k, frames, seed);

        let padded_graph = add_phony_final(&g);
        let padded_frames = frames + padding;
        let mut data: Vec<LogWeight> = Vec::new();
        for state in 0..=k {
            for n in 0..padded_frames {
                let w = if n < frames {
                    if state < k { v.get(state, n) } else { LogWeight::zero() }
                } else if state == k {
                    LogWeight::one()
                } else {
                    LogWeight::zero()
                };
                data.push(w);
            }
        }
        let padded_v = LikelihoodTensor::new(DenseMatrix::new(k + 1, padded_frames, data).unwrap());

        // The recursion gives bit-identical lattice weights…
        let base = log_marginal(&forward(&g, &v).unwrap(), g.finals()).unwrap();
        let padded = log_marginal(
            &forward(&padded_graph, &padded_v).unwrap(),
            padded_graph.finals(),
        )
        .unwrap();
        prop_assert_eq!(base, padded);

        // …and the independent path enumeration agrees on both systems.
        let oracle_base = brute_force(&g, &v).unwrap();
        let oracle_padded = brute_force(&padded_graph, &padded_v).unwrap();
        prop_assert!((oracle_base.log_z.value() - base.value()).abs() < 1e-10);
        prop_assert!((oracle_padded.log_z.value() - base.value()).abs() < 1e-10);
    }
}
