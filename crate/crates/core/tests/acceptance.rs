//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `--nocapture` to see the lines for passing criteria).
//!
//! Criteria 1–9 live here; criterion 10 (benchmark protocol fidelity) drives
//! the CLI binary and lives in the CLI crate's acceptance suite.

use std::panic;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sfb_core::fsm::{compose_batch, random_graph, GraphKind, WeightedGraph};
use sfb_core::inference::{
    brute_force, forward, forward_backward, forward_backward_batch, log_marginal, raw_marginal,
    score_path, viterbi, InferenceError, LikelihoodTensor,
};
use sfb_core::lfmmi::lfmmi;
use sfb_core::semiring::{LogWeight, ProbWeight, Semifield, Semiring, TropicalWeight};
use sfb_core::sparse::DenseMatrix;

fn criterion<F>(id: usize, name: &str, body: F)
where
    F: FnOnce() + panic::UnwindSafe,
{
    match panic::catch_unwind(body) {
        Ok(()) => println!("acceptance criterion {id:02} ({name}): PASS"),
        Err(cause) => {
            println!("acceptance criterion {id:02} ({name}): FAIL");
            panic::resume_unwind(cause);
        }
    }
}

fn random_tensor(
    rng: &mut ChaCha8Rng,
    states: usize,
    frames: usize,
    lo: f64,
    hi: f64,
) -> LikelihoodTensor {
    let data: Vec<LogWeight> = (0..states * frames)
        .map(|_| LogWeight::new(rng.random_range(lo..hi)).unwrap())
        .collect();
    LikelihoodTensor::new(DenseMatrix::new(states, frames, data).unwrap())
}

/// Random case within the oracle guard: K ≤ 6, arcs ≤ 12, N ≤ 7.
fn oracle_case(case: u64) -> (WeightedGraph, LikelihoodTensor) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_5500 + case);
    let alignment = case.is_multiple_of(2);
    let (graph, states) = if alignment {
        let k = rng.random_range(2..=6usize);
        let max_skips = ((k - 1) * (k - 2) / 2).min(12 - 2 * k);
        let arcs = 2 * k + rng.random_range(0..=max_skips);
        (
            random_graph(k, arcs, rng.random(), GraphKind::LeftToRightAlignment).unwrap(),
            k,
        )
    } else {
        let k = rng.random_range(2..=6usize);
        let base = k + 2;
        let arcs = rng.random_range(base..=12.min(k * k + 1));
        (
            random_graph(k, arcs, rng.random(), GraphKind::ErgodicNgram).unwrap(),
            k,
        )
    };
    let frames = if alignment {
        rng.random_range(states..=7)
    } else {
        rng.random_range(1..=7usize)
    };
    let tensor = random_tensor(&mut rng, states, frames, -3.0, 0.0);
    (graph, tensor)
}

#[test]
fn criterion_01_oracle_equivalence_log_z() {
    criterion(1, "logZ matches brute-force path enumeration", || {
        let started = Instant::now();
        for case in 0..100 {
            let (graph, tensor) = oracle_case(case);
            let oracle = brute_force(&graph, &tensor).unwrap();
            let alphas = forward(&graph, &tensor).unwrap();
            let log_z = log_marginal(&alphas, graph.finals()).unwrap();
            let diff = (log_z.value() - oracle.log_z.value()).abs();
            assert!(diff <= 1e-10, "case {case}: |Δ logZ| = {diff:e}");
        }
        let elapsed = started.elapsed();
        assert!(
            elapsed.as_secs_f64() < 10.0,
            "took {elapsed:?}, budget 10 s"
        );
    });
}

#[test]
fn criterion_02_oracle_equivalence_posteriors() {
    criterion(2, "posteriors match brute-force path enumeration", || {
        for case in 0..100 {
            let (graph, tensor) = oracle_case(case);
            let oracle = brute_force(&graph, &tensor).unwrap();
            let (gammas, _) = forward_backward(&graph, &tensor).unwrap();
            let got = gammas.probabilities();
            let want = oracle.posteriors.probabilities();
            for k in 0..graph.num_states() {
                for n in 0..tensor.num_frames() {
                    let diff = (got.get(k, n) - want.get(k, n)).abs();
                    assert!(diff <= 1e-10, "case {case} ({k}, {n}): |Δγ| = {diff:e}");
                }
            }
        }
    });
}

#[test]
fn criterion_03_viterbi_optimality() {
    criterion(
        3,
        "Viterbi score equals brute-force max and re-scores",
        || {
            for case in 0..100 {
                let (graph, tensor) = oracle_case(case);
                let oracle = brute_force(&graph, &tensor).unwrap();
                let best = viterbi(&graph, &tensor).unwrap();
                assert_eq!(
                    best.score.value(),
                    oracle.best.score.value(),
                    "case {case}: DP max differs from enumeration max"
                );
                let rescored = score_path(&graph, &tensor, &best.states).unwrap();
                assert_eq!(rescored, best.score, "case {case}: path does not re-score");
            }
        },
    );
}

/// Random LF-MMI case: K ≤ 5, N ≤ 6, numerator and denominator over the
/// same emission space.
fn lfmmi_case(case: u64) -> (WeightedGraph, WeightedGraph, LikelihoodTensor) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xFACE_1100 + case);
    let k = rng.random_range(2..=5usize);
    let max_skips = (k - 1) * (k - 2) / 2;
    let num_arcs = 2 * k + rng.random_range(0..=max_skips.min(3));
    let num = random_graph(k, num_arcs, rng.random(), GraphKind::LeftToRightAlignment).unwrap();
    let den_arcs = rng.random_range(k + 2..=(k * k + 1).min(3 * k + 2));
    let den = random_graph(k, den_arcs, rng.random(), GraphKind::ErgodicNgram).unwrap();
    let frames = rng.random_range(k..=6);
    let phi = random_tensor(&mut rng, k, frames, -4.0, 0.0);
    (num, den, phi)
}

#[test]
fn criterion_04_lfmmi_gradient_check() {
    criterion(
        4,
        "analytic gradient matches central finite differences",
        || {
            let started = Instant::now();
            let h = 1e-4;
            for case in 0..50 {
                let (num, den, phi) = lfmmi_case(case);
                let out = lfmmi(&num, &den, &phi).unwrap();
                let base: Vec<f64> = phi.values().data().iter().map(|w| w.value()).collect();
                let (k, n) = (phi.num_states(), phi.num_frames());
                let loss_at = |values: &[f64]| {
                    let tensor = LikelihoodTensor::from_log_probs(k, n, values).unwrap();
                    lfmmi(&num, &den, &tensor).unwrap().loss
                };
                for idx in 0..base.len() {
                    let mut plus = base.clone();
                    plus[idx] += h;
                    let mut minus = base.clone();
                    minus[idx] -= h;
                    let fd = (loss_at(&plus) - loss_at(&minus)) / (2.0 * h);
                    let analytic = out.grad.data()[idx];
                    // Relative error with a floor of 1: gradient entries are
                    // bounded by 1 in magnitude, so this is never looser than
                    // an absolute 1e-5.
                    let denom = analytic.abs().max(fd.abs()).max(1.0);
                    let rel = (analytic - fd).abs() / denom;
                    assert!(
                        rel <= 1e-5,
                        "case {case} entry {idx}: analytic {analytic} vs fd {fd} (rel {rel:e})"
                    );
                }
            }
            let elapsed = started.elapsed();
            assert!(
                elapsed.as_secs_f64() < 30.0,
                "took {elapsed:?}, budget 30 s"
            );
        },
    );
}

#[test]
fn criterion_05_gradient_zero_sum() {
    criterion(5, "per-frame gradient columns sum to zero", || {
        for case in 0..50 {
            let (num, den, phi) = lfmmi_case(case);
            let out = lfmmi(&num, &den, &phi).unwrap();
            for frame in 0..phi.num_frames() {
                let sum: f64 = (0..phi.num_states()).map(|k| out.grad.get(k, frame)).sum();
                assert!(sum.abs() <= 1e-8, "case {case} frame {frame}: Σ = {sum:e}");
            }
        }
    });
}

#[test]
fn criterion_06_numerical_stability_regression() {
    criterion(
        6,
        "log domain survives where probability domain underflows",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(0x57AB_1E00);
            let graph = random_graph(10, 20, 17, GraphKind::LeftToRightAlignment).unwrap();
            let tensor = random_tensor(&mut rng, 10, 1000, -100.0, -50.0);

            // Log semifield: finite total weight, normalized posteriors.
            let (gammas, log_z) = forward_backward(&graph, &tensor).unwrap();
            assert!(log_z.value().is_finite(), "logZ = {}", log_z.value());
            let probs = gammas.probabilities();
            for n in 0..1000 {
                let sum: f64 = (0..10).map(|k| probs.get(k, n)).sum();
                assert!((sum - 1.0).abs() <= 1e-8, "frame {n}: Σγ = {sum}");
            }

            // The identical computation in the probability semiring underflows
            // to the zero element.
            let pgraph: WeightedGraph<ProbWeight> = graph.convert().unwrap();
            let ptensor: LikelihoodTensor<ProbWeight> = tensor.convert().unwrap();
            let alphas = forward(&pgraph, &ptensor).unwrap();
            let z = raw_marginal(&alphas.column(999), pgraph.finals());
            assert!(
                z.is_zero(),
                "probability-domain run failed to underflow: {z:?}"
            );
            assert!(matches!(
                forward_backward(&pgraph, &ptensor),
                Err(InferenceError::EmptyLattice { .. })
            ));
        },
    );
}

#[test]
fn criterion_07_batch_equals_sequential() {
    criterion(7, "batched runs are bit-identical to solo runs", || {
        for &batch_size in &[2usize, 4, 8] {
            let mut rng = ChaCha8Rng::seed_from_u64(0xBA7C_0000 + batch_size as u64);
            let mut graphs = Vec::new();
            let mut lengths = Vec::new();
            let mut tensors = Vec::new();
            for member in 0..batch_size {
                let (graph, _) = oracle_case(1000 + batch_size as u64 * 31 + member as u64);
                // Mixed lengths: every member gets its own frame count.
                let frames = rng.random_range(graph.num_states()..=graph.num_states() + 5);
                let tensor = random_tensor(&mut rng, graph.num_states(), frames, -3.0, 0.0);
                graphs.push(graph);
                lengths.push(frames);
                tensors.push(tensor);
            }
            let batch = compose_batch(&graphs, &lengths).unwrap();
            let results = forward_backward_batch(&batch, &tensors).unwrap();
            for member in 0..batch_size {
                let (solo_gammas, solo_z) =
                    forward_backward(&graphs[member], &tensors[member]).unwrap();
                assert_eq!(
                    results[member].1, solo_z,
                    "batch {batch_size} member {member}: logZ differs"
                );
                assert_eq!(
                    results[member].0, solo_gammas,
                    "batch {batch_size} member {member}: posteriors differ"
                );
            }
        }
    });
}

#[test]
fn criterion_08_domain_equivalence() {
    criterion(
        8,
        "log-domain and probability-domain posteriors agree",
        || {
            for case in 0..20 {
                let mut rng = ChaCha8Rng::seed_from_u64(0xD00A_2200 + case);
                let k = rng.random_range(2..=5usize);
                let graph = if case % 2 == 0 {
                    let skips = ((k - 1) * (k - 2) / 2).min(2);
                    random_graph(
                        k,
                        2 * k + skips,
                        rng.random(),
                        GraphKind::LeftToRightAlignment,
                    )
                    .unwrap()
                } else {
                    let arcs = (2 * k + 2).min(k * k + 1);
                    random_graph(k, arcs, rng.random(), GraphKind::ErgodicNgram).unwrap()
                };
                let frames = rng.random_range(k..=20);
                let tensor = random_tensor(&mut rng, k, frames, -20.0, 0.0);

                let (log_gammas, log_z) = forward_backward(&graph, &tensor).unwrap();
                let pgraph: WeightedGraph<ProbWeight> = graph.convert().unwrap();
                let ptensor: LikelihoodTensor<ProbWeight> = tensor.convert().unwrap();
                let (prob_gammas, prob_z) = forward_backward(&pgraph, &ptensor).unwrap();

                assert!((log_z.value() - prob_z.to_log_prob()).abs() <= 1e-8);
                let lp = log_gammas.probabilities();
                let pp = prob_gammas.probabilities();
                for state in 0..k {
                    for n in 0..frames {
                        let diff = (lp.get(state, n) - pp.get(state, n)).abs();
                        assert!(diff <= 1e-8, "case {case} ({state}, {n}): |Δγ| = {diff:e}");
                    }
                }
            }
        },
    );
}

fn draw_weight<W: Semifield>(rng: &mut ChaCha8Rng) -> W {
    match rng.random_range(0..20u32) {
        0 => W::zero(),
        1 => W::one(),
        _ => W::from_log_prob(rng.random_range(-50.0..50.0)).unwrap(),
    }
}

fn law_suite<W: Semifield>(name: &str, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let close = |a: W, b: W, law: &str, i: u64| {
        let (x, y) = (a.to_log_prob(), b.to_log_prob());
        if x == f64::NEG_INFINITY && y == f64::NEG_INFINITY {
            return;
        }
        assert!(
            (x - y).abs() <= 1e-10,
            "{name} {law} (triple {i}): {x} vs {y}"
        );
    };
    for i in 0..1000 {
        let a: W = draw_weight(&mut rng);
        let b: W = draw_weight(&mut rng);
        let c: W = draw_weight(&mut rng);
        close(a.oplus(b), b.oplus(a), "⊕ commutativity", i);
        close(
            a.oplus(b).oplus(c),
            a.oplus(b.oplus(c)),
            "⊕ associativity",
            i,
        );
        close(
            a.otimes(b).otimes(c),
            a.otimes(b.otimes(c)),
            "⊗ associativity",
            i,
        );
        assert_eq!(W::one().otimes(a), a, "{name}: 1̄ ⊗ a (triple {i})");
        assert_eq!(W::zero().oplus(a), a, "{name}: 0̄ ⊕ a (triple {i})");
        assert!(
            W::zero().otimes(a).is_zero(),
            "{name}: annihilator (triple {i})"
        );
        close(
            a.otimes(b.oplus(c)),
            a.otimes(b).oplus(a.otimes(c)),
            "distributivity",
            i,
        );
        if !b.is_zero() {
            close(a.otimes(b).oslash(b).unwrap(), a, "⊘ inverse", i);
        } else {
            assert!(
                a.oslash(b).is_err(),
                "{name}: ⊘ by 0̄ must fail (triple {i})"
            );
        }
    }
}

#[test]
fn criterion_09_semiring_law_suite() {
    criterion(
        9,
        "semiring laws hold for 1000 random triples per law",
        || {
            law_suite::<LogWeight>("log", 0x1AC5_0001);
            law_suite::<TropicalWeight>("tropical", 0x1AC5_0002);
            law_suite::<ProbWeight>("prob", 0x1AC5_0003);
        },
    );
}

#[test]
fn criterion_11_wer_results_out_of_scope() {
    // WER and training-time comparisons need datasets and NN training,
    // neither of which exists here; the criterion records the exclusion.
    println!(
        "acceptance criterion 11 (WER/training-time tables): EXCLUDED — \
         no datasets or network training in scope"
    );
}
