//! Property tests for the semiring/semifield laws over random finite values
//! in [−50, 50] and the specials 0̄, 1̄.

use proptest::prelude::*;

use sfb_core::semiring::{LogWeight, ProbWeight, Semifield, Semiring, TropicalWeight};

const TOL: f64 = 1e-10;

/// Compares two weights in log-probability space; both-0̄ counts as equal.
fn assert_log_close<W: Semiring>(a: W, b: W, context: &str) {
    let (x, y) = (a.to_log_prob(), b.to_log_prob());
    if x == f64::NEG_INFINITY && y == f64::NEG_INFINITY {
        return;
    }
    assert!((x - y).abs() <= TOL, "{context}: {x} vs {y}");
}

fn check_semiring_laws<W: Semifield>(a: W, b: W, c: W) {
    let zero = W::zero();
    let one = W::one();

    // ⊕ commutative and associative.
    assert_log_close(a.oplus(b), b.oplus(a), "⊕ commutativity");
    assert_log_close(a.oplus(b).oplus(c), a.oplus(b.oplus(c)), "⊕ associativity");

    // ⊗ associative with identity 1̄.
    assert_log_close(
        a.otimes(b).otimes(c),
        a.otimes(b.otimes(c)),
        "⊗ associativity",
    );
    assert_eq!(one.otimes(a), a, "1̄ ⊗ a");
    assert_eq!(a.otimes(one), a, "a ⊗ 1̄");

    // 0̄ is the ⊕ identity and the ⊗ annihilator.
    assert_eq!(zero.oplus(a), a, "0̄ ⊕ a");
    assert!(zero.otimes(a).is_zero(), "0̄ ⊗ a");
    assert!(a.otimes(zero).is_zero(), "a ⊗ 0̄");

    // ⊗ distributes over ⊕, both sides.
    assert_log_close(
        a.otimes(b.oplus(c)),
        a.otimes(b).oplus(a.otimes(c)),
        "left distributivity",
    );
    assert_log_close(
        b.oplus(c).otimes(a),
        b.otimes(a).oplus(c.otimes(a)),
        "right distributivity",
    );

    // Semifield inverse.
    if !b.is_zero() {
        assert_log_close(a.otimes(b).oslash(b).unwrap(), a, "(a ⊗ b) ⊘ b");
    }
    assert!(a.oslash(zero).is_err(), "division by 0̄ must fail");
}

fn log_weight() -> impl Strategy<Value = LogWeight> {
    prop_oneof![
        8 => (-50.0f64..50.0).prop_map(|v| LogWeight::new(v).unwrap()),
        1 => Just(LogWeight::zero()),
        1 => Just(LogWeight::one()),
    ]
}

fn tropical_weight() -> impl Strategy<Value = TropicalWeight> {
    prop_oneof![
        8 => (-50.0f64..50.0).prop_map(|v| TropicalWeight::new(v).unwrap()),
        1 => Just(TropicalWeight::zero()),
        1 => Just(TropicalWeight::one()),
    ]
}

fn prob_weight() -> impl Strategy<Value = ProbWeight> {
    prop_oneof![
        8 => (-50.0f64..50.0).prop_map(|v| ProbWeight::from_log_prob(v).unwrap()),
        1 => Just(ProbWeight::zero()),
        1 => Just(ProbWeight::one()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn log_semifield_laws(a in log_weight(), b in log_weight(), c in log_weight()) {
        check_semiring_laws(a, b, c);
    }

    #[test]
    fn tropical_semifield_laws(a in tropical_weight(), b in tropical_weight(), c in tropical_weight()) {
        check_semiring_laws(a, b, c);
    }

    #[test]
    fn prob_semifield_laws(a in prob_weight(), b in prob_weight(), c in prob_weight()) {
        check_semiring_laws(a, b, c);
    }

    #[test]
    fn log_oplus_is_shifted_log1p(a in -50.0f64..50.0, b in -50.0f64..50.0) {
        let w = LogWeight::new(a).unwrap().oplus(LogWeight::new(b).unwrap());
        let expected = a.max(b) + (-(a - b).abs()).exp().ln_1p();
        prop_assert!((w.value() - expected).abs() <= TOL);
        prop_assert!(w.value() >= a.max(b));
    }

    #[test]
    fn log_oplus_never_overflows(a in -1e300f64..1e300, b in -1e300f64..1e300) {
        let w = LogWeight::new(a).unwrap().oplus(LogWeight::new(b).unwrap());
        prop_assert!(w.value().is_finite());
    }

    #[test]
    fn oplus_is_monotone(a in -50.0f64..50.0, a2 in 0.0f64..10.0, b in -50.0f64..50.0) {
        // a ≤ a + a2, so ⊕ against a fixed b must preserve the order.
        let lo = LogWeight::new(a).unwrap().oplus(LogWeight::new(b).unwrap());
        let hi = LogWeight::new(a + a2).unwrap().oplus(LogWeight::new(b).unwrap());
        prop_assert!(lo.value() <= hi.value());
        let tlo = TropicalWeight::new(a).unwrap().oplus(TropicalWeight::new(b).unwrap());
        let thi = TropicalWeight::new(a + a2).unwrap().oplus(TropicalWeight::new(b).unwrap());
        prop_assert!(tlo.value() <= thi.value());
    }

    #[test]
    fn log_prob_embedding_round_trips(v in prop_oneof![
        Just(f64::NEG_INFINITY),
        -700.0f64..700.0,
    ]) {
        let w = LogWeight::<f64>::from_log_prob(v).unwrap();
        prop_assert_eq!(w.to_log_prob(), v);
        let t = TropicalWeight::<f64>::from_log_prob(v).unwrap();
        prop_assert_eq!(t.to_log_prob(), v);
        // Probability domain round-trips within one ulp of the log value.
        let p = ProbWeight::<f64>::from_log_prob(v).unwrap();
        if v == f64::NEG_INFINITY {
            prop_assert!(p.is_zero());
        } else {
            prop_assert!((p.to_log_prob() - v).abs() <= 1e-13 * v.abs().max(1.0));
        }
    }
}
