//! The tropical semifield: ⊕ = max turns path summation into best-path search.

use std::fmt;

use super::{check_extended_real, Scalar, Semifield, Semiring, WeightError};

/// Weight in the tropical semifield: ⊕ = max, ⊗ = +, 0̄ = −∞, 1̄ = 0.
///
/// Same representation rules as [`LogWeight`](super::LogWeight); swapping the
/// addition for max is what makes the forward recursion compute Viterbi
/// best-path scores instead of marginals.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TropicalWeight<F: Scalar = f64>(F);

impl<F: Scalar> TropicalWeight<F> {
    pub fn new(value: F) -> Result<Self, WeightError> {
        check_extended_real(value).map(TropicalWeight)
    }

    pub fn value(self) -> F {
        self.0
    }
}

impl<F: Scalar> Semiring for TropicalWeight<F> {
    fn zero() -> Self {
        TropicalWeight(F::neg_infinity())
    }

    fn one() -> Self {
        TropicalWeight(F::zero())
    }

    fn oplus(self, rhs: Self) -> Self {
        if self.0 >= rhs.0 {
            self
        } else {
            rhs
        }
    }

    fn otimes(self, rhs: Self) -> Self {
        TropicalWeight(self.0 + rhs.0)
    }

    fn is_zero(self) -> bool {
        self.0 == F::neg_infinity()
    }

    fn from_log_prob(lp: f64) -> Result<Self, WeightError> {
        check_extended_real(lp)?;
        let v = F::from(lp).ok_or(WeightError::NotANumber)?;
        check_extended_real(v).map(TropicalWeight)
    }

    fn to_log_prob(self) -> f64 {
        self.0.to_f64().expect("float widens to f64")
    }
}

impl<F: Scalar> Semifield for TropicalWeight<F> {
    fn oslash(self, rhs: Self) -> Result<Self, WeightError> {
        if rhs.is_zero() {
            return Err(WeightError::DivisionByZero);
        }
        Ok(TropicalWeight(self.0 - rhs.0))
    }
}

impl<F: Scalar> fmt::Display for TropicalWeight<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tw(v: f64) -> TropicalWeight {
        TropicalWeight::new(v).unwrap()
    }

    #[test]
    fn oplus_is_max() {
        assert_eq!(tw(2.0).oplus(tw(5.0)), tw(5.0));
        assert_eq!(tw(5.0).oplus(tw(2.0)), tw(5.0));
        assert_eq!(TropicalWeight::zero().oplus(tw(-3.0)), tw(-3.0));
    }

    #[test]
    fn otimes_adds() {
        assert_eq!(tw(2.0).otimes(tw(3.5)), tw(5.5));
        assert!(TropicalWeight::zero().otimes(tw(1.0)).is_zero());
    }

    #[test]
    fn embedding_is_the_identity() {
        let w = TropicalWeight::<f64>::from_log_prob(0.0).unwrap();
        assert_eq!(w, TropicalWeight::one());
        assert_eq!(
            TropicalWeight::<f64>::from_log_prob(-2.5).unwrap().value(),
            -2.5
        );
    }
}
