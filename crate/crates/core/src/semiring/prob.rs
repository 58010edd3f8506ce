//! The probability semifield: ordinary arithmetic on non-negative reals.
//!
//! This is the textbook recursion domain. It exists here both as a reference
//! point for tests and as the demonstration of why the log domain is the
//! default: long products of probabilities underflow to 0̄.

use std::fmt;

use super::{Scalar, Semifield, Semiring, WeightError};

/// Weight in the probability semifield: ⊕ = +, ⊗ = ×, 0̄ = 0, 1̄ = 1.
///
/// The payload is a finite non-negative real.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ProbWeight<F: Scalar = f64>(F);

impl<F: Scalar> ProbWeight<F> {
    pub fn new(value: F) -> Result<Self, WeightError> {
        if value.is_nan() {
            Err(WeightError::NotANumber)
        } else if value.is_infinite() {
            Err(WeightError::PositiveInfinity)
        } else if value < F::zero() {
            Err(WeightError::NegativeProbability(
                value.to_f64().expect("float widens to f64"),
            ))
        } else {
            Ok(ProbWeight(value))
        }
    }

    pub fn value(self) -> F {
        self.0
    }
}

impl<F: Scalar> Semiring for ProbWeight<F> {
    fn zero() -> Self {
        ProbWeight(F::zero())
    }

    fn one() -> Self {
        ProbWeight(F::one())
    }

    fn oplus(self, rhs: Self) -> Self {
        ProbWeight(self.0 + rhs.0)
    }

    fn otimes(self, rhs: Self) -> Self {
        ProbWeight(self.0 * rhs.0)
    }

    fn is_zero(self) -> bool {
        self.0 == F::zero()
    }

    fn from_log_prob(lp: f64) -> Result<Self, WeightError> {
        if lp.is_nan() {
            return Err(WeightError::NotANumber);
        }
        let p = lp.exp();
        let v = F::from(p).ok_or(WeightError::NotANumber)?;
        if v.is_infinite() {
            return Err(WeightError::ProbOverflow(lp));
        }
        Ok(ProbWeight(v))
    }

    fn to_log_prob(self) -> f64 {
        self.0.to_f64().expect("float widens to f64").ln()
    }
}

impl<F: Scalar> Semifield for ProbWeight<F> {
    fn oslash(self, rhs: Self) -> Result<Self, WeightError> {
        if rhs.is_zero() {
            return Err(WeightError::DivisionByZero);
        }
        Ok(ProbWeight(self.0 / rhs.0))
    }
}

impl<F: Scalar> fmt::Display for ProbWeight<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}
