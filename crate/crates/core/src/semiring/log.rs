//! The log-semifield: weights are log-probabilities in nats.

use std::fmt;

use super::{check_extended_real, Scalar, Semifield, Semiring, WeightError};

/// Weight in the log-semifield: ⊕ = log-sum-exp, ⊗ = +, 0̄ = −∞, 1̄ = 0.
///
/// The payload is a finite real or −∞; NaN and +∞ are rejected at
/// construction. ⊕ is computed max-shifted so it cannot overflow for any
/// finite operands and returns the non-zero operand exactly when the other
/// is 0̄.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogWeight<F: Scalar = f64>(F);

impl<F: Scalar> LogWeight<F> {
    pub fn new(value: F) -> Result<Self, WeightError> {
        check_extended_real(value).map(LogWeight)
    }

    pub fn value(self) -> F {
        self.0
    }
}

impl<F: Scalar> Semiring for LogWeight<F> {
    fn zero() -> Self {
        LogWeight(F::neg_infinity())
    }

    fn one() -> Self {
        LogWeight(F::zero())
    }

    fn oplus(self, rhs: Self) -> Self {
        // Returning the other operand verbatim when one side is 0̄ keeps the
        // identity law exact; it also keeps lo - hi below from producing
        // (-inf) - (-inf) = NaN.
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.0 >= rhs.0 {
            (self.0, rhs.0)
        } else {
            (rhs.0, self.0)
        };
        // max-shift: lo - hi <= 0, so exp() <= 1 and nothing overflows.
        LogWeight(hi + (lo - hi).exp().ln_1p())
    }

    fn otimes(self, rhs: Self) -> Self {
        LogWeight(self.0 + rhs.0)
    }

    fn is_zero(self) -> bool {
        self.0 == F::neg_infinity()
    }

    fn from_log_prob(lp: f64) -> Result<Self, WeightError> {
        check_extended_real(lp)?;
        let v = F::from(lp).ok_or(WeightError::NotANumber)?;
        // An out-of-range f64 -> f32 cast saturates to +inf; catch it.
        check_extended_real(v).map(LogWeight)
    }

    fn to_log_prob(self) -> f64 {
        self.0.to_f64().expect("float widens to f64")
    }
}

impl<F: Scalar> Semifield for LogWeight<F> {
    fn oslash(self, rhs: Self) -> Result<Self, WeightError> {
        if rhs.is_zero() {
            return Err(WeightError::DivisionByZero);
        }
        Ok(LogWeight(self.0 - rhs.0))
    }
}

impl<F: Scalar> fmt::Display for LogWeight<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}
