//! Semiring and semifield algebra over extended-real weights.
//!
//! Everything downstream (sparse kernels, graph inference, the LF-MMI loss)
//! is generic over the [`Semiring`] contract. Three instances are provided:
//!
//! | weight            | ⊕           | ⊗ | 0̄    | 1̄ |
//! |-------------------|-------------|---|------|---|
//! | [`LogWeight`]     | log-sum-exp | + | −∞   | 0 |
//! | [`TropicalWeight`]| max         | + | −∞   | 0 |
//! | [`ProbWeight`]    | +           | × | 0    | 1 |
//!
//! Weights are immutable values and all operations are pure functions, so
//! they are freely shareable across threads.

mod log;
mod prob;
mod tropical;

pub use log::LogWeight;
pub use prob::ProbWeight;
pub use tropical::TropicalWeight;

use std::fmt::{Debug, Display};

use num_traits::Float;
use thiserror::Error;

/// Scalar payload of a weight. `f64` is the default; `f32` is available as an
/// instantiation choice (e.g. `LogWeight<f32>`) at reduced precision.
pub trait Scalar: Float + Debug + Display + Send + Sync + 'static {}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Errors raised at the weight construction/conversion boundary and by ⊘.
///
/// Internal semiring operations never produce NaN on valid inputs; rejecting
/// NaN and +∞ at the boundary is what keeps that true.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("NaN is not a valid weight")]
    NotANumber,
    #[error("+inf is not a valid weight; no semiring element maps to it")]
    PositiveInfinity,
    #[error("negative value {0} is not a valid probability weight")]
    NegativeProbability(f64),
    #[error("division by the zero element is undefined")]
    DivisionByZero,
    #[error("log-probability {0} overflows the probability domain")]
    ProbOverflow(f64),
}

/// A semiring `(S, ⊕, ⊗, 0̄, 1̄)`: ⊕ is commutative-associative with identity
/// 0̄; ⊗ is associative with identity 1̄ and annihilator 0̄; ⊗ distributes
/// over ⊕.
pub trait Semiring: Copy + PartialEq + Debug + Display + Send + Sync + 'static {
    /// Identity of ⊕, annihilator of ⊗.
    fn zero() -> Self;

    /// Identity of ⊗.
    fn one() -> Self;

    /// Semiring addition. Combines parallel paths.
    fn oplus(self, rhs: Self) -> Self;

    /// Semiring multiplication. Chains path segments.
    fn otimes(self, rhs: Self) -> Self;

    fn is_zero(self) -> bool;

    fn is_one(self) -> bool {
        self == Self::one()
    }

    /// Embeds a log-probability (nats; `-inf` encodes zero probability).
    ///
    /// Fails on NaN, on +∞ and on values the target domain cannot represent.
    fn from_log_prob(lp: f64) -> Result<Self, WeightError>;

    /// The log-probability this weight denotes. Exact inverse of
    /// [`from_log_prob`](Semiring::from_log_prob) within one ulp.
    fn to_log_prob(self) -> f64;
}

/// A semiring whose non-0̄ elements have multiplicative inverses, exposed as
/// the division operation ⊘.
pub trait Semifield: Semiring {
    /// Semiring division; `rhs` must not be 0̄.
    fn oslash(self, rhs: Self) -> Result<Self, WeightError>;
}

/// Validates a raw scalar for the extended-real weights (Log/Tropical):
/// NaN and +∞ are rejected, −∞ and finite values pass through.
pub(crate) fn check_extended_real<F: Scalar>(value: F) -> Result<F, WeightError> {
    if value.is_nan() {
        Err(WeightError::NotANumber)
    } else if value.is_infinite() && value > F::zero() {
        Err(WeightError::PositiveInfinity)
    } else {
        Ok(value)
    }
}
