//! Exact and statistical tooling for mixed Littlewood problems with
//! pseudo-absolute values.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: totients, lcm, restricted `φ(n)/n` sums.
//! * [`pseudo_norm`]: divisor chains `D`, the pseudo-norm `|n|_D` and the
//!   counting functions `𝓜`, `𝔐`, `S(n)`, `f`, `M(n)`.
//! * [`psi`]: test-function families `ψ` and the weighted `ψ₀`.
//! * [`criteria`]: criterion series, hypothesis checkers, `G_n` blocks and
//!   the identity/sandwich verifiers.
//! * [`approx`]: exact targets `α`, `‖nα‖`, `‖nα‖′`, solution enumeration.
//! * [`measure`]: the sets `E_n(ψ)`, exact Lebesgue measure, Monte Carlo.
//!
//! Summations are generic over [`Scalar`]; the aliases below fix the two
//! instantiations used in practice.

pub mod approx;
pub mod arith;
pub mod budget;
pub mod criteria;
pub mod measure;
pub mod pseudo_norm;
pub mod psi;
pub mod scalar;
pub mod text;

use thiserror::Error;

pub use budget::Budget;
pub use scalar::{CompensatedSum, Scalar};

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

/// Exact rational used throughout.
pub type Rational = BigRational;

/// Series report with exact rational partial sums.
pub type ExactSeriesReport = criteria::SeriesReport<BigRational>;
/// Series report with compensated `f64` partial sums.
pub type FloatSeriesReport = criteria::SeriesReport<f64>;

/// Interval set over exact rationals, the default measure-lab carrier.
pub type RationalIntervalSet = measure::IntervalSet<BigRational>;

/// Any failure surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] arith::ArithError),
    #[error(transparent)]
    Sequence(#[from] pseudo_norm::SequenceError),
    #[error(transparent)]
    Psi(#[from] psi::PsiError),
    #[error(transparent)]
    Criteria(#[from] criteria::CriteriaError),
    #[error(transparent)]
    Approx(#[from] approx::ApproxError),
    #[error(transparent)]
    Measure(#[from] measure::MeasureError),
}

impl Error {
    /// True for failures caused by a resource ceiling rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::Arith(arith::ArithError::BudgetExceeded { .. })
                | Error::Criteria(criteria::CriteriaError::BlockBeyondBudget { .. })
                | Error::Criteria(criteria::CriteriaError::Arith(arith::ArithError::BudgetExceeded { .. }))
                | Error::Approx(approx::ApproxError::WindowTooLarge { .. })
                | Error::Approx(approx::ApproxError::ScanCapExceeded { .. })
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
