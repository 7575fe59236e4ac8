//! Criterion series, hypothesis checkers, `G_n` blocks and verifiers for the
//! summation identities and sandwiches.

mod blocks;
mod hypotheses;
mod identities;
mod series;
mod weight;

use thiserror::Error;

use crate::arith::ArithError;
use crate::pseudo_norm::SequenceError;
use crate::psi::PsiError;

pub use blocks::{g_block, li_criterion_partial, li_series, EffectivePsi, GBlock, LiReport, PhiRoute};
pub use hypotheses::{
    generator_density_floor, mean_element_density, mean_product_density, mean_product_fill, tuple_density_floor,
    ElementDensityReport, TupleDensityReport,
};
pub use identities::{
    abel_identity_check, apple_checks, linear_growth_ratio, loglog_comparison, sandwich_point, sandwich_sweep,
    AbelCheck, AppleReport, Counter, GrowthRatio, LogLogComparison, SandwichPoint, SandwichSweep,
};
pub use series::{weighted_partial_sum, BlockSubtotal, Checkpoint, SeriesReport, SeriesRow, SERIES_CSV_HEADER};
pub use weight::{Growth, WeightContext, WeightKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriteriaError {
    #[error(transparent)]
    Psi(#[from] PsiError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("block {block} (upper end {upper}) is beyond the configured budget")]
    BlockBeyondBudget { block: u32, upper: String },
    #[error("the sequence family is not mutually coprime")]
    NotMutuallyCoprime,
    #[error("invalid range {lo}..={hi}")]
    InvalidRange { lo: u64, hi: u64 },
    #[error("{0}")]
    Domain(String),
}
