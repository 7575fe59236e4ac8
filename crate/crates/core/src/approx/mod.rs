//! Exact targets `α`, the distances `‖nα‖` and `‖nα‖′`, coprime solution
//! enumeration and the running liminf tracker.

mod solutions;
mod target;

use thiserror::Error;

use crate::pseudo_norm::SequenceError;
use crate::psi::PsiError;

pub use solutions::{
    enumerate_solutions, liminf_quantity, running_liminf, LiminfCheckpoint, LiminfTrace, SolutionFlag, SolutionRecord,
    SolutionScan, SOLUTION_CSV_HEADER,
};
pub use target::{coprime_dist, dist_to_integers, Distance, Offset, RealTarget, DEFAULT_SCAN_CAP};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error("the precision of the target does not decide the comparison at n={n}")]
    PrecisionInsufficient { n: u64 },
    #[error("no integer coprime to {n} within {cap} steps of n·α")]
    ScanCapExceeded { n: u64, cap: u64 },
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("window of {width} candidates at n={n} is too wide")]
    WindowTooLarge { n: u64, width: u64 },
    #[error("invalid range {lo}..={hi}")]
    InvalidRange { lo: u64, hi: u64 },
    #[error(transparent)]
    Psi(#[from] PsiError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}
