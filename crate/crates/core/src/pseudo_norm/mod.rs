//! Pseudo-absolute value sequences and the counting functions built on them.

mod counting;
mod sequence;

use thiserror::Error;

pub use counting::{
    f_count, inverse_norm_product, lcm_of_tuple, multi_count_m, norm_indices, product_of_tuple, product_pseudo_norm,
    s_set, sorted_products, ProductCounter,
};
pub use sequence::{PseudoNorm, PseudoValueSequence, SequenceFamily, SequenceSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("ratio {0} is below 2")]
    InvalidRatio(u64),
    #[error("periodic ratio pattern is empty")]
    EmptyPattern,
    #[error("element {0} does not extend the divisor chain")]
    NotAChain(u64),
    #[error("explicit sequence is too short: element {index} is needed but undefined")]
    Exhausted { index: usize },
    #[error("tuple {tuple:?} is not in S({n}): lcm {lcm} exceeds n")]
    TupleNotInS { n: u64, tuple: Vec<usize>, lcm: u128 },
    #[error("tuple has {got} coordinates, family has {expected} members")]
    TupleArity { expected: usize, got: usize },
}
