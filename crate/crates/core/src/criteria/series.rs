use rayon::prelude::*;
use serde::Serialize;

use super::{CriteriaError, WeightContext, WeightKind};
use crate::budget::Budget;
use crate::psi::PsiSpec;
use crate::scalar::{CompensatedSum, Scalar};
use crate::text::{format_float, format_rational};

const U: f64 = f64::EPSILON / 2.0;

/// Largest number of consecutive terms evaluated by one task.
const CHUNK: u64 = 1 << 16;

pub const SERIES_CSV_HEADER: &str = "weight,psi,family,n_end,partial_sum_exact,partial_sum_float";

/// Terms with `2^j <= n < 2^{j+1}` (clipped to the summation range).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSubtotal<S> {
    pub lo: u64,
    pub hi: u64,
    pub sum: S,
    pub abs_err: f64,
}

/// Partial sum over `n_start..=n_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<S> {
    pub n_end: u64,
    pub partial_sum: S,
    pub abs_err: f64,
}

/// Partial sums of `Σ ψ(n) w(n)` over `n_start..=n_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesReport<S> {
    pub weight: WeightKind,
    pub psi: PsiSpec,
    pub n_start: u64,
    pub n_end: u64,
    pub partial_sum: S,
    /// Bound on `|partial_sum - true sum|`; zero when every term was exact.
    pub abs_err: f64,
    pub subtotals: Vec<BlockSubtotal<S>>,
    /// One checkpoint at the end of every subtotal block.
    pub checkpoints: Vec<Checkpoint<S>>,
}

/// One emitted row of a series report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRow {
    pub weight: String,
    pub psi: String,
    pub family: String,
    pub n_end: u64,
    pub partial_sum_exact: Option<String>,
    pub partial_sum_float: String,
}

impl<S: Scalar> SeriesReport<S> {
    pub fn is_exact(&self) -> bool {
        S::EXACT && self.abs_err == 0.0
    }

    pub fn float_sum(&self) -> f64 {
        self.partial_sum.to_f64()
    }

    pub fn rows(&self) -> Vec<SeriesRow> {
        self.checkpoints
            .iter()
            .map(|c| SeriesRow {
                weight: self.weight.to_string(),
                psi: self.psi.label(),
                family: self.weight.family_label(),
                n_end: c.n_end,
                partial_sum_exact: if c.abs_err == 0.0 {
                    c.partial_sum.exact_ratio().map(|r| format_rational(&r))
                } else {
                    None
                },
                partial_sum_float: format_float(c.partial_sum.to_f64()),
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(SERIES_CSV_HEADER);
        out.push('\n');
        for row in self.rows() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.weight,
                row.psi,
                row.family,
                row.n_end,
                row.partial_sum_exact.unwrap_or_default(),
                row.partial_sum_float
            ));
        }
        out
    }
}

struct Partial<S> {
    sum: S,
    abs_err: f64,
}

fn chunk_sum<S: Scalar>(psi: &PsiSpec, ctx: &WeightContext<'_>, lo: u64, hi: u64) -> Result<Partial<S>, CriteriaError> {
    let mut acc = CompensatedSum::<S>::new();
    let mut err = 0.0;
    for n in lo..=hi {
        let p = psi.eval(n)?;
        if S::EXACT {
            if let (Some(pe), Some(we)) = (p.exact(), ctx.exact(n)?) {
                acc.add(&S::from_ratio(&(pe * we)));
                continue;
            }
        }
        // exact types store the dyadic value of the float product
        let (w, w_rel) = ctx.float(n)?;
        let t = p.to_f64() * w;
        let conv = if p.is_exact() { U } else { 0.0 };
        err += t * (p.rel_err() + conv + w_rel + U);
        acc.add(&S::from_f64(t));
    }
    if !S::EXACT {
        // compensated summation: error at most 2u|s| plus second-order terms
        err += acc.value().to_f64().abs() * (2.0 * U + (hi - lo + 1) as f64 * U * U);
    }
    Ok(Partial {
        sum: acc.value(),
        abs_err: err,
    })
}

/// `[lo, hi]` pieces of `start..=end` aligned to powers of two.
fn dyadic_blocks(start: u64, end: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut lo = start;
    while lo <= end {
        let j = 63 - lo.leading_zeros();
        let block_end = if j == 63 { u64::MAX } else { (1u64 << (j + 1)) - 1 };
        let hi = block_end.min(end);
        out.push((lo, hi));
        if hi == u64::MAX {
            break;
        }
        lo = hi + 1;
    }
    out
}

/// `Σ_{n=start}^{N} ψ(n) w(n)`, summed in parallel over fixed chunks and
/// reduced in ascending order, so the result does not depend on the number
/// of worker threads.
pub fn weighted_partial_sum<S: Scalar>(
    psi: &PsiSpec,
    weight: &WeightKind,
    n_end: u64,
    budget: &Budget,
) -> Result<SeriesReport<S>, CriteriaError> {
    let start = psi.start_index();
    if n_end < start {
        return Err(CriteriaError::InvalidRange { lo: start, hi: n_end });
    }
    let ctx = WeightContext::new(weight, n_end, budget)?;
    let blocks = dyadic_blocks(start, n_end);
    let chunks: Vec<(usize, u64, u64)> = blocks
        .iter()
        .enumerate()
        .flat_map(|(b, &(lo, hi))| {
            let mut v = Vec::new();
            let mut c = lo;
            while c <= hi {
                let e = hi.min(c.saturating_add(CHUNK - 1));
                v.push((b, c, e));
                if e == u64::MAX {
                    break;
                }
                c = e + 1;
            }
            v
        })
        .collect();
    let partials = chunks
        .par_iter()
        .map(|&(_, lo, hi)| chunk_sum::<S>(psi, &ctx, lo, hi))
        .collect::<Result<Vec<_>, _>>()?;

    let mut subtotals = Vec::with_capacity(blocks.len());
    let mut checkpoints = Vec::with_capacity(blocks.len());
    let mut total = CompensatedSum::<S>::new();
    let mut total_err = 0.0;
    let mut i = 0;
    for (b, &(lo, hi)) in blocks.iter().enumerate() {
        let mut block = CompensatedSum::<S>::new();
        let mut block_err = 0.0;
        while i < chunks.len() && chunks[i].0 == b {
            block.add(&partials[i].sum);
            block_err += partials[i].abs_err;
            i += 1;
        }
        let sum = block.value();
        total.add(&sum);
        total_err += block_err;
        if !S::EXACT {
            block_err += sum.to_f64().abs() * 2.0 * U;
        }
        subtotals.push(BlockSubtotal {
            lo,
            hi,
            sum,
            abs_err: block_err,
        });
        let running = total.value();
        let running_err = if S::EXACT {
            total_err
        } else {
            total_err + running.to_f64().abs() * 2.0 * U
        };
        checkpoints.push(Checkpoint {
            n_end: hi,
            partial_sum: running,
            abs_err: running_err,
        });
    }
    let last = checkpoints.last().expect("range is non-empty");
    Ok(SeriesReport {
        weight: weight.clone(),
        psi: psi.clone(),
        n_start: start,
        n_end,
        partial_sum: last.partial_sum.clone(),
        abs_err: last.abs_err,
        subtotals,
        checkpoints,
    })
}
