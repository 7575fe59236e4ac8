use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{union_range, IntervalSet, MeasureError};
use crate::pseudo_norm::SequenceFamily;
use crate::psi::PsiSpec;
use crate::scalar::ratio_to_f64;
use crate::text::format_float;

/// Samples drawn from one ChaCha stream.
const CHUNK: u64 = 4096;

pub const MONTE_CARLO_CSV_HEADER: &str = "N0,N1,samples,seed,fraction,halfwidth,tail_sum,union_measure";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub samples: u64,
    pub seed: u64,
    pub hits: u64,
    pub fraction: f64,
    /// `3 sqrt(f (1 - f) / samples)`.
    pub halfwidth: f64,
}

/// Fraction of uniform points `x / 2^64` that fall in `set`.
///
/// Chunk `i` of 4096 samples reads stream `i` of a ChaCha8 generator seeded
/// with `seed`, so the outcome is independent of the thread count.
pub fn monte_carlo_hits(set: &IntervalSet<BigRational>, samples: u64, seed: u64) -> Result<MonteCarlo, MeasureError> {
    if samples == 0 {
        return Err(MeasureError::NoSamples);
    }
    let denom = BigInt::from(1u128 << 64);
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let take = CHUNK.min(samples - c * CHUNK);
            (0..take)
                .filter(|_| {
                    let x = BigRational::new(BigInt::from(rng.next_u64()), denom.clone());
                    set.contains(&x)
                })
                .count() as u64
        })
        .sum();
    let fraction = hits as f64 / samples as f64;
    Ok(MonteCarlo {
        samples,
        seed,
        hits,
        fraction,
        halfwidth: 3.0 * (fraction * (1.0 - fraction) / samples as f64).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub n0: u64,
    pub n1: u64,
    pub hits: MonteCarlo,
    pub tail_sum: f64,
    pub union_measure: f64,
}

impl MonteCarloReport {
    /// The hit fraction does not exceed the union bound by more than `3σ`.
    pub fn within_bound(&self) -> bool {
        self.hits.fraction <= self.tail_sum + self.hits.halfwidth
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n0,
            self.n1,
            self.hits.samples,
            self.hits.seed,
            format_float(self.hits.fraction),
            format_float(self.hits.halfwidth),
            format_float(self.tail_sum),
            format_float(self.union_measure)
        )
    }
}

/// Hit fraction of `⋃_{N0<=n<=N1} E_n` next to its exact measure and tail sum.
pub fn monte_carlo_range(
    psi: &PsiSpec,
    family: &SequenceFamily,
    n0: u64,
    n1: u64,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloReport, MeasureError> {
    let union = union_range(psi, family, n0, n1)?;
    let hits = monte_carlo_hits(&union.set, samples, seed)?;
    Ok(MonteCarloReport {
        n0,
        n1,
        hits,
        tail_sum: ratio_to_f64(&union.tail_sum),
        union_measure: ratio_to_f64(&union.measure),
    })
}
