use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::CriteriaError;
use crate::arith::{phi_ratio, phi_ratio_of_support};
use crate::pseudo_norm::{sorted_products, PseudoValueSequence, SequenceFamily};

/// Largest tuple count the tuple scan will enumerate.
const MAX_TUPLES: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TupleDensityReport {
    pub bound: usize,
    /// Minimum of `φ(P)/P` over tuples with every index `<= bound`.
    #[serde(with = "crate::text::rational_string")]
    pub min_ratio: BigRational,
    /// First tuple in lexicographic order attaining the minimum.
    pub argmin: Vec<usize>,
    /// `trend[j]` is the minimum over tuples with every index `<= j`.
    #[serde(with = "crate::text::rational_vec")]
    pub trend: Vec<BigRational>,
    /// The minimum still dropped at the last bound, so the infimum may lie beyond it.
    pub decreasing_at_boundary: bool,
}

/// Minimum of `φ(n^1_{k_1}⋯n^m_{k_m}) / (n^1_{k_1}⋯n^m_{k_m})` over `0 <= k_i <= K`.
pub fn tuple_density_floor(family: &SequenceFamily, k_max: usize) -> Result<TupleDensityReport, CriteriaError> {
    let m = family.len();
    let count = (k_max as u128 + 1).checked_pow(m as u32).unwrap_or(u128::MAX);
    if count > MAX_TUPLES {
        return Err(CriteriaError::Domain(format!(
            "{count} tuples exceed the scan limit of {MAX_TUPLES}"
        )));
    }
    let supports: Vec<Vec<Vec<u64>>> = family
        .members()
        .iter()
        .map(|s| (0..=k_max).map(|k| s.support(k)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;

    let mut level_min: Vec<Option<(BigRational, Vec<usize>)>> = vec![None; k_max + 1];
    let mut tuple = vec![0usize; m];
    loop {
        let mut primes: Vec<u64> = tuple
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| supports[i][k].iter().copied())
            .collect();
        primes.sort_unstable();
        primes.dedup();
        let ratio = phi_ratio_of_support(&primes);
        let level = tuple.iter().copied().max().unwrap_or(0);
        match &level_min[level] {
            Some((best, _)) if *best <= ratio => {}
            _ => level_min[level] = Some((ratio, tuple.clone())),
        }
        // next tuple in lexicographic order
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(finish_tuple_scan(k_max, level_min));
            }
            i -= 1;
            if tuple[i] < k_max {
                tuple[i] += 1;
                tuple[i + 1..].iter_mut().for_each(|t| *t = 0);
                break;
            }
        }
    }
}

fn finish_tuple_scan(k_max: usize, level_min: Vec<Option<(BigRational, Vec<usize>)>>) -> TupleDensityReport {
    let mut trend = Vec::with_capacity(k_max + 1);
    let mut best: Option<(BigRational, Vec<usize>)> = None;
    for entry in level_min.into_iter().flatten() {
        let improves = match &best {
            None => true,
            Some((b, t)) => entry.0 < *b || (entry.0 == *b && entry.1 < *t),
        };
        if improves {
            best = Some(entry);
        }
        trend.push(best.as_ref().expect("set above").0.clone());
    }
    // with m = 0 only level 0 exists; pad so trend has one entry per bound
    while trend.len() < k_max + 1 {
        trend.push(trend.last().cloned().unwrap_or_else(BigRational::one));
    }
    let (min_ratio, argmin) = best.unwrap_or((BigRational::one(), Vec::new()));
    let decreasing_at_boundary = k_max >= 1 && trend[k_max] < trend[k_max - 1];
    TupleDensityReport {
        bound: k_max,
        min_ratio,
        argmin,
        trend,
        decreasing_at_boundary,
    }
}

/// `∏ (1 - 1/p)` over every prime dividing some element of some member.
///
/// For chains generated by finitely many integers this is the infimum of the
/// tuple ratio over all tuples, so it is a valid `c₁`.
pub fn generator_density_floor(family: &SequenceFamily) -> BigRational {
    let mut primes: Vec<u64> = family.members().iter().flat_map(|s| s.generator_primes()).collect();
    primes.sort_unstable();
    primes.dedup();
    phi_ratio_of_support(&primes)
}

fn require_coprime(family: &SequenceFamily) -> Result<(), CriteriaError> {
    if family.is_mutually_coprime() {
        Ok(())
    } else {
        Err(CriteriaError::NotMutuallyCoprime)
    }
}

/// Mean of `φ(P)/P` over the products `P <= N`.
pub fn mean_product_density(family: &SequenceFamily, n: u64) -> Result<BigRational, CriteriaError> {
    require_coprime(family)?;
    let products = sorted_products(family, n)?;
    let total = products.iter().fold(BigRational::zero(), |acc, &p| acc + phi_ratio(p));
    Ok(total / BigRational::from_integer(BigInt::from(products.len())))
}

/// `(Σ_{P <= N} P) / (N · #{P <= N})` over the products `P`.
pub fn mean_product_fill(family: &SequenceFamily, n: u64) -> Result<BigRational, CriteriaError> {
    require_coprime(family)?;
    let products = sorted_products(family, n)?;
    let total: u128 = products.iter().map(|&p| p as u128).sum();
    Ok(BigRational::new(
        BigInt::from(total),
        BigInt::from(n) * BigInt::from(products.len()),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementDensityReport {
    /// `(Σ_{k=1}^m φ(n_k)/n_k) / m`.
    #[serde(with = "crate::text::rational_string")]
    pub ratio: BigRational,
    /// The same average for every `m' = 1..=m`.
    #[serde(with = "crate::text::rational_vec")]
    pub trend: Vec<BigRational>,
}

impl ElementDensityReport {
    /// True when the running averages never increase and fall overall.
    pub fn is_decaying(&self) -> bool {
        self.trend.windows(2).all(|w| w[1] <= w[0]) && self.trend.first() > self.trend.last()
    }
}

/// Average totient density of the first `m` elements.
pub fn mean_element_density(seq: &PseudoValueSequence, m: usize) -> Result<ElementDensityReport, CriteriaError> {
    if m == 0 {
        return Err(CriteriaError::Domain("element density average needs m >= 1".into()));
    }
    let mut sum = BigRational::zero();
    let mut trend = Vec::with_capacity(m);
    for k in 1..=m {
        sum += seq.density(k)?;
        trend.push(&sum / BigRational::from_integer(BigInt::from(k)));
    }
    Ok(ElementDensityReport {
        ratio: trend.last().expect("m >= 1").clone(),
        trend,
    })
}
