//! Totients, least common multiples and restricted `φ(n)/n` sums.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use thiserror::Error;

use crate::budget::Budget;
use crate::scalar::{CompensatedSum, Scalar};

/// Above this bound the forbidden-divisor filter switches from per-element
/// divisibility tests to a marked mask.
pub const MASK_THRESHOLD: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("sieve of length {requested} exceeds the memory budget (max {cap})")]
    BudgetExceeded { requested: u64, cap: u64 },
    #[error("invalid range: lo={lo}, hi={hi} (need 1 <= lo <= hi)")]
    InvalidRange { lo: u64, hi: u64 },
    #[error("forbidden divisor {0} is below 2")]
    InvalidDivisor(u64),
}

/// Euler's totient by trial division.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1, "euler_phi is defined on positive integers");
    let mut m = n;
    let mut phi = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            phi -= phi / p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        phi -= phi / m;
    }
    phi
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == [n]
}

/// `φ(n)/n` as an exact rational.
pub fn phi_ratio(n: u64) -> BigRational {
    BigRational::new(euler_phi(n).into(), n.into())
}

/// `∏ (1 - 1/p)` over a set of distinct primes, i.e. `φ(P)/P` for any `P`
/// whose prime support is exactly `primes`.
pub fn phi_ratio_of_support(primes: &[u64]) -> BigRational {
    primes.iter().fold(BigRational::one(), |acc, &p| {
        acc * BigRational::new((p - 1).into(), p.into())
    })
}

/// Totient table for `1..=N`, built once and shared read-only.
#[derive(Debug, Clone)]
pub struct PhiSieve {
    // phi[0] is unused and holds 0
    phi: Vec<u32>,
}

impl PhiSieve {
    pub fn new(n: u64, budget: &Budget) -> Result<Self, ArithError> {
        let cap = budget.max_sieve_len();
        if n > cap {
            return Err(ArithError::BudgetExceeded { requested: n, cap });
        }
        let len = n as usize;
        let mut phi: Vec<u32> = (0..=len as u32).collect();
        for p in 2..=len {
            if phi[p] as usize == p {
                let mut m = p;
                while m <= len {
                    phi[m] -= phi[m] / p as u32;
                    m += p;
                }
            }
        }
        Ok(Self { phi })
    }

    /// Largest argument covered.
    pub fn limit(&self) -> u64 {
        (self.phi.len() - 1) as u64
    }

    /// `φ(n)` for `1 <= n <= limit()`.
    pub fn get(&self, n: u64) -> u64 {
        assert!(n >= 1 && n <= self.limit(), "{n} outside sieve range");
        self.phi[n as usize] as u64
    }

    /// The table as `φ(1), φ(2), …, φ(N)`.
    pub fn values(&self) -> &[u32] {
        &self.phi[1..]
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.phi[1..].iter().enumerate().map(|(i, &v)| (i as u64 + 1, v as u64))
    }
}

/// Least common multiple of every value; `1` for an empty input.
pub fn lcm_all<I>(values: I) -> BigUint
where
    I: IntoIterator,
    I::Item: Into<BigUint>,
{
    values.into_iter().fold(BigUint::one(), |acc, v| acc.lcm(&v.into()))
}

/// `lo..=hi` with every multiple of a forbidden divisor removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedRange {
    lo: u64,
    hi: u64,
    forbidden: Vec<u64>,
}

impl RestrictedRange {
    pub fn new(lo: u64, hi: u64, forbidden: impl IntoIterator<Item = u64>) -> Result<Self, ArithError> {
        if lo == 0 || lo > hi {
            return Err(ArithError::InvalidRange { lo, hi });
        }
        let mut forbidden: Vec<u64> = forbidden.into_iter().collect();
        if let Some(&d) = forbidden.iter().find(|&&d| d < 2) {
            return Err(ArithError::InvalidDivisor(d));
        }
        forbidden.sort_unstable();
        forbidden.dedup();
        Ok(Self { lo, hi, forbidden })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn forbidden(&self) -> &[u64] {
        &self.forbidden
    }

    pub fn admits(&self, n: u64) -> bool {
        n >= self.lo && n <= self.hi && self.forbidden.iter().all(|d| !n.is_multiple_of(*d))
    }

    /// Admission flags for `lo..=hi`, indexed from `lo`.
    fn admission_mask(&self) -> Vec<bool> {
        let len = (self.hi - self.lo + 1) as usize;
        if self.hi < MASK_THRESHOLD {
            return (self.lo..=self.hi).map(|n| self.admits(n)).collect();
        }
        let mut mask = vec![true; len];
        for &d in &self.forbidden {
            let first = self.lo.div_ceil(d) * d;
            let mut m = first;
            while m <= self.hi {
                mask[(m - self.lo) as usize] = false;
                m += d;
            }
        }
        mask
    }

    /// `6/π² · N · ∏ p/(p+1)` when every forbidden divisor is prime; this is
    /// the main term of the restricted sum over `1..=N`.
    pub fn main_term(&self) -> Option<f64> {
        if !self.forbidden.iter().all(|&p| is_prime(p)) {
            return None;
        }
        let density = 6.0 / std::f64::consts::PI.powi(2)
            * self
                .forbidden
                .iter()
                .map(|&p| p as f64 / (p as f64 + 1.0))
                .product::<f64>();
        Some(density * (self.hi - self.lo + 1) as f64)
    }
}

fn phi_table(range: &RestrictedRange, budget: &Budget) -> Result<PhiSieve, ArithError> {
    PhiSieve::new(range.hi, budget)
}

/// `Σ φ(n)/n` over the admitted `n` of the range.
pub fn phi_ratio_sum_restricted<S: Scalar>(range: &RestrictedRange, budget: &Budget) -> Result<S, ArithError> {
    let sieve = phi_table(range, budget)?;
    let mask = range.admission_mask();
    let mut acc = CompensatedSum::<S>::new();
    for (i, n) in (range.lo..=range.hi).enumerate() {
        if mask[i] {
            acc.add(&term::<S>(sieve.get(n), n));
        }
    }
    Ok(acc.value())
}

/// Running sums: entry `i` is the restricted sum over `lo..=lo+i`.
pub fn restricted_prefix_sums<S: Scalar>(range: &RestrictedRange, budget: &Budget) -> Result<Vec<S>, ArithError> {
    let sieve = phi_table(range, budget)?;
    let mask = range.admission_mask();
    let mut acc = CompensatedSum::<S>::new();
    let mut out = Vec::with_capacity(mask.len());
    for (i, n) in (range.lo..=range.hi).enumerate() {
        if mask[i] {
            acc.add(&term::<S>(sieve.get(n), n));
        }
        out.push(acc.value());
    }
    Ok(out)
}

fn term<S: Scalar>(phi: u64, n: u64) -> S {
    if S::EXACT {
        S::from_ratio(&BigRational::new(phi.into(), n.into()))
    } else {
        S::from_u64(phi) / S::from_u64(n)
    }
}

/// Smallest value of `restricted_sum(1..=N) / N` over `N <= n_max`, together
/// with the `N` where it occurs.
pub fn min_density_ratio(forbidden: &[u64], n_max: u64, budget: &Budget) -> Result<(f64, u64), ArithError> {
    let range = RestrictedRange::new(1, n_max, forbidden.iter().copied())?;
    let sums = restricted_prefix_sums::<f64>(&range, budget)?;
    Ok(sums
        .par_iter()
        .enumerate()
        .map(|(i, s)| (s / (i + 1) as f64, i as u64 + 1))
        .reduce(
            || (f64::INFINITY, 0),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        ))
}
