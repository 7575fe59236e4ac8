use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::CriteriaError;
use crate::arith::PhiSieve;
use crate::budget::Budget;
use crate::pseudo_norm::{ProductCounter, PseudoValueSequence, SequenceFamily, SequenceSpec};
use crate::psi::PsiValue;
use crate::scalar::ratio_to_f64;

const U: f64 = f64::EPSILON / 2.0;

/// The weight `w(n)` multiplying `ψ(n)` in a criterion series.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// `1 / ∏ |n|_{D_i}`.
    InverseNormProduct(SequenceFamily),
    /// `φ(n) / (n ∏ |n|_{D_i})`.
    DSWeighted(SequenceFamily),
    /// `M(n)`.
    MultiCount(SequenceFamily),
    /// `𝓜(n)`.
    HarrapCount(PseudoValueSequence),
    /// `(ln n)^k`.
    LogPower(u32),
    /// `𝔐(n)`.
    FrakM(PseudoValueSequence),
    /// `𝔐(n) (ln n)^{1+ε}`.
    FrakMLog {
        sequence: PseudoValueSequence,
        epsilon: BigRational,
    },
}

/// Order of growth of a weight on average, as `(ln n)^α (ln ln n)^β`.
#[derive(Debug, Clone, PartialEq)]
pub enum Growth {
    /// Identically zero.
    Zero,
    LogPower {
        alpha: BigRational,
        beta: BigRational,
    },
    Unknown,
}

fn int(k: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

fn log_power(alpha: BigRational) -> Growth {
    Growth::LogPower {
        alpha,
        beta: BigRational::zero(),
    }
}

impl WeightKind {
    pub fn tag(&self) -> &'static str {
        match self {
            WeightKind::InverseNormProduct(_) => "inverse_norm_product",
            WeightKind::DSWeighted(_) => "ds_weighted",
            WeightKind::MultiCount(_) => "multi_count",
            WeightKind::HarrapCount(_) => "harrap_count",
            WeightKind::LogPower(_) => "log_power",
            WeightKind::FrakM(_) => "frak_m",
            WeightKind::FrakMLog { .. } => "frak_m_log",
        }
    }

    /// Label of the sequences involved, `none` for pure log weights.
    pub fn family_label(&self) -> String {
        match self {
            WeightKind::InverseNormProduct(f) | WeightKind::DSWeighted(f) | WeightKind::MultiCount(f) => f.label(),
            WeightKind::HarrapCount(s) | WeightKind::FrakM(s) | WeightKind::FrakMLog { sequence: s, .. } => {
                s.spec().to_string()
            }
            WeightKind::LogPower(_) => "none".into(),
        }
    }

    /// True when every value is rational, so exact sums are possible.
    pub fn is_exact(&self) -> bool {
        !matches!(self, WeightKind::FrakMLog { .. }) && !matches!(self, WeightKind::LogPower(k) if *k > 0)
    }

    pub fn growth(&self) -> Growth {
        let prime_power_coprime = |f: &SequenceFamily| {
            f.is_mutually_coprime()
                && f.members()
                    .iter()
                    .all(|s| matches!(s.spec(), SequenceSpec::PrimePower { .. }))
        };
        let all_infinite = |f: &SequenceFamily| f.members().iter().all(|s| !s.is_finite());
        match self {
            WeightKind::InverseNormProduct(f) | WeightKind::DSWeighted(f) => {
                if prime_power_coprime(f) {
                    log_power(int(f.len()))
                } else {
                    Growth::Unknown
                }
            }
            WeightKind::MultiCount(f) => {
                if f.is_empty() {
                    Growth::Zero
                } else if all_infinite(f) {
                    log_power(int(f.len()))
                } else {
                    Growth::Unknown
                }
            }
            WeightKind::HarrapCount(s) | WeightKind::FrakM(s) => {
                if s.is_finite() {
                    Growth::Unknown
                } else {
                    log_power(BigRational::one())
                }
            }
            WeightKind::LogPower(k) => log_power(int(*k as usize)),
            WeightKind::FrakMLog { sequence, epsilon } => {
                if sequence.is_finite() {
                    Growth::Unknown
                } else {
                    log_power(int(2) + epsilon)
                }
            }
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::LogPower(k) => write!(f, "log_power[{k}]"),
            WeightKind::FrakMLog { epsilon, .. } => write!(f, "frak_m_log[{}]", crate::text::format_rational(epsilon)),
            other => f.write_str(other.tag()),
        }
    }
}

/// Tables a weight needs to be evaluated anywhere in `1..=limit`.
///
/// Immutable after construction, so chunks of a sweep can share it.
#[derive(Debug)]
pub struct WeightContext<'a> {
    kind: &'a WeightKind,
    sieve: Option<PhiSieve>,
    counter: Option<ProductCounter>,
    limit: u64,
}

impl<'a> WeightContext<'a> {
    pub fn new(kind: &'a WeightKind, limit: u64, budget: &Budget) -> Result<Self, CriteriaError> {
        let sieve = match kind {
            WeightKind::DSWeighted(_) => Some(PhiSieve::new(limit, budget)?),
            _ => None,
        };
        let counter = match kind {
            WeightKind::MultiCount(f) => Some(ProductCounter::new(f, limit)?),
            _ => None,
        };
        Ok(Self {
            kind,
            sieve,
            counter,
            limit,
        })
    }

    pub fn kind(&self) -> &WeightKind {
        self.kind
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn norm_product(f: &SequenceFamily, n: u64) -> Result<u128, CriteriaError> {
        let mut acc: u128 = 1;
        for s in f.members() {
            acc = acc.saturating_mul(s.pseudo_norm(n)?.element as u128);
        }
        Ok(acc)
    }

    fn check(&self, n: u64) {
        assert!(
            n >= 1 && n <= self.limit,
            "weight queried at {n}, outside 1..={}",
            self.limit
        );
    }

    /// `w(n)` exactly, or `None` when the weight involves a logarithm.
    pub fn exact(&self, n: u64) -> Result<Option<BigRational>, CriteriaError> {
        self.check(n);
        let int = |v: u128| BigRational::from_integer(BigInt::from(v));
        Ok(Some(match self.kind {
            WeightKind::InverseNormProduct(f) => int(Self::norm_product(f, n)?),
            WeightKind::DSWeighted(f) => {
                let phi = self.sieve.as_ref().expect("sieve built").get(n);
                BigRational::new(
                    BigInt::from(phi) * BigInt::from(Self::norm_product(f, n)?),
                    BigInt::from(n),
                )
            }
            WeightKind::MultiCount(_) => int(self.counter.as_ref().expect("counter built").m(n) as u128),
            WeightKind::HarrapCount(s) => int(s.capital_m(n)? as u128),
            WeightKind::LogPower(0) => BigRational::one(),
            WeightKind::FrakM(s) => s.frak_m(n)?,
            WeightKind::LogPower(_) | WeightKind::FrakMLog { .. } => return Ok(None),
        }))
    }

    /// `w(n)` in `f64` with its relative error bound.
    pub fn float(&self, n: u64) -> Result<(f64, f64), CriteriaError> {
        self.check(n);
        let big = |v: u128| if v > 1 << 53 { U } else { 0.0 };
        Ok(match self.kind {
            WeightKind::InverseNormProduct(f) => {
                let p = Self::norm_product(f, n)?;
                (p as f64, big(p))
            }
            WeightKind::DSWeighted(f) => {
                let phi = self.sieve.as_ref().expect("sieve built").get(n);
                let p = Self::norm_product(f, n)?;
                (phi as f64 / n as f64 * p as f64, 2.0 * U + big(p))
            }
            WeightKind::MultiCount(_) => (self.counter.as_ref().expect("counter built").m(n) as f64, 0.0),
            WeightKind::HarrapCount(s) => (s.capital_m(n)? as f64, 0.0),
            WeightKind::LogPower(0) => (1.0, 0.0),
            WeightKind::LogPower(k) => {
                let ln = (n as f64).ln();
                // ln is within 2u; powi adds at most one rounding per multiplication
                (ln.powi(*k as i32), (2.0 * *k as f64 + *k as f64) * U)
            }
            WeightKind::FrakM(s) => (s.frak_m_f64(n)?, U),
            WeightKind::FrakMLog { sequence, epsilon } => {
                let ln = (n as f64).ln();
                let e = ratio_to_f64(&(BigRational::one() + epsilon));
                let v = sequence.frak_m_f64(n)? * ln.powf(e);
                (v, U + e * 2.0 * U + 2.0 * U + e * U * ln.ln().abs() + U)
            }
        })
    }

    /// `w(n)` as a value with exactness information.
    pub fn value(&self, n: u64) -> Result<PsiValue, CriteriaError> {
        if let Some(r) = self.exact(n)? {
            return Ok(PsiValue::Exact(r));
        }
        let (value, rel_err) = self.float(n)?;
        Ok(PsiValue::Float { value, rel_err })
    }
}
