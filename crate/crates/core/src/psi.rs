//! Test functions `ψ` and the weighted `ψ₀(n) = ψ(n) · ∏ n_{k_i}`.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criteria::{Growth, WeightKind};
use crate::pseudo_norm::{inverse_norm_product, PseudoValueSequence, SequenceError, SequenceFamily, SequenceSpec};
use crate::scalar::{ratio_to_f64, Scalar};
use crate::text::{format_rational, rational_string, rational_vec};

/// Largest relative error a float evaluation may carry.
pub const MAX_REL_ERR: f64 = 1.0 / (1u64 << 40) as f64;

const U: f64 = f64::EPSILON / 2.0;

pub const DEFAULT_START: u64 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PsiError {
    #[error("n={n} is below the start index {start}")]
    BelowStart { n: u64, start: u64 },
    #[error("n={n} is past the end of the table (last defined index {last})")]
    BeyondTable { n: u64, last: u64 },
    #[error("start index {start} is below {min}, the smallest index where this family is defined")]
    InvalidStart { start: u64, min: u64 },
    #[error("parameter {0} must be non-negative")]
    Negative(&'static str),
    #[error("table is empty")]
    EmptyTable,
    #[error("float evaluation at n={n} has relative error {rel_err:e}, above 2^-40")]
    PrecisionLoss { n: u64, rel_err: f64 },
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PsiFamily {
    /// `c / (n (ln n)^a (ln ln n)^b)`.
    PowerLog {
        c: BigRational,
        a: BigRational,
        b: BigRational,
    },
    /// `1 / (n 𝔐(n) (ln n)^{1+ε})`.
    MixedHar {
        epsilon: BigRational,
        sequence: PseudoValueSequence,
    },
    /// `values[i] = ψ(start_index + i)`.
    Table {
        values: Vec<BigRational>,
    },
    Constant {
        c: BigRational,
    },
}

/// A validated test function together with the first index where it is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PsiConfig", into = "PsiConfig")]
pub struct PsiSpec {
    family: PsiFamily,
    start_index: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
enum FamilyConfig {
    PowerLog {
        #[serde(with = "rational_string")]
        c: BigRational,
        #[serde(with = "rational_string")]
        a: BigRational,
        #[serde(with = "rational_string")]
        b: BigRational,
    },
    MixedHar {
        #[serde(with = "rational_string")]
        epsilon: BigRational,
        sequence: SequenceSpec,
    },
    Table {
        #[serde(with = "rational_vec")]
        values: Vec<BigRational>,
    },
    Constant {
        #[serde(with = "rational_string")]
        c: BigRational,
    },
}

/// Config-file shape of a [`PsiSpec`], e.g.
/// `{"family":"power_log","c":"1","a":"2","b":"0","start_index":3}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsiConfig {
    #[serde(flatten)]
    family: FamilyConfig,
    #[serde(default = "default_start")]
    start_index: u64,
}

fn default_start() -> u64 {
    DEFAULT_START
}

impl TryFrom<PsiConfig> for PsiSpec {
    type Error = PsiError;

    fn try_from(cfg: PsiConfig) -> Result<Self, PsiError> {
        let family = match cfg.family {
            FamilyConfig::PowerLog { c, a, b } => PsiFamily::PowerLog { c, a, b },
            FamilyConfig::MixedHar { epsilon, sequence } => PsiFamily::MixedHar {
                epsilon,
                sequence: PseudoValueSequence::new(sequence)?,
            },
            FamilyConfig::Table { values } => PsiFamily::Table { values },
            FamilyConfig::Constant { c } => PsiFamily::Constant { c },
        };
        PsiSpec::new(family, cfg.start_index)
    }
}

impl From<PsiSpec> for PsiConfig {
    fn from(spec: PsiSpec) -> Self {
        let family = match spec.family {
            PsiFamily::PowerLog { c, a, b } => FamilyConfig::PowerLog { c, a, b },
            PsiFamily::MixedHar { epsilon, sequence } => FamilyConfig::MixedHar {
                epsilon,
                sequence: sequence.spec().clone(),
            },
            PsiFamily::Table { values } => FamilyConfig::Table { values },
            PsiFamily::Constant { c } => FamilyConfig::Constant { c },
        };
        PsiConfig {
            family,
            start_index: spec.start_index,
        }
    }
}

/// A value of `ψ`, either exact or a float with a relative error bound.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiValue {
    Exact(BigRational),
    Float { value: f64, rel_err: f64 },
}

impl PsiValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            PsiValue::Exact(r) => ratio_to_f64(r),
            PsiValue::Float { value, .. } => *value,
        }
    }

    pub fn rel_err(&self) -> f64 {
        match self {
            PsiValue::Exact(_) => 0.0,
            PsiValue::Float { rel_err, .. } => *rel_err,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            PsiValue::Exact(r) => Some(r),
            PsiValue::Float { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, PsiValue::Exact(_))
    }

    /// The value as an exact rational: the dyadic value of the float if inexact.
    pub fn to_ratio(&self) -> BigRational {
        match self {
            PsiValue::Exact(r) => r.clone(),
            PsiValue::Float { value, .. } => BigRational::from_float(*value).expect("finite psi value"),
        }
    }

    pub fn to_scalar<S: Scalar>(&self) -> S {
        match self {
            PsiValue::Exact(r) => S::from_ratio(r),
            PsiValue::Float { value, .. } => S::from_f64(*value),
        }
    }

    /// An `f64` enclosure `[lo, hi]` of the true value.
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            PsiValue::Exact(r) => {
                let v = ratio_to_f64(r);
                (v - v.abs() * U, v + v.abs() * U)
            }
            PsiValue::Float { value, rel_err } => {
                let slack = value.abs() * (rel_err + U);
                (value - slack, value + slack)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            PsiValue::Exact(r) => r.is_zero(),
            PsiValue::Float { value, .. } => *value == 0.0,
        }
    }

    /// Multiply by a positive integer.
    pub fn scale(&self, k: &BigUint) -> PsiValue {
        match self {
            PsiValue::Exact(r) => PsiValue::Exact(r * BigRational::from_integer(k.clone().into())),
            PsiValue::Float { value, rel_err } => {
                let kf = k.to_f64().unwrap_or(f64::INFINITY);
                // the integer may round on conversion, and the product rounds once
                let extra = if k.bits() > 53 { 2.0 * U } else { U };
                PsiValue::Float {
                    value: value * kf,
                    rel_err: rel_err + extra,
                }
            }
        }
    }
}

impl fmt::Display for PsiValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiValue::Exact(r) => f.write_str(&format_rational(r)),
            PsiValue::Float { value, rel_err } => write!(f, "{value:e} (±{rel_err:.1e} rel)"),
        }
    }
}

/// Outcome of an integral-test classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Diverges,
    Converges,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Diverges => "diverges",
            Verdict::Converges => "converges",
            Verdict::Unknown => "unknown",
        })
    }
}

impl PsiSpec {
    pub fn new(family: PsiFamily, start_index: u64) -> Result<Self, PsiError> {
        let min = match &family {
            PsiFamily::PowerLog { c, a, b } => {
                if c.is_negative() {
                    return Err(PsiError::Negative("c"));
                }
                if !b.is_zero() {
                    3
                } else if !a.is_zero() {
                    2
                } else {
                    1
                }
            }
            PsiFamily::MixedHar { epsilon, .. } => {
                if epsilon.is_negative() {
                    return Err(PsiError::Negative("epsilon"));
                }
                2
            }
            PsiFamily::Table { values } => {
                if values.is_empty() {
                    return Err(PsiError::EmptyTable);
                }
                if values.iter().any(Signed::is_negative) {
                    return Err(PsiError::Negative("values"));
                }
                1
            }
            PsiFamily::Constant { c } => {
                if c.is_negative() {
                    return Err(PsiError::Negative("c"));
                }
                1
            }
        };
        if start_index < min {
            return Err(PsiError::InvalidStart {
                start: start_index,
                min,
            });
        }
        Ok(Self { family, start_index })
    }

    pub fn power_log(c: BigRational, a: BigRational, b: BigRational) -> Result<Self, PsiError> {
        Self::new(PsiFamily::PowerLog { c, a, b }, DEFAULT_START)
    }

    pub fn mixed_har(epsilon: BigRational, sequence: PseudoValueSequence) -> Result<Self, PsiError> {
        Self::new(PsiFamily::MixedHar { epsilon, sequence }, DEFAULT_START)
    }

    pub fn constant(c: BigRational) -> Result<Self, PsiError> {
        Self::new(PsiFamily::Constant { c }, DEFAULT_START)
    }

    /// `values[i] = ψ(start + i)`.
    pub fn table(start: u64, values: Vec<BigRational>) -> Result<Self, PsiError> {
        Self::new(PsiFamily::Table { values }, start)
    }

    pub fn with_start(mut self, start_index: u64) -> Result<Self, PsiError> {
        self.start_index = start_index;
        Self::new(self.family, self.start_index)
    }

    pub fn family(&self) -> &PsiFamily {
        &self.family
    }

    pub fn start_index(&self) -> u64 {
        self.start_index
    }

    /// Last index where the function is defined; `None` if unbounded.
    pub fn end_index(&self) -> Option<u64> {
        match &self.family {
            PsiFamily::Table { values } => Some(self.start_index + values.len() as u64 - 1),
            _ => None,
        }
    }

    /// Whether every value is an exact rational.
    pub fn is_exact(&self) -> bool {
        match &self.family {
            PsiFamily::Table { .. } | PsiFamily::Constant { .. } => true,
            PsiFamily::PowerLog { a, b, .. } => a.is_zero() && b.is_zero(),
            PsiFamily::MixedHar { .. } => false,
        }
    }

    pub fn label(&self) -> String {
        let r = |x: &BigRational| {
            if x.denom().is_one() {
                x.numer().to_string()
            } else {
                format_rational(x)
            }
        };
        match &self.family {
            PsiFamily::PowerLog { c, a, b } => format!("power_log[{}:{}:{}]", r(c), r(a), r(b)),
            PsiFamily::MixedHar { epsilon, sequence } => format!("mixed_har[{}:{}]", r(epsilon), sequence.spec()),
            PsiFamily::Table { .. } => format!(
                "table[{}..={}]",
                self.start_index,
                self.end_index().expect("tables are finite")
            ),
            PsiFamily::Constant { c } => format!("constant[{}]", r(c)),
        }
    }

    /// `ψ(n)`.
    pub fn eval(&self, n: u64) -> Result<PsiValue, PsiError> {
        if n < self.start_index {
            return Err(PsiError::BelowStart {
                n,
                start: self.start_index,
            });
        }
        let value = match &self.family {
            PsiFamily::Constant { c } => PsiValue::Exact(c.clone()),
            PsiFamily::Table { values } => {
                let i = (n - self.start_index) as usize;
                match values.get(i) {
                    Some(v) => PsiValue::Exact(v.clone()),
                    None => {
                        return Err(PsiError::BeyondTable {
                            n,
                            last: self.end_index().expect("tables are finite"),
                        })
                    }
                }
            }
            PsiFamily::PowerLog { c, a, b } => power_log(c, a, b, n),
            PsiFamily::MixedHar { epsilon, sequence } => mixed_har(epsilon, sequence, n)?,
        };
        if value.rel_err() > MAX_REL_ERR {
            return Err(PsiError::PrecisionLoss {
                n,
                rel_err: value.rel_err(),
            });
        }
        Ok(value)
    }

    /// `ψ₀(n) = ψ(n) / ∏ |n|_{D_i}`.
    pub fn eval_psi0(&self, family: &SequenceFamily, n: u64) -> Result<PsiValue, PsiError> {
        let v = self.eval(n)?;
        let weight = inverse_norm_product(n, family)?;
        if weight.is_one() {
            return Ok(v);
        }
        Ok(v.scale(&weight))
    }

    /// Values on `lo..=hi` frozen into a table; floats keep their dyadic value.
    pub fn tabulate(&self, lo: u64, hi: u64) -> Result<PsiSpec, PsiError> {
        let values = (lo..=hi)
            .map(|n| self.eval(n).map(|v| v.to_ratio()))
            .collect::<Result<Vec<_>, _>>()?;
        PsiSpec::table(lo, values)
    }

    /// Compare consecutive values on `lo..=hi`.
    pub fn check_monotone(&self, lo: u64, hi: u64) -> Result<MonotonicityReport, PsiError> {
        let lo = lo.max(self.start_index);
        let mut report = MonotonicityReport {
            lo,
            hi,
            violations: Vec::new(),
            uncertain: Vec::new(),
            decreasing_from: None,
        };
        if hi <= lo {
            report.decreasing_from = Some(lo);
            return Ok(report);
        }
        let mut prev = self.eval(lo)?;
        for n in lo..hi {
            let next = self.eval(n + 1)?;
            match (&prev, &next) {
                (PsiValue::Exact(x), PsiValue::Exact(y)) => {
                    if y > x {
                        report.violations.push(n);
                    }
                }
                _ => {
                    let (_, prev_hi) = prev.bounds();
                    let (next_lo, next_hi) = next.bounds();
                    let (prev_lo, _) = prev.bounds();
                    if next_lo > prev_hi {
                        report.violations.push(n);
                    } else if next_hi > prev_lo && next.to_f64() != prev.to_f64() {
                        report.uncertain.push(n);
                    }
                }
            }
            prev = next;
        }
        let last_bad = report.violations.iter().chain(&report.uncertain).max().copied();
        report.decreasing_from = Some(last_bad.map_or(lo, |n| n + 1));
        Ok(report)
    }

    /// Integral-test verdict for `Σ ψ(n) w(n)` where both sides have a
    /// closed-form order of growth.
    pub fn analytic_verdict(&self, weight: &WeightKind) -> Verdict {
        let growth = weight.growth();
        match &self.family {
            PsiFamily::Table { .. } => Verdict::Unknown,
            PsiFamily::Constant { c } => {
                if c.is_zero() || growth == Growth::Zero {
                    return Verdict::Converges;
                }
                match growth {
                    Growth::LogPower { .. } => Verdict::Diverges,
                    _ => Verdict::Unknown,
                }
            }
            PsiFamily::PowerLog { c, a, b } => {
                if c.is_zero() || growth == Growth::Zero {
                    return Verdict::Converges;
                }
                match growth {
                    Growth::LogPower { alpha, beta } => bertrand(&(a - alpha), &(b - beta)),
                    _ => Verdict::Unknown,
                }
            }
            PsiFamily::MixedHar { epsilon, sequence } => {
                if growth == Growth::Zero {
                    return Verdict::Converges;
                }
                if sequence.is_finite() {
                    return Verdict::Unknown;
                }
                // 𝔐(n) grows like ln n for an infinite chain
                let two = BigRational::from_integer(2.into());
                match growth {
                    Growth::LogPower { alpha, beta } => bertrand(&(two + epsilon - alpha), &-beta),
                    _ => Verdict::Unknown,
                }
            }
        }
    }
}

impl fmt::Display for PsiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `Σ 1/(n (ln n)^a (ln ln n)^b)` diverges iff `a < 1`, or `a = 1` and `b <= 1`.
fn bertrand(a: &BigRational, b: &BigRational) -> Verdict {
    let one = BigRational::one();
    if *a < one || (*a == one && *b <= one) {
        Verdict::Diverges
    } else {
        Verdict::Converges
    }
}

fn pow_f64(x: f64, e: &BigRational) -> f64 {
    if e.is_zero() {
        return 1.0;
    }
    if e.denom().is_one() {
        if let Some(k) = e.numer().to_i32() {
            return x.powi(k);
        }
    }
    x.powf(ratio_to_f64(e))
}

/// Relative error of `x̃^e` when `x̃` carries relative error `dx`.
fn pow_err(x: f64, e: &BigRational, dx: f64) -> f64 {
    if e.is_zero() {
        return 0.0;
    }
    let ea = ratio_to_f64(&e.abs());
    // exponent rounding contributes |e| u |ln x| when e is not dyadic-exact
    let rounding = if BigRational::from_float(ratio_to_f64(e)).as_ref() == Some(e) {
        0.0
    } else {
        ea * U * x.ln().abs()
    };
    ea * dx + 2.0 * U + rounding
}

fn power_log(c: &BigRational, a: &BigRational, b: &BigRational, n: u64) -> PsiValue {
    if a.is_zero() && b.is_zero() {
        return PsiValue::Exact(c / BigRational::from_integer(n.into()));
    }
    let nf = n as f64;
    let ln = nf.ln();
    let lnln = ln.ln();
    let d_ln = 2.0 * U;
    let d_lnln = d_ln / lnln.abs() + 2.0 * U;
    let value = ratio_to_f64(c) / (nf * pow_f64(ln, a) * pow_f64(lnln, b));
    let rel = U // c
        + if n > 1 << 53 { U } else { 0.0 }
        + if a.is_zero() { 0.0 } else { pow_err(ln, a, d_ln) }
        + if b.is_zero() { 0.0 } else { pow_err(lnln, b, d_lnln) }
        + 3.0 * U;
    PsiValue::Float {
        value,
        rel_err: rel * 1.01,
    }
}

fn mixed_har(epsilon: &BigRational, seq: &PseudoValueSequence, n: u64) -> Result<PsiValue, PsiError> {
    let frak = seq.frak_m_f64(n)?;
    let nf = n as f64;
    let ln = nf.ln();
    let e = BigRational::one() + epsilon;
    let value = 1.0 / (nf * frak * pow_f64(ln, &e));
    let rel = U // 𝔐 rounding
        + if n > 1 << 53 { U } else { 0.0 }
        + pow_err(ln, &e, 2.0 * U)
        + 3.0 * U;
    Ok(PsiValue::Float {
        value,
        rel_err: rel * 1.01,
    })
}

/// Result of a consecutive-value scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub lo: u64,
    pub hi: u64,
    /// `n` with `ψ(n+1) > ψ(n)` certified.
    pub violations: Vec<u64>,
    /// `n` where the error bars do not decide the comparison.
    pub uncertain: Vec<u64>,
    /// Smallest `m` such that `ψ` is certified non-increasing on `m..=hi`.
    pub decreasing_from: Option<u64>,
}

impl MonotonicityReport {
    pub fn is_decreasing(&self) -> bool {
        self.violations.is_empty() && self.uncertain.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseudo_norm::PseudoValueSequence;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn two() -> PseudoValueSequence {
        PseudoValueSequence::constant_ratio(2).unwrap()
    }

    #[test]
    fn constant_and_table() {
        let c = PsiSpec::constant(r(1, 2)).unwrap();
        assert_eq!(c.eval(10).unwrap(), PsiValue::Exact(r(1, 2)));
        assert!(matches!(c.eval(2), Err(PsiError::BelowStart { n: 2, start: 3 })));
        let t = PsiSpec::table(4, vec![r(1, 8), r(1, 9)]).unwrap();
        assert_eq!(t.eval(4).unwrap(), PsiValue::Exact(r(1, 8)));
        assert!(matches!(t.eval(6), Err(PsiError::BeyondTable { n: 6, last: 5 })));
        assert_eq!(
            t.eval_psi0(&SequenceFamily::new(vec![]), 4).unwrap(),
            PsiValue::Exact(r(1, 8))
        );
    }

    #[test]
    fn mixed_har_example() {
        let psi = PsiSpec::mixed_har(r(0, 1), two()).unwrap();
        let v = psi.eval(8).unwrap();
        let expected = 1.0 / (8.0 * 2.5 * 8f64.ln());
        assert!((v.to_f64() - expected).abs() <= expected * 1e-15);
        assert!(v.rel_err() <= MAX_REL_ERR);
    }

    #[test]
    fn psi0_examples() {
        let fam2 = SequenceFamily::single(two());
        let half = PsiSpec::constant(r(1, 2)).unwrap();
        assert_eq!(half.eval_psi0(&fam2, 9).unwrap(), PsiValue::Exact(r(1, 2)));
        let fam23 = SequenceFamily::new(vec![two(), PseudoValueSequence::constant_ratio(3).unwrap()]);
        let twelfth = PsiSpec::constant(r(1, 12)).unwrap();
        assert_eq!(twelfth.eval_psi0(&fam23, 12).unwrap(), PsiValue::Exact(r(1, 1)));
    }

    #[test]
    fn power_log_monotone() {
        let psi = PsiSpec::power_log(r(1, 1), r(2, 1), r(0, 1)).unwrap();
        let report = psi.check_monotone(16, 10_000).unwrap();
        assert!(report.is_decreasing());
        assert_eq!(report.decreasing_from, Some(16));
        // an increasing table is reported
        let t = PsiSpec::table(3, vec![r(1, 2), r(1, 3), r(1, 2)]).unwrap();
        let report = t.check_monotone(3, 5).unwrap();
        assert_eq!(report.violations, vec![4]);
        assert_eq!(report.decreasing_from, Some(5));
    }

    #[test]
    fn verdicts() {
        let one = r(1, 1);
        let pl = |a, b| PsiSpec::power_log(one.clone(), r(a, 1), r(b, 1)).unwrap();
        assert_eq!(pl(1, 0).analytic_verdict(&WeightKind::LogPower(1)), Verdict::Diverges);
        assert_eq!(pl(2, 1).analytic_verdict(&WeightKind::LogPower(1)), Verdict::Diverges);
        assert_eq!(pl(2, 2).analytic_verdict(&WeightKind::LogPower(1)), Verdict::Converges);
        assert_eq!(pl(3, 0).analytic_verdict(&WeightKind::LogPower(1)), Verdict::Converges);
        let har = |e: BigRational| PsiSpec::mixed_har(e, two()).unwrap();
        assert_eq!(
            har(r(1, 10)).analytic_verdict(&WeightKind::FrakM(two())),
            Verdict::Converges
        );
        assert_eq!(
            har(r(0, 1)).analytic_verdict(&WeightKind::FrakM(two())),
            Verdict::Diverges
        );
        let t = PsiSpec::table(3, vec![one.clone()]).unwrap();
        assert_eq!(t.analytic_verdict(&WeightKind::LogPower(0)), Verdict::Unknown);
    }

    #[test]
    fn config_round_trip() {
        let s: PsiSpec = serde_json::from_str(r#"{"family":"power_log","c":"1","a":"2","b":"0"}"#).unwrap();
        assert_eq!(s, PsiSpec::power_log(r(1, 1), r(2, 1), r(0, 1)).unwrap());
        let s: PsiSpec = serde_json::from_str(
            r#"{"family":"mixed_har","epsilon":"1/2","sequence":{"rule":"prime_power","p":2},"start_index":4}"#,
        )
        .unwrap();
        assert_eq!(s.start_index(), 4);
        let back: PsiSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<PsiSpec>(r#"{"family":"constant","c":"-1"}"#).is_err());
        assert!(
            serde_json::from_str::<PsiSpec>(r#"{"family":"power_log","c":"1","a":"1","b":"1","start_index":2}"#)
                .is_err()
        );
    }
}
