use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::ApproxError;
use crate::arith::prime_factors;
use crate::scalar::ratio_to_f64;
use crate::text::{bigint_string, format_rational, rational_string};

const U: f64 = f64::EPSILON / 2.0;

/// Default number of steps the coprime scan may take on each side.
pub const DEFAULT_SCAN_CAP: u64 = 1_000_000;

/// An exactly representable real number `α`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TargetConfig", into = "TargetConfig")]
pub enum RealTarget {
    Rational(BigRational),
    /// `(a + b√d) / e` with `d` square-free, `b != 0`, `e > 0`.
    Quadratic {
        a: BigInt,
        b: BigInt,
        d: u64,
        e: BigInt,
    },
    /// `mantissa · 2^exponent`, known to within `2^-precision`.
    Dyadic {
        mantissa: BigInt,
        exponent: i64,
        precision: u32,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TargetConfig {
    Rational {
        #[serde(with = "rational_string")]
        value: BigRational,
    },
    Quadratic {
        #[serde(with = "bigint_string")]
        a: BigInt,
        #[serde(with = "bigint_string")]
        b: BigInt,
        d: u64,
        #[serde(with = "bigint_string")]
        e: BigInt,
    },
    Dyadic {
        #[serde(with = "bigint_string")]
        mantissa: BigInt,
        exponent: i64,
        precision: u32,
    },
}

impl TryFrom<TargetConfig> for RealTarget {
    type Error = ApproxError;

    fn try_from(cfg: TargetConfig) -> Result<Self, ApproxError> {
        match cfg {
            TargetConfig::Rational { value } => Ok(RealTarget::Rational(value)),
            TargetConfig::Quadratic { a, b, d, e } => RealTarget::quadratic(a, b, d, e),
            TargetConfig::Dyadic {
                mantissa,
                exponent,
                precision,
            } => Ok(RealTarget::dyadic(mantissa, exponent, precision)),
        }
    }
}

impl From<RealTarget> for TargetConfig {
    fn from(t: RealTarget) -> Self {
        match t {
            RealTarget::Rational(value) => TargetConfig::Rational { value },
            RealTarget::Quadratic { a, b, d, e } => TargetConfig::Quadratic { a, b, d, e },
            RealTarget::Dyadic {
                mantissa,
                exponent,
                precision,
            } => TargetConfig::Dyadic {
                mantissa,
                exponent,
                precision,
            },
        }
    }
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

fn is_square_free(d: u64) -> bool {
    let f = prime_factors(d);
    let mut m = d;
    for p in f {
        m /= p;
        if m.is_multiple_of(p) {
            return false;
        }
    }
    true
}

/// Sign of `a + b√d` for a non-square `d`.
fn sign_qd(a: &BigInt, b: &BigInt, d: u64) -> Ordering {
    let sa = a.sign();
    let sb = b.sign();
    if sb == Sign::NoSign {
        return a.cmp(&BigInt::zero());
    }
    if sa == Sign::NoSign || sa == sb {
        return if sb == Sign::Plus {
            Ordering::Greater
        } else {
            Ordering::Less
        };
    }
    // opposite signs: the larger square wins; equality needs d to be a square
    let lhs = a * a;
    let rhs = b * b * BigInt::from(d);
    let a_wins = lhs > rhs;
    let positive = if a_wins { sa == Sign::Plus } else { sb == Sign::Plus };
    if positive {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

fn big_to_f64(x: &BigInt) -> f64 {
    ratio_to_f64(&BigRational::from_integer(x.clone()))
}

/// `n α - p`, kept in the exact form of the target.
#[derive(Debug, Clone, PartialEq)]
pub enum Offset {
    Exact(BigRational),
    /// `(x + y√d) / e`.
    Quadratic {
        x: BigInt,
        y: BigInt,
        d: u64,
        e: BigInt,
    },
    /// Somewhere in `[center - radius, center + radius]`.
    Interval {
        center: BigRational,
        radius: BigRational,
    },
}

impl Offset {
    /// Compare with a rational; `None` when an interval does not decide it.
    pub fn cmp_rational(&self, q: &BigRational) -> Option<Ordering> {
        match self {
            Offset::Exact(v) => Some(v.cmp(q)),
            Offset::Quadratic { x, y, d, e } => {
                // (x + y√d)/e vs u/v  <=>  (v x - u e) + v y √d vs 0
                let u = q.numer();
                let v = q.denom();
                Some(sign_qd(&(v * x - u * e), &(v * y), *d))
            }
            Offset::Interval { center, radius } => {
                if radius.is_zero() {
                    return Some(center.cmp(q));
                }
                if &(center - radius) > q {
                    Some(Ordering::Greater)
                } else if &(center + radius) < q {
                    Some(Ordering::Less)
                } else {
                    None
                }
            }
        }
    }

    pub fn signum(&self) -> Option<Ordering> {
        self.cmp_rational(&BigRational::zero())
    }

    /// Whether `|self| <= bound`, if decidable.
    pub fn abs_le(&self, bound: &BigRational) -> Option<bool> {
        let upper = self.cmp_rational(bound).map(|o| o != Ordering::Greater);
        let lower = self.cmp_rational(&-bound).map(|o| o != Ordering::Less);
        match (upper, lower) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        }
    }

    /// Signed `f64` approximation.
    pub fn approx(&self) -> f64 {
        match self {
            Offset::Exact(v) => ratio_to_f64(v),
            Offset::Quadratic { x, y, d, e } => {
                let root = (*d as f64).sqrt();
                let ef = big_to_f64(e);
                if x.sign() == y.sign() || x.is_zero() {
                    (big_to_f64(x) + big_to_f64(y) * root) / ef
                } else {
                    // x + y√d = (x² - y² d) / (x - y√d) avoids cancellation
                    let num = x * x - y * y * BigInt::from(*d);
                    big_to_f64(&num) / ((big_to_f64(x) - big_to_f64(y) * root) * ef)
                }
            }
            Offset::Interval { center, .. } => ratio_to_f64(center),
        }
    }

    /// Bound on `|approx() - true value|`.
    pub fn abs_err(&self) -> f64 {
        let a = self.approx().abs();
        match self {
            Offset::Exact(_) => a * U,
            Offset::Quadratic { .. } => a * 12.0 * U,
            Offset::Interval { radius, .. } => ratio_to_f64(radius) * (1.0 + 2.0 * U) + a * U,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Offset::Exact(v) => Some(v),
            _ => None,
        }
    }
}

/// Nearest integer `p` to `nα` and `nα - p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distance {
    pub p: BigInt,
    pub offset: Offset,
    /// `|nα - p|` in `f64`.
    pub value: f64,
    pub abs_err: f64,
}

impl Distance {
    fn new(p: BigInt, offset: Offset) -> Self {
        Self {
            value: offset.approx().abs(),
            abs_err: offset.abs_err(),
            p,
            offset,
        }
    }

    /// `|nα - p|` exactly, for rational targets.
    pub fn exact(&self) -> Option<BigRational> {
        self.offset.exact().map(|v| v.abs())
    }
}

impl RealTarget {
    pub fn rational(p: i64, q: i64) -> Result<Self, ApproxError> {
        if q <= 0 {
            return Err(ApproxError::InvalidTarget(format!("denominator {q} must be positive")));
        }
        Ok(RealTarget::Rational(BigRational::new(p.into(), q.into())))
    }

    pub fn quadratic(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        d: u64,
        e: impl Into<BigInt>,
    ) -> Result<Self, ApproxError> {
        let (a, b, e) = (a.into(), b.into(), e.into());
        if d < 2 || !is_square_free(d) {
            return Err(ApproxError::InvalidTarget(format!(
                "d={d} must be square-free and at least 2"
            )));
        }
        if b.is_zero() {
            return Err(ApproxError::InvalidTarget("b must be non-zero".into()));
        }
        if !e.is_positive() {
            return Err(ApproxError::InvalidTarget("e must be positive".into()));
        }
        Ok(RealTarget::Quadratic { a, b, d, e })
    }

    /// `(1 + √5) / 2`.
    pub fn golden_ratio() -> Self {
        RealTarget::quadratic(1, 1, 5, 2).expect("valid")
    }

    pub fn dyadic(mantissa: impl Into<BigInt>, exponent: i64, precision: u32) -> Self {
        RealTarget::Dyadic {
            mantissa: mantissa.into(),
            exponent,
            precision,
        }
    }

    /// A sample in `[0, 1)`: `bits / 2^64`, exact.
    pub fn from_u64_fraction(bits: u64) -> Self {
        RealTarget::Rational(BigRational::new(bits.into(), pow2(64)))
    }

    fn dyadic_value(mantissa: &BigInt, exponent: i64) -> BigRational {
        if exponent >= 0 {
            BigRational::from_integer(mantissa << exponent as u64)
        } else {
            BigRational::new(mantissa.clone(), pow2(exponent.unsigned_abs()))
        }
    }

    pub fn approx(&self) -> f64 {
        match self {
            RealTarget::Rational(r) => ratio_to_f64(r),
            RealTarget::Quadratic { a, b, d, e } => Offset::Quadratic {
                x: a.clone(),
                y: b.clone(),
                d: *d,
                e: e.clone(),
            }
            .approx(),
            RealTarget::Dyadic { mantissa, exponent, .. } => ratio_to_f64(&Self::dyadic_value(mantissa, *exponent)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            RealTarget::Rational(r) => format_rational(r),
            RealTarget::Quadratic { a, b, d, e } => format!("({a}+{b}*sqrt({d}))/{e}"),
            RealTarget::Dyadic {
                mantissa,
                exponent,
                precision,
            } => format!("{mantissa}*2^{exponent}+-2^-{precision}"),
        }
    }

    /// `nα - p`.
    pub fn offset(&self, n: u64, p: &BigInt) -> Offset {
        let nb = BigInt::from(n);
        match self {
            RealTarget::Rational(r) => {
                Offset::Exact(r * BigRational::from_integer(nb) - BigRational::from_integer(p.clone()))
            }
            RealTarget::Quadratic { a, b, d, e } => Offset::Quadratic {
                x: &nb * a - p * e,
                y: &nb * b,
                d: *d,
                e: e.clone(),
            },
            RealTarget::Dyadic {
                mantissa,
                exponent,
                precision,
            } => Offset::Interval {
                center: Self::dyadic_value(&(&nb * mantissa), *exponent) - BigRational::from_integer(p.clone()),
                radius: BigRational::new(nb, pow2(*precision as u64)),
            },
        }
    }

    /// An integer within one of `nα`.
    pub(crate) fn floor_guess(&self, n: u64) -> BigInt {
        let nb = BigInt::from(n);
        match self {
            RealTarget::Rational(r) => (r * BigRational::from_integer(nb)).floor().to_integer(),
            RealTarget::Quadratic { a, b, d, e } => {
                let y = &nb * b;
                let s = (&y * &y * BigInt::from(*d)).sqrt();
                let floor_y_root = if y.is_positive() { s } else { -s - 1 };
                (&nb * a + floor_y_root).div_floor(e)
            }
            RealTarget::Dyadic { mantissa, exponent, .. } => {
                Self::dyadic_value(&(&nb * mantissa), *exponent).floor().to_integer()
            }
        }
    }
}

impl fmt::Display for RealTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `‖nα‖`: the nearest integer `p` and `|nα - p|`; ties go to the smaller `p`.
pub fn dist_to_integers(n: u64, alpha: &RealTarget) -> Result<Distance, ApproxError> {
    assert!(n >= 1, "n must be positive");
    let half = BigRational::new(1.into(), 2.into());
    let neg_half = -half.clone();
    let mut p = alpha.floor_guess(n);
    // p is the unique integer with -1/2 < nα - p <= 1/2
    loop {
        let o = alpha.offset(n, &p);
        match o.cmp_rational(&half) {
            None => return Err(ApproxError::PrecisionInsufficient { n }),
            Some(Ordering::Greater) => {
                p += 1;
                continue;
            }
            _ => {}
        }
        match o.cmp_rational(&neg_half) {
            None => return Err(ApproxError::PrecisionInsufficient { n }),
            Some(Ordering::Less | Ordering::Equal) => {
                p -= 1;
                continue;
            }
            _ => {}
        }
        return Ok(Distance::new(p, o));
    }
}

fn coprime_to(p: &BigInt, n: u64) -> bool {
    let r = p.mod_floor(&BigInt::from(n)).to_u64().expect("residue below n");
    r.gcd(&n) == 1
}

/// `‖nα‖′`: the closest integer `p` coprime to `n`, scanning outwards from the
/// nearest integer at most `cap` steps on each side.
pub fn coprime_dist(n: u64, alpha: &RealTarget, cap: u64) -> Result<Distance, ApproxError> {
    let nearest = dist_to_integers(n, alpha)?;
    if coprime_to(&nearest.p, n) {
        return Ok(nearest);
    }
    let mut below = None;
    let mut above = None;
    for j in 1..=cap {
        if below.is_none() {
            let q = &nearest.p - j;
            if coprime_to(&q, n) {
                below = Some(q);
            }
        }
        if above.is_none() {
            let q = &nearest.p + j;
            if coprime_to(&q, n) {
                above = Some(q);
            }
        }
        if below.is_some() && above.is_some() {
            break;
        }
    }
    let p = match (below, above) {
        (None, None) => return Err(ApproxError::ScanCapExceeded { n, cap }),
        (Some(q), None) | (None, Some(q)) => q,
        (Some(lo), Some(hi)) => {
            // (nα - lo) - (hi - nα) = 2nα - (lo + hi)
            match alpha.offset(2 * n, &(&lo + &hi)).signum() {
                None => return Err(ApproxError::PrecisionInsufficient { n }),
                Some(Ordering::Greater) => hi,
                Some(_) => lo,
            }
        }
    };
    let o = alpha.offset(n, &p);
    Ok(Distance::new(p, o))
}
