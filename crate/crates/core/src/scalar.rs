//! Scalar abstraction shared by the series, block and identity routines.
//!
//! Every summation in the crate is written once over [`Scalar`] and then
//! instantiated with `f64` (fast, compensated) or [`BigRational`] (exact).
//! `f32` is supported for completeness, mostly useful for quick previews.

use std::fmt::Debug;
use std::ops::AddAssign;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

/// A number type the series machinery can accumulate into.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Send + Sync + for<'a> AddAssign<&'a Self> + 'static {
    /// True when additions and multiplications are exact.
    const EXACT: bool;

    /// Round (or copy, for exact types) a rational into this type.
    fn from_ratio(r: &BigRational) -> Self;

    /// Convert a binary float. Exact types take the dyadic value of `x` verbatim.
    fn from_f64(x: f64) -> Self;

    fn from_u64(n: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// Unit roundoff of one arithmetic operation; zero for exact types.
    fn unit_roundoff() -> f64;

    /// The value as an exact rational, for exact types only.
    fn exact_ratio(&self) -> Option<BigRational> {
        None
    }

    /// One step of compensated summation. Exact types ignore `carry`.
    fn accumulate(sum: &mut Self, carry: &mut Self, x: &Self) {
        let _ = carry;
        *sum += x;
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_ratio(r: &BigRational) -> Self {
                ratio_to_f64(r) as $t
            }

            fn from_f64(x: f64) -> Self {
                x as $t
            }

            fn from_u64(n: u64) -> Self {
                n as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn unit_roundoff() -> f64 {
                (<$t>::EPSILON as f64) / 2.0
            }

            // Neumaier's variant of Kahan summation.
            fn accumulate(sum: &mut Self, carry: &mut Self, x: &Self) {
                let t = *sum + *x;
                if sum.abs() >= x.abs() {
                    *carry += (*sum - t) + *x;
                } else {
                    *carry += (*x - t) + *sum;
                }
                *sum = t;
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }

    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn unit_roundoff() -> f64 {
        0.0
    }

    fn exact_ratio(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

/// Nearest-ish `f64` of a big rational, robust to numerators and
/// denominators far outside the `f64` range.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    if r.is_zero() {
        return 0.0;
    }
    // Shift both sides into range, keeping 64 significant bits of the quotient.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 64;
    let scaled = if shift >= 0 {
        r.numer() / (r.denom() << shift as usize)
    } else {
        (r.numer() << (-shift) as usize) / r.denom()
    };
    scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
}

/// Running compensated sum over any [`Scalar`].
#[derive(Debug, Clone)]
pub struct CompensatedSum<S: Scalar> {
    sum: S,
    carry: S,
    terms: u64,
}

impl<S: Scalar> Default for CompensatedSum<S> {
    fn default() -> Self {
        Self {
            sum: S::zero(),
            carry: S::zero(),
            terms: 0,
        }
    }
}

impl<S: Scalar> CompensatedSum<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: &S) {
        S::accumulate(&mut self.sum, &mut self.carry, x);
        self.terms += 1;
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }

    pub fn value(&self) -> S {
        self.sum.clone() + self.carry.clone()
    }
}

impl<S: Scalar> Extend<S> for CompensatedSum<S> {
    fn extend<I: IntoIterator<Item = S>>(&mut self, iter: I) {
        for x in iter {
            self.add(&x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive() {
        let mut acc = CompensatedSum::<f64>::new();
        let mut naive = 0.0f64;
        acc.add(&1.0);
        naive += 1.0;
        for _ in 0..10_000 {
            acc.add(&1e-16);
            naive += 1e-16;
        }
        assert_eq!(naive, 1.0);
        assert!((acc.value() - (1.0 + 1e-12)).abs() < 1e-20);
    }

    #[test]
    fn exact_from_f64_is_dyadic() {
        let r = BigRational::from_f64(0.1);
        assert_eq!(Scalar::to_f64(&r), 0.1);
        assert!(r.denom().bits() > 50);
    }

    #[test]
    fn huge_ratio_to_f64() {
        let big = BigInt::from(1u8) << 3000usize;
        let r = BigRational::new(big.clone() * 3, big * 4);
        assert_eq!(ratio_to_f64(&r), 0.75);
        let tiny = BigRational::new(BigInt::from(1), BigInt::from(1u8) << 2000usize);
        assert_eq!(ratio_to_f64(&tiny), 0.0);
        let r = BigRational::new(BigInt::from(1u8) << 1100usize, BigInt::from(3) << 1090usize);
        assert!((ratio_to_f64(&r) - 1024.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn f32_accumulates() {
        let mut acc = CompensatedSum::<f32>::new();
        acc.extend((0..100).map(|_| 0.01f32));
        assert!((acc.value() - 1.0).abs() < 1e-6);
    }
}
