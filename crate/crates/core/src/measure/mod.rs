//! The sets `E_n(ψ)` on the circle, their exact Lebesgue measure, finite
//! unions and Monte Carlo hit fractions.

mod interval;
mod monte_carlo;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::euler_phi;
use crate::pseudo_norm::{SequenceError, SequenceFamily};
use crate::psi::{PsiError, PsiSpec, PsiValue};
use crate::scalar::Scalar;

pub use interval::IntervalSet;
pub use monte_carlo::{monte_carlo_hits, monte_carlo_range, MonteCarlo, MonteCarloReport, MONTE_CARLO_CSV_HEADER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("ψ₀({n}) is not an exact rational")]
    NotExact { n: u64 },
    #[error("negative {0}")]
    Negative(&'static str),
    #[error("scale factor must be at least 1")]
    ScaleBelowOne,
    #[error("invalid range {lo}..={hi}")]
    InvalidRange { lo: u64, hi: u64 },
    #[error("at least one sample is required")]
    NoSamples,
    #[error("invalid interval set: {0}")]
    InvalidSet(String),
    #[error(transparent)]
    Psi(#[from] PsiError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// `E_n = ⋃_{1<=p<=n, (p,n)=1} ((p - ψ₀)/n, (p + ψ₀)/n)` reduced mod 1.
pub fn build_e_n<T: Scalar>(n: u64, psi0: &T) -> Result<IntervalSet<T>, MeasureError> {
    if n == 0 {
        return Err(MeasureError::InvalidRange { lo: 1, hi: 0 });
    }
    if psi0.partial_cmp(&T::zero()) == Some(std::cmp::Ordering::Less) {
        return Err(MeasureError::Negative("ψ₀"));
    }
    if psi0.is_zero() {
        return Ok(IntervalSet::empty());
    }
    let coprime = (1..=n).filter(|p| p.gcd(&n) == 1);
    if let Some(q) = psi0.exact_ratio() {
        // (p d ∓ a) / (n d) for ψ₀ = a/d, in integers
        let (a, d) = (q.numer(), q.denom());
        let den = BigInt::from(n) * d;
        return IntervalSet::from_intervals(coprime.map(|p| {
            let c = BigInt::from(p) * d;
            let l = BigRational::new(&c - a, den.clone());
            let r = BigRational::new(c + a, den.clone());
            (T::from_ratio(&l), T::from_ratio(&r))
        }));
    }
    let nn = T::from_u64(n);
    let half = psi0.clone() / nn.clone();
    IntervalSet::from_intervals(coprime.map(|p| {
        let c = T::from_u64(p) / nn.clone();
        (c.clone() - half.clone(), c + half.clone())
    }))
}

/// `2 φ(n) ψ₀ / n`, the measure of `E_n` when its intervals are disjoint.
pub fn formula_measure(n: u64, psi0: &BigRational) -> BigRational {
    BigRational::new(BigInt::from(2 * euler_phi(n)), BigInt::from(n)) * psi0
}

/// Sum of rationals as a balanced tree, keeping intermediate denominators small.
pub(crate) fn pairwise_sum(mut parts: Vec<BigRational>) -> BigRational {
    while parts.len() > 1 {
        parts = parts
            .chunks(2)
            .map(|c| if c.len() == 2 { &c[0] + &c[1] } else { c[0].clone() })
            .collect();
    }
    parts.pop().unwrap_or_else(BigRational::zero)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnionReport {
    pub n0: u64,
    pub n1: u64,
    pub set: IntervalSet<BigRational>,
    /// `λ(⋃ E_n)`.
    #[serde(with = "crate::text::rational_string")]
    pub measure: BigRational,
    /// `Σ λ(E_n)`.
    #[serde(with = "crate::text::rational_string")]
    pub tail_sum: BigRational,
    /// `Σ 2 φ(n) ψ₀(n) / n`.
    #[serde(with = "crate::text::rational_string")]
    pub bound_sum: BigRational,
}

fn exact_psi0(psi: &PsiSpec, family: &SequenceFamily, n: u64) -> Result<BigRational, MeasureError> {
    match psi.eval_psi0(family, n)? {
        PsiValue::Exact(r) => Ok(r),
        PsiValue::Float { .. } => Err(MeasureError::NotExact { n }),
    }
}

/// `⋃_{N0<=n<=N1} E_n(ψ₀)` with `ψ₀ = ψ · ∏ n_{k_i}`, exactly.
pub fn union_range(psi: &PsiSpec, family: &SequenceFamily, n0: u64, n1: u64) -> Result<UnionReport, MeasureError> {
    if n0 > n1 || n0 < psi.start_index() {
        return Err(MeasureError::InvalidRange { lo: n0, hi: n1 });
    }
    let parts = (n0..=n1)
        .into_par_iter()
        .map(|n| {
            let psi0 = exact_psi0(psi, family, n)?;
            let set = build_e_n(n, &psi0)?;
            Ok((set, formula_measure(n, &psi0)))
        })
        .collect::<Result<Vec<_>, MeasureError>>()?;
    let tail_sum = pairwise_sum(parts.iter().map(|(s, _)| s.measure().clone()).collect());
    let bound_sum = pairwise_sum(parts.iter().map(|(_, b)| b.clone()).collect());
    let set = IntervalSet::union_all(parts.iter().map(|(s, _)| s));
    Ok(UnionReport {
        n0,
        n1,
        measure: set.measure().clone(),
        set,
        tail_sum,
        bound_sum,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Subhomogeneity {
    /// `λ(E_n(t ψ₀))`.
    #[serde(with = "crate::text::rational_string")]
    pub scaled: BigRational,
    /// `t λ(E_n(ψ₀))`.
    #[serde(with = "crate::text::rational_string")]
    pub bound: BigRational,
    pub holds: bool,
}

/// `λ(E_n(t ψ₀)) <= t λ(E_n(ψ₀))` for a single `n`.
pub fn subhomogeneity_check(n: u64, psi0: &BigRational, t: &BigRational) -> Result<Subhomogeneity, MeasureError> {
    if t < &BigRational::one() {
        return Err(MeasureError::ScaleBelowOne);
    }
    if psi0.is_negative() {
        return Err(MeasureError::Negative("ψ₀"));
    }
    let scaled = build_e_n(n, &(psi0 * t))?.measure().clone();
    let bound = build_e_n(n, psi0)?.measure() * t;
    Ok(Subhomogeneity {
        holds: scaled <= bound,
        scaled,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseudo_norm::PseudoValueSequence;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn e_n_examples() {
        assert!(build_e_n(7, &r(0, 1)).unwrap().is_empty());
        let e4 = build_e_n(4, &r(1, 8)).unwrap();
        assert_eq!(e4.intervals(), &[(r(7, 32), r(9, 32)), (r(23, 32), r(25, 32))]);
        assert_eq!(e4.measure(), &r(1, 8));
        assert_eq!(formula_measure(4, &r(1, 8)), r(1, 8));
        let e1 = build_e_n(1, &r(1, 4)).unwrap();
        assert_eq!(e1.intervals(), &[(r(0, 1), r(1, 4)), (r(3, 4), r(1, 1))]);
        assert_eq!(e1.measure(), &r(1, 2));
        assert_eq!(build_e_n(3, &r(2, 1)).unwrap(), IntervalSet::full());
        assert!(build_e_n(3, &r(-1, 2)).is_err());
    }

    #[test]
    fn unions() {
        let none = SequenceFamily::new(Vec::new());
        let zero = PsiSpec::constant(r(0, 1)).unwrap();
        let rep = union_range(&zero, &none, 3, 50).unwrap();
        assert!(rep.set.is_empty() && rep.tail_sum.is_zero());

        let eighth = PsiSpec::constant(r(1, 8)).unwrap().with_start(2).unwrap();
        let rep = union_range(&eighth, &none, 2, 3).unwrap();
        let e2 = build_e_n(2, &r(1, 8)).unwrap();
        let e3 = build_e_n(3, &r(1, 8)).unwrap();
        assert_eq!(rep.tail_sum, e2.measure() + e3.measure());
        assert_eq!(rep.measure, rep.tail_sum);
        assert!(rep.measure <= rep.tail_sum);
        rep.set.validate().unwrap();
    }

    #[test]
    fn not_exact() {
        let two = PseudoValueSequence::constant_ratio(2).unwrap();
        let psi = PsiSpec::mixed_har(r(0, 1), two).unwrap();
        let err = union_range(&psi, &SequenceFamily::new(Vec::new()), 3, 5).unwrap_err();
        assert!(matches!(err, MeasureError::NotExact { n: 3 }));
    }

    #[test]
    fn subhomogeneity_examples() {
        let one = subhomogeneity_check(4, &r(1, 8), &r(1, 1)).unwrap();
        assert_eq!(one.scaled, one.bound);
        let two = subhomogeneity_check(4, &r(1, 8), &r(2, 1)).unwrap();
        assert_eq!((two.scaled.clone(), two.bound.clone()), (r(1, 4), r(1, 4)));
        let lossy = subhomogeneity_check(6, &r(1, 1), &r(2, 1)).unwrap();
        assert!(lossy.holds && lossy.scaled < lossy.bound);
        assert_eq!(lossy.scaled, r(1, 1));
        assert!(subhomogeneity_check(6, &r(1, 1), &r(1, 2)).is_err());
    }
}
