use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{CriteriaError, WeightContext, WeightKind};
use crate::budget::Budget;
use crate::pseudo_norm::{multi_count_m, sorted_products, PseudoValueSequence, SequenceFamily};
use crate::psi::PsiSpec;
use crate::scalar::{ratio_to_f64, CompensatedSum};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbelCheck {
    /// `Σ_{n<=N} ψ(n) a(n)`.
    #[serde(with = "crate::text::rational_string")]
    pub lhs: BigRational,
    /// `Σ_{n<=N} (ψ(n) - ψ(n+1)) A(n) + ψ(N+1) A(N)`.
    #[serde(with = "crate::text::rational_string")]
    pub rhs: BigRational,
    pub equal: bool,
}

/// Both sides of the summation-by-parts identity, in exact arithmetic.
///
/// `a(n)` is the weight; logarithmic weights enter through the exact dyadic
/// value of their `f64` evaluation, which keeps the identity exact.
pub fn abel_identity_check(
    psi: &PsiSpec,
    weight: &WeightKind,
    n_end: u64,
    budget: &Budget,
) -> Result<AbelCheck, CriteriaError> {
    let start = psi.start_index();
    if n_end < start {
        return Err(CriteriaError::InvalidRange { lo: start, hi: n_end });
    }
    if !psi.is_exact() {
        return Err(CriteriaError::Domain(format!(
            "the identity check needs an exact psi, got {}",
            psi.label()
        )));
    }
    let ctx = WeightContext::new(weight, n_end + 1, budget)?;
    let a = |n: u64| -> Result<BigRational, CriteriaError> { Ok(ctx.value(n)?.to_ratio()) };
    let psi_at = |n: u64| -> Result<BigRational, CriteriaError> { Ok(psi.eval(n)?.to_ratio()) };

    let mut lhs = BigRational::zero();
    for n in start..=n_end {
        lhs += psi_at(n)? * a(n)?;
    }

    let mut big_a = BigRational::zero();
    let mut rhs = BigRational::zero();
    let mut next = psi_at(start)?;
    for n in start..=n_end {
        big_a += a(n)?;
        let cur = next;
        next = psi_at(n + 1)?;
        rhs += (&cur - &next) * &big_a;
    }
    rhs += next * big_a;
    Ok(AbelCheck {
        equal: lhs == rhs,
        lhs,
        rhs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichPoint {
    pub n: u64,
    /// `Σ_{j<=n} 1/∏|j|_{D_i}`.
    pub sum: BigUint,
    pub m: u64,
    /// `Σ <= n · M(n)`.
    pub upper_ok: bool,
    /// `Σ / (n · M(n))`, undefined while `M(n) = 0`.
    #[serde(with = "crate::text::rational_opt")]
    pub lower_ratio: Option<BigRational>,
}

fn require_coprime(family: &SequenceFamily) -> Result<(), CriteriaError> {
    if family.is_mutually_coprime() {
        Ok(())
    } else {
        Err(CriteriaError::NotMutuallyCoprime)
    }
}

fn norm_product(family: &SequenceFamily, j: u64) -> Result<BigUint, CriteriaError> {
    let mut acc = BigUint::from(1u8);
    for s in family.members() {
        acc *= s.pseudo_norm(j)?.element;
    }
    Ok(acc)
}

fn make_point(n: u64, sum: &BigUint, m: u64) -> SandwichPoint {
    let bound = BigUint::from(n) * m;
    SandwichPoint {
        n,
        sum: sum.clone(),
        m,
        upper_ok: *sum <= bound,
        lower_ratio: (m > 0).then(|| BigRational::new(BigInt::from(sum.clone()), BigInt::from(bound))),
    }
}

/// The two-sided comparison of `Σ_{j<=n} 1/∏|j|` with `n M(n)` at one `n`.
pub fn sandwich_point(family: &SequenceFamily, n: u64) -> Result<SandwichPoint, CriteriaError> {
    require_coprime(family)?;
    let mut sum = BigUint::zero();
    for j in 1..=n {
        sum += norm_product(family, j)?;
    }
    Ok(make_point(n, &sum, multi_count_m(n, family)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichSweep {
    pub n_max: u64,
    /// Every `n` where the upper bound fails.
    pub upper_failures: Vec<u64>,
    /// Smallest defined lower ratio and where it occurs.
    #[serde(with = "crate::text::rational_at_opt")]
    pub min_ratio: Option<(BigRational, u64)>,
    /// Largest defined lower ratio and where it occurs.
    #[serde(with = "crate::text::rational_at_opt")]
    pub max_ratio: Option<(BigRational, u64)>,
    pub last: SandwichPoint,
}

/// [`sandwich_point`] at every `n <= n_max`, incrementally.
pub fn sandwich_sweep(family: &SequenceFamily, n_max: u64) -> Result<SandwichSweep, CriteriaError> {
    require_coprime(family)?;
    if n_max == 0 {
        return Err(CriteriaError::InvalidRange { lo: 1, hi: 0 });
    }
    let products = sorted_products(family, n_max)?;
    let mut sum = BigUint::zero();
    let mut count = 0usize;
    let mut upper_failures = Vec::new();
    let mut min_ratio: Option<(BigRational, u64)> = None;
    let mut max_ratio: Option<(BigRational, u64)> = None;
    let mut last = None;
    for n in 1..=n_max {
        sum += norm_product(family, n)?;
        while count < products.len() && products[count] <= n {
            count += 1;
        }
        let point = make_point(n, &sum, count as u64 - 1);
        if !point.upper_ok {
            upper_failures.push(n);
        }
        if let Some(r) = &point.lower_ratio {
            if min_ratio.as_ref().is_none_or(|(m, _)| r < m) {
                min_ratio = Some((r.clone(), n));
            }
            if max_ratio.as_ref().is_none_or(|(m, _)| r > m) {
                max_ratio = Some((r.clone(), n));
            }
        }
        last = Some(point);
    }
    Ok(SandwichSweep {
        n_max,
        upper_failures,
        min_ratio,
        max_ratio,
        last: last.expect("n_max >= 1"),
    })
}

/// A non-decreasing counting function.
#[derive(Debug, Clone, PartialEq)]
pub enum Counter {
    /// `M(n)` of a family.
    MultiCount(SequenceFamily),
    /// `𝔐(n)` of one sequence.
    FrakM(PseudoValueSequence),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRatio {
    pub n: u64,
    /// `N c(N) / Σ_{n<=N} c(n)`.
    #[serde(with = "crate::text::rational_string")]
    pub ratio: BigRational,
    pub value: f64,
}

/// `N c(N) / Σ_{n<=N} c(n)`, summed exactly over the steps of `c`.
pub fn linear_growth_ratio(counter: &Counter, n: u64) -> Result<GrowthRatio, CriteriaError> {
    if n < 2 {
        return Err(CriteriaError::Domain("linear growth ratio needs N >= 2".into()));
    }
    let int = |v: u128| BigRational::from_integer(BigInt::from(v));
    let (last, total) = match counter {
        Counter::MultiCount(f) => {
            let products = sorted_products(f, n)?;
            // Σ_{n'<=N} (#{t <= n'} - 1)
            let steps: u128 = products.iter().map(|&t| (n - t + 1) as u128).sum();
            (int(products.len() as u128 - 1), int(steps - n as u128))
        }
        Counter::FrakM(s) => {
            let elements = s.elements_up_to(n)?;
            let mut total = BigRational::zero();
            for (k, &e) in elements.iter().enumerate() {
                total += s.density(k)? * int((n - e + 1) as u128);
            }
            (s.frak_m(n)?, total)
        }
    };
    if total.is_zero() {
        return Err(CriteriaError::Domain(format!("counter vanishes on 1..={n}")));
    }
    let ratio = last * int(n as u128) / total;
    Ok(GrowthRatio {
        n,
        value: ratio_to_f64(&ratio),
        ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppleReport {
    /// `sup_{n<=N} Σ_{n_k<=n} n_k ln(n/n_k) / n`.
    pub sup_ratio: f64,
    pub argmax: u64,
    pub block_index: u32,
    /// `Σ 1/ln n_k` over `n_k` in `(2^{2^b}, 2^{2^{b+1}}]`.
    pub block_sum: f64,
}

/// Highest block index accepted by [`apple_checks`].
const MAX_APPLE_BLOCK: u32 = 12;

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("in range").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("64 bits").ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn apple_checks(seq: &PseudoValueSequence, n_max: u64, block: u32) -> Result<AppleReport, CriteriaError> {
    if n_max < 2 {
        return Err(CriteriaError::Domain("apple checks need N >= 2".into()));
    }
    if block > MAX_APPLE_BLOCK {
        return Err(CriteriaError::BlockBeyondBudget {
            block,
            upper: format!("2^{}", 1u64 << (block + 1)),
        });
    }
    let elements = seq.elements_up_to(n_max)?.to_vec();
    let chunk = 1u64 << 14;
    let (sup_ratio, argmax) = (0..n_max.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk + 1;
            let hi = ((c + 1) * chunk).min(n_max);
            let mut best = (f64::NEG_INFINITY, 0u64);
            for n in lo..=hi {
                let nf = n as f64;
                let s: f64 = elements
                    .iter()
                    .take_while(|&&e| e <= n)
                    .map(|&e| e as f64 * (nf / e as f64).ln())
                    .sum();
                let v = s / nf;
                if v > best.0 {
                    best = (v, n);
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, 0),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );

    let lo = BigUint::from(1u8) << (1u64 << block);
    let hi = BigUint::from(1u8) << (1u64 << (block + 1));
    let mut acc = CompensatedSum::<f64>::new();
    let mut k = 1;
    loop {
        let e = match seq.element(k) {
            Ok(e) => e,
            Err(crate::pseudo_norm::SequenceError::Exhausted { .. }) if seq.is_finite() => break,
            Err(other) => return Err(other.into()),
        };
        if e > hi {
            break;
        }
        if e > lo {
            acc.add(&(1.0 / ln_big(&e)));
        }
        k += 1;
    }
    Ok(AppleReport {
        sup_ratio,
        argmax,
        block_index: block,
        block_sum: acc.value(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogLogComparison {
    pub a: u64,
    pub b: u64,
    /// `Σ_{n=a}^{b} 1/(n ln n)`.
    pub sum: f64,
    /// `ln ln b - ln ln a`.
    pub integral: f64,
    /// `sum / integral`; undefined when `a = b`.
    pub ratio: Option<f64>,
}

pub fn loglog_comparison(a: u64, b: u64) -> Result<LogLogComparison, CriteriaError> {
    if a <= 1 {
        return Err(CriteriaError::Domain(format!("need a > 1, got a = {a}")));
    }
    if b < a {
        return Err(CriteriaError::InvalidRange { lo: a, hi: b });
    }
    let mut acc = CompensatedSum::<f64>::new();
    for n in a..=b {
        let nf = n as f64;
        acc.add(&(1.0 / (nf * nf.ln())));
    }
    let integral = (b as f64).ln().ln() - (a as f64).ln().ln();
    let sum = acc.value();
    Ok(LogLogComparison {
        a,
        b,
        sum,
        integral,
        ratio: (integral > 0.0).then(|| sum / integral),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn pp(p: u64) -> PseudoValueSequence {
        PseudoValueSequence::constant_ratio(p).unwrap()
    }

    #[test]
    fn abel_small() {
        let values: Vec<BigRational> = (3..=21).map(|n| r(1, n)).collect();
        let psi = PsiSpec::table(3, values).unwrap();
        let w = WeightKind::DSWeighted(SequenceFamily::single(pp(2)));
        let check = abel_identity_check(&psi, &w, 20, &Budget::default()).unwrap();
        assert!(check.equal);
        let zero = PsiSpec::table(3, vec![r(0, 1); 10]).unwrap();
        let check = abel_identity_check(&zero, &WeightKind::LogPower(2), 11, &Budget::default()).unwrap();
        assert!(check.lhs.is_zero() && check.rhs.is_zero());
    }

    #[test]
    fn sandwich_at_six() {
        let fam = SequenceFamily::new(vec![pp(2), pp(3)]);
        let p = sandwich_point(&fam, 6).unwrap();
        // weights 1, 2, 3, 4, 1, 6
        assert_eq!(p.sum, BigUint::from(17u8));
        assert_eq!(p.m, 4);
        assert!(p.upper_ok);
        assert_eq!(p.lower_ratio, Some(r(17, 24)));
        let p = sandwich_point(&fam, 1).unwrap();
        assert_eq!(p.lower_ratio, None);
        let sweep = sandwich_sweep(&fam, 6).unwrap();
        assert_eq!(sweep.last, sandwich_point(&fam, 6).unwrap());
    }

    #[test]
    fn growth_ratio_examples() {
        let g = linear_growth_ratio(&Counter::FrakM(pp(2)), 10_000).unwrap();
        assert!(g.value >= 1.0 && g.value <= 4.0);
        // brute-force denominators
        let fam = SequenceFamily::new(vec![pp(2), pp(3)]);
        let n = 300;
        let direct: u64 = (1..=n).map(|j| multi_count_m(j, &fam).unwrap()).sum();
        let g = linear_growth_ratio(&Counter::MultiCount(fam.clone()), n).unwrap();
        let expected = BigRational::new(BigInt::from(n * multi_count_m(n, &fam).unwrap()), BigInt::from(direct));
        assert_eq!(g.ratio, expected);
        let s = pp(2);
        let direct = (1..=n).fold(BigRational::zero(), |acc, j| acc + s.frak_m(j).unwrap());
        let g = linear_growth_ratio(&Counter::FrakM(s.clone()), n).unwrap();
        assert_eq!(
            g.ratio,
            s.frak_m(n).unwrap() * BigRational::from_integer(n.into()) / direct
        );
    }

    #[test]
    fn apple_block_sums() {
        let rep = apple_checks(&pp(2), 1000, 2).unwrap();
        let expected = (5..=8).map(|k| 1.0 / (k as f64 * std::f64::consts::LN_2)).sum::<f64>();
        assert!((rep.block_sum - expected).abs() < 1e-12);
        // single element below N: only n_0 = 1 contributes ln(n)/n, maximal at n = 3
        let big = PseudoValueSequence::constant_ratio(1000).unwrap();
        let rep = apple_checks(&big, 100, 0).unwrap();
        assert_eq!(rep.argmax, 3);
    }

    #[test]
    fn loglog_edges() {
        let c = loglog_comparison(2, 2).unwrap();
        assert!((c.sum - 1.0 / (2.0 * 2f64.ln())).abs() < 1e-15);
        assert_eq!(c.ratio, None);
        assert!(loglog_comparison(1, 5).is_err());
        let c = loglog_comparison(100, 1_000_000).unwrap();
        let ratio = c.ratio.unwrap();
        assert!((0.8..=1.25).contains(&ratio));
    }
}
