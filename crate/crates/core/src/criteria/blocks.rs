use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use super::CriteriaError;
use crate::arith::{euler_phi, PhiSieve};
use crate::budget::Budget;
use crate::pseudo_norm::SequenceFamily;
use crate::psi::{PsiError, PsiSpec, PsiValue};
use crate::scalar::{ratio_to_f64, CompensatedSum, Scalar};

const U: f64 = f64::EPSILON / 2.0;
const CHUNK: u64 = 1 << 16;

/// Highest block index whose range fits in a `u64`.
const MAX_BLOCK: u32 = 4;

/// `scale · ψ(n) · ∏ n_{k_i}`: a test function, optionally turned into `ψ₀`
/// by a family and rescaled.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectivePsi {
    pub psi: PsiSpec,
    pub family: SequenceFamily,
    pub scale: BigRational,
}

impl EffectivePsi {
    pub fn plain(psi: PsiSpec) -> Self {
        Self::psi0(psi, SequenceFamily::new(Vec::new()))
    }

    pub fn psi0(psi: PsiSpec, family: SequenceFamily) -> Self {
        Self {
            psi,
            family,
            scale: BigRational::one(),
        }
    }

    pub fn scaled(mut self, scale: BigRational) -> Self {
        self.scale = scale;
        self
    }

    pub fn eval(&self, n: u64) -> Result<PsiValue, PsiError> {
        let v = self.psi.eval_psi0(&self.family, n)?;
        if self.scale.is_one() {
            return Ok(v);
        }
        Ok(match v {
            PsiValue::Exact(r) => PsiValue::Exact(r * &self.scale),
            PsiValue::Float { value, rel_err } => {
                let s = ratio_to_f64(&self.scale);
                let exact_scale = BigRational::from_float(s).as_ref() == Some(&self.scale);
                PsiValue::Float {
                    value: value * s,
                    rel_err: rel_err + U + if exact_scale { 0.0 } else { U },
                }
            }
        })
    }
}

/// How `φ(k)` is obtained inside a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiRoute {
    Sieve,
    /// Trial division per element; the independent oracle for the sieve route.
    Naive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GBlock<S> {
    pub index: u32,
    pub lo: u64,
    pub hi: u64,
    pub sum: S,
    pub abs_err: f64,
}

/// `(2^{2^n} + 1, 2^{2^{n+1}})` as the inclusive range of block `n`.
fn block_range(n: u32, budget: &Budget) -> Result<(u64, u64), CriteriaError> {
    let beyond = || CriteriaError::BlockBeyondBudget {
        block: n,
        upper: format!("2^{}", 2u128.pow(n.min(100) + 1)),
    };
    if n > MAX_BLOCK {
        return Err(beyond());
    }
    let lo = (1u64 << (1u32 << n)) + 1;
    let hi_exp = 1u32 << (n + 1);
    if hi_exp >= 64 {
        return Err(beyond());
    }
    let hi = 1u64 << hi_exp;
    if hi > budget.max_sieve_len() {
        return Err(beyond());
    }
    Ok((lo, hi))
}

fn block_term<S: Scalar>(v: &PsiValue, phi: u64, k: u64) -> (S, f64) {
    let density = BigRational::new(BigInt::from(phi), BigInt::from(k));
    if S::EXACT {
        // floats enter through their exact dyadic value, so both routes agree exactly
        let t = v.to_ratio() * density;
        let err = ratio_to_f64(&t) * v.rel_err();
        (S::from_ratio(&t), err)
    } else {
        let t = v.to_f64() * (phi as f64 / k as f64);
        let conv = if v.is_exact() { U } else { 0.0 };
        (S::from_f64(t), t * (v.rel_err() + conv + 3.0 * U))
    }
}

/// `G_n = Σ_{k=2^{2^n}+1}^{2^{2^{n+1}}} ψ(k) φ(k)/k`.
pub fn g_block<S: Scalar>(
    psi: &EffectivePsi,
    n: u32,
    route: PhiRoute,
    budget: &Budget,
) -> Result<GBlock<S>, CriteriaError> {
    let (lo, hi) = block_range(n, budget)?;
    let sieve = match route {
        PhiRoute::Sieve => Some(PhiSieve::new(hi, budget)?),
        PhiRoute::Naive => None,
    };
    let phi = |k: u64| match &sieve {
        Some(s) => s.get(k),
        None => euler_phi(k),
    };
    let chunks: Vec<(u64, u64)> = (lo..=hi)
        .step_by(CHUNK as usize)
        .map(|c| (c, (c + CHUNK - 1).min(hi)))
        .collect();
    let partials = chunks
        .par_iter()
        .map(|&(a, b)| {
            let mut acc = CompensatedSum::<S>::new();
            let mut err = 0.0;
            for k in a..=b {
                let v = psi.eval(k)?;
                let (t, e) = block_term::<S>(&v, phi(k), k);
                acc.add(&t);
                err += e;
            }
            Ok((acc.value(), err))
        })
        .collect::<Result<Vec<_>, CriteriaError>>()?;
    let mut acc = CompensatedSum::<S>::new();
    let mut err = 0.0;
    for (s, e) in &partials {
        acc.add(s);
        err += e;
    }
    let sum = acc.value();
    if !S::EXACT {
        err += sum.to_f64().abs() * (2.0 * U + (hi - lo + 1) as f64 * U * U);
    }
    Ok(GBlock {
        index: n,
        lo,
        hi,
        sum,
        abs_err: err,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiReport {
    /// `(n, G_n)` for every computed block.
    pub blocks: Vec<(u32, f64)>,
    /// Partial sum after each block.
    pub partial_sums: Vec<f64>,
    pub partial: f64,
}

/// `Σ ln G_n / (n ln ln G_n)` over the given blocks with `G_n >= 3`.
///
/// The `n = 0` block is skipped: the summand divides by `n`.
pub fn li_series(blocks: &[(u32, f64)]) -> f64 {
    let mut acc = CompensatedSum::<f64>::new();
    for &(n, g) in blocks {
        if n >= 1 && g >= 3.0 {
            acc.add(&(g.ln() / (n as f64 * g.ln().ln())));
        }
    }
    acc.value()
}

/// Blocks `0..=n_max` and the gated series over them.
pub fn li_criterion_partial(psi: &EffectivePsi, n_max: u32, budget: &Budget) -> Result<LiReport, CriteriaError> {
    let mut blocks = Vec::new();
    let mut partial_sums = Vec::new();
    for n in 0..=n_max {
        let g = g_block::<f64>(psi, n, PhiRoute::Sieve, budget)?;
        blocks.push((n, g.sum));
        partial_sums.push(li_series(&blocks));
    }
    Ok(LiReport {
        partial: *partial_sums.last().expect("at least block 0"),
        blocks,
        partial_sums,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseudo_norm::PseudoValueSequence;
    use num_traits::Zero;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn block_zero() {
        let budget = Budget::default();
        let zero = EffectivePsi::plain(PsiSpec::constant(r(0, 1)).unwrap());
        assert!(g_block::<BigRational>(&zero, 0, PhiRoute::Sieve, &budget)
            .unwrap()
            .sum
            .is_zero());
        let one = EffectivePsi::plain(PsiSpec::constant(r(1, 1)).unwrap());
        let g = g_block::<BigRational>(&one, 0, PhiRoute::Sieve, &budget).unwrap();
        assert_eq!((g.lo, g.hi), (3, 4));
        assert_eq!(g.sum, r(7, 6));
    }

    #[test]
    fn routes_agree_exactly() {
        let budget = Budget::default();
        let two = PseudoValueSequence::constant_ratio(2).unwrap();
        let psi = PsiSpec::mixed_har(r(0, 1), two.clone()).unwrap();
        let eff = EffectivePsi::psi0(psi, SequenceFamily::single(two));
        for n in 0..=2 {
            let a = g_block::<BigRational>(&eff, n, PhiRoute::Sieve, &budget).unwrap();
            let b = g_block::<BigRational>(&eff, n, PhiRoute::Naive, &budget).unwrap();
            assert_eq!(a.sum, b.sum);
        }
    }

    #[test]
    fn beyond_budget() {
        let one = EffectivePsi::plain(PsiSpec::constant(r(1, 1)).unwrap());
        let err = g_block::<f64>(&one, 5, PhiRoute::Sieve, &Budget::default()).unwrap_err();
        assert!(matches!(err, CriteriaError::BlockBeyondBudget { block: 5, .. }));
        let err = g_block::<f64>(&one, 4, PhiRoute::Sieve, &Budget::default()).unwrap_err();
        assert!(matches!(err, CriteriaError::BlockBeyondBudget { block: 4, .. }));
    }

    #[test]
    fn li_series_gate() {
        assert_eq!(li_series(&[(1, 2.9), (2, 1.0)]), 0.0);
        let e = std::f64::consts::E;
        assert!((li_series(&[(1, e.powf(e))]) - e).abs() < 1e-12);
        let one = EffectivePsi::plain(PsiSpec::constant(r(1, 1)).unwrap());
        let rep = li_criterion_partial(&one, 3, &Budget::default()).unwrap();
        assert!(rep.partial > 0.0);
        assert!(rep.partial_sums.windows(2).all(|w| w[1] >= w[0]));
    }
}
