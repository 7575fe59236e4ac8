use std::fmt;
use std::sync::RwLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::SequenceError;
use crate::arith::{phi_ratio_of_support, prime_factors};
use crate::scalar::ratio_to_f64;

/// How the ratios `d_k = n_k / n_{k-1}` of a sequence are produced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SequenceSpec {
    /// Constant ratio `p`, i.e. `n_k = p^k`. `p` need not be prime.
    PrimePower { p: u64 },
    /// Ratios repeat the given pattern forever.
    Periodic { ratios: Vec<u64> },
    /// A finite chain; queries that need elements past its end fail.
    Explicit { ratios: Vec<u64> },
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |r: &[u64]| r.iter().map(u64::to_string).collect::<Vec<_>>().join(":");
        match self {
            SequenceSpec::PrimePower { p } => write!(f, "{p}^k"),
            SequenceSpec::Periodic { ratios } => write!(f, "periodic[{}]", join(ratios)),
            SequenceSpec::Explicit { ratios } => write!(f, "explicit[{}]", join(ratios)),
        }
    }
}

/// A divisor chain `1 = n_0 | n_1 | n_2 | …`, stored through its ratios.
///
/// Every element that fits in a `u64` is materialised at construction (at
/// most 64 of them, since `n_k >= 2^k`), together with the prime support of
/// each element and the running totient density `𝔐` at each step. Larger
/// elements are extended lazily as big integers.
pub struct PseudoValueSequence {
    spec: SequenceSpec,
    small: Vec<u64>,
    supports: Vec<Vec<u64>>,
    frak_prefix: Vec<BigRational>,
    frak_prefix_f64: Vec<f64>,
    big: RwLock<Vec<BigUint>>,
}

impl fmt::Debug for PseudoValueSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PseudoValueSequence")
            .field("spec", &self.spec)
            .field("small", &self.small)
            .finish()
    }
}

impl Clone for PseudoValueSequence {
    fn clone(&self) -> Self {
        Self {
            spec: self.spec.clone(),
            small: self.small.clone(),
            supports: self.supports.clone(),
            frak_prefix: self.frak_prefix.clone(),
            frak_prefix_f64: self.frak_prefix_f64.clone(),
            big: RwLock::new(self.big.read().expect("sequence cache poisoned").clone()),
        }
    }
}

impl PartialEq for PseudoValueSequence {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for PseudoValueSequence {}

/// Largest sequence index dividing `n`, and the element at that index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoNorm {
    pub index: usize,
    pub element: u64,
}

impl PseudoNorm {
    /// `|n|_D = 1 / n_index`.
    pub fn value(&self) -> BigRational {
        BigRational::new(1u64.into(), self.element.into())
    }
}

impl PseudoValueSequence {
    pub fn new(spec: SequenceSpec) -> Result<Self, SequenceError> {
        match &spec {
            SequenceSpec::PrimePower { p } => check_ratio(*p)?,
            SequenceSpec::Periodic { ratios } => {
                if ratios.is_empty() {
                    return Err(SequenceError::EmptyPattern);
                }
                ratios.iter().try_for_each(|&r| check_ratio(r))?;
            }
            SequenceSpec::Explicit { ratios } => ratios.iter().try_for_each(|&r| check_ratio(r))?,
        }
        let mut seq = Self {
            spec,
            small: vec![1],
            supports: vec![Vec::new()],
            frak_prefix: vec![BigRational::one()],
            frak_prefix_f64: vec![1.0],
            big: RwLock::new(vec![BigUint::one()]),
        };
        let mut k = 1;
        while let Some(d) = seq.ratio(k) {
            let Some(next) = seq.small[k - 1].checked_mul(d) else {
                break;
            };
            let mut support = seq.supports[k - 1].clone();
            for p in prime_factors(d) {
                if let Err(pos) = support.binary_search(&p) {
                    support.insert(pos, p);
                }
            }
            let density = phi_ratio_of_support(&support);
            let cumulative = &seq.frak_prefix[k - 1] + &density;
            seq.frak_prefix_f64.push(ratio_to_f64(&cumulative));
            seq.frak_prefix.push(cumulative);
            seq.supports.push(support);
            seq.small.push(next);
            k += 1;
        }
        Ok(seq)
    }

    pub fn constant_ratio(p: u64) -> Result<Self, SequenceError> {
        Self::new(SequenceSpec::PrimePower { p })
    }

    pub fn periodic(ratios: Vec<u64>) -> Result<Self, SequenceError> {
        Self::new(SequenceSpec::Periodic { ratios })
    }

    pub fn explicit(ratios: Vec<u64>) -> Result<Self, SequenceError> {
        Self::new(SequenceSpec::Explicit { ratios })
    }

    /// Chain given by its elements `1, n_1, n_2, …`; each must divide the next.
    pub fn from_elements(elements: &[u64]) -> Result<Self, SequenceError> {
        if elements.first() != Some(&1) {
            return Err(SequenceError::NotAChain(elements.first().copied().unwrap_or(0)));
        }
        let ratios = elements
            .windows(2)
            .map(|w| {
                if w[1] % w[0] == 0 {
                    Ok(w[1] / w[0])
                } else {
                    Err(SequenceError::NotAChain(w[1]))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::explicit(ratios)
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    /// `d_k = n_k / n_{k-1}` for `k >= 1`; `None` past the end of an explicit list.
    pub fn ratio(&self, k: usize) -> Option<u64> {
        if k == 0 {
            return None;
        }
        match &self.spec {
            SequenceSpec::PrimePower { p } => Some(*p),
            SequenceSpec::Periodic { ratios } => Some(ratios[(k - 1) % ratios.len()]),
            SequenceSpec::Explicit { ratios } => ratios.get(k - 1).copied(),
        }
    }

    /// Index of the last defined element, `None` for infinite rules.
    pub fn last_index(&self) -> Option<usize> {
        match &self.spec {
            SequenceSpec::Explicit { ratios } => Some(ratios.len()),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.last_index().is_some()
    }

    /// Distinct ratios that ever occur.
    pub fn ratio_set(&self) -> Vec<u64> {
        let mut out = match &self.spec {
            SequenceSpec::PrimePower { p } => vec![*p],
            SequenceSpec::Periodic { ratios } | SequenceSpec::Explicit { ratios } => ratios.clone(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Primes dividing some element: the generators of the chain.
    pub fn generator_primes(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self.ratio_set().into_iter().flat_map(prime_factors).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Elements that fit in a `u64`, starting with `n_0 = 1`.
    pub fn small_elements(&self) -> &[u64] {
        &self.small
    }

    /// `n_k` as a big integer, extending the cache as needed.
    pub fn element(&self, k: usize) -> Result<BigUint, SequenceError> {
        if let Some(last) = self.last_index() {
            if k > last {
                return Err(SequenceError::Exhausted { index: k });
            }
        }
        if let Some(&v) = self.small.get(k) {
            return Ok(BigUint::from(v));
        }
        {
            let cache = self.big.read().expect("sequence cache poisoned");
            if let Some(v) = cache.get(k) {
                return Ok(v.clone());
            }
        }
        let mut cache = self.big.write().expect("sequence cache poisoned");
        // another writer may have extended the prefix meanwhile
        while cache.len() <= k {
            let j = cache.len();
            let d = self.ratio(j).expect("checked above");
            let next = &cache[j - 1] * d;
            cache.push(next);
        }
        Ok(cache[k].clone())
    }

    /// Sorted prime support of `n_k`.
    pub fn support(&self, k: usize) -> Result<Vec<u64>, SequenceError> {
        if let Some(last) = self.last_index() {
            if k > last {
                return Err(SequenceError::Exhausted { index: k });
            }
        }
        if let Some(s) = self.supports.get(k) {
            return Ok(s.clone());
        }
        let upto = match &self.spec {
            SequenceSpec::PrimePower { .. } => k.min(1),
            SequenceSpec::Periodic { ratios } => k.min(ratios.len()),
            SequenceSpec::Explicit { .. } => k,
        };
        let mut out: Vec<u64> = (1..=upto)
            .filter_map(|j| self.ratio(j))
            .flat_map(prime_factors)
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// `φ(n_k)/n_k`.
    pub fn density(&self, k: usize) -> Result<BigRational, SequenceError> {
        Ok(phi_ratio_of_support(&self.support(k)?))
    }

    /// Largest `k` with `n_k <= n`.
    ///
    /// For explicit chains the answer is certified only if the next element is
    /// known to exceed `n`; since `n_{L+1} >= 2 n_L`, that holds when `2 n_L > n`.
    pub fn capital_m(&self, n: u64) -> Result<usize, SequenceError> {
        let k = self.small.partition_point(|&e| e <= n) - 1;
        if k + 1 < self.small.len() {
            return Ok(k);
        }
        match self.last_index() {
            Some(last) if last == k => {
                if (self.small[k] as u128) * 2 > n as u128 {
                    Ok(k)
                } else {
                    Err(SequenceError::Exhausted { index: k + 1 })
                }
            }
            // the next element overflowed u64, so it exceeds n
            _ => Ok(k),
        }
    }

    /// Elements `n_0, …, n_{𝓜(n)}`.
    pub fn elements_up_to(&self, n: u64) -> Result<&[u64], SequenceError> {
        Ok(&self.small[..=self.capital_m(n)?])
    }

    /// `|n|_D`: the largest element dividing `n`, with its index.
    pub fn pseudo_norm(&self, n: u64) -> Result<PseudoNorm, SequenceError> {
        assert!(n >= 1, "pseudo-norm is defined on positive integers");
        let mut k = 0;
        loop {
            if let Some(&next) = self.small.get(k + 1) {
                if next > n || !n.is_multiple_of(next) {
                    break;
                }
                k += 1;
                continue;
            }
            match self.last_index() {
                Some(last) if last == k => {
                    if (self.small[k] as u128) * 2 > n as u128 {
                        break;
                    }
                    return Err(SequenceError::Exhausted { index: k + 1 });
                }
                _ => break,
            }
        }
        Ok(PseudoNorm {
            index: k,
            element: self.small[k],
        })
    }

    /// `𝔐(n) = Σ_{n_k <= n} φ(n_k)/n_k`.
    pub fn frak_m(&self, n: u64) -> Result<BigRational, SequenceError> {
        Ok(self.frak_prefix[self.capital_m(n)?].clone())
    }

    /// `𝔐(n)` rounded to `f64`.
    pub fn frak_m_f64(&self, n: u64) -> Result<f64, SequenceError> {
        Ok(self.frak_prefix_f64[self.capital_m(n)?])
    }

    /// Whether every element of `self` is coprime to every element of `other`.
    /// Decided exactly from the ratio sets.
    pub fn coprime_with(&self, other: &Self) -> bool {
        let theirs = other.ratio_set();
        self.ratio_set().iter().all(|a| theirs.iter().all(|b| a.gcd(b) == 1))
    }
}

fn check_ratio(r: u64) -> Result<(), SequenceError> {
    if r < 2 {
        Err(SequenceError::InvalidRatio(r))
    } else {
        Ok(())
    }
}

/// Several chains `D_1, …, D_m` used together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceFamily {
    members: Vec<PseudoValueSequence>,
    mutually_coprime: bool,
}

impl SequenceFamily {
    /// An empty member list is allowed and behaves as the trivial product (`∏|n| = 1`).
    pub fn new(members: Vec<PseudoValueSequence>) -> Self {
        let mutually_coprime = members
            .iter()
            .enumerate()
            .all(|(i, a)| members[i + 1..].iter().all(|b| a.coprime_with(b)));
        Self {
            members,
            mutually_coprime,
        }
    }

    pub fn from_specs(specs: &[SequenceSpec]) -> Result<Self, SequenceError> {
        Ok(Self::new(
            specs
                .iter()
                .cloned()
                .map(PseudoValueSequence::new)
                .collect::<Result<_, _>>()?,
        ))
    }

    pub fn single(seq: PseudoValueSequence) -> Self {
        Self::new(vec![seq])
    }

    pub fn members(&self) -> &[PseudoValueSequence] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_mutually_coprime(&self) -> bool {
        self.mutually_coprime
    }

    pub fn label(&self) -> String {
        if self.members.is_empty() {
            return "none".into();
        }
        self.members
            .iter()
            .map(|m| m.spec().to_string())
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl fmt::Display for SequenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_invariants() {
        for seq in [
            PseudoValueSequence::constant_ratio(2).unwrap(),
            PseudoValueSequence::constant_ratio(10).unwrap(),
            PseudoValueSequence::periodic(vec![2, 3]).unwrap(),
            PseudoValueSequence::explicit(vec![2, 3, 5, 7]).unwrap(),
        ] {
            let e = seq.small_elements();
            assert_eq!(e[0], 1);
            for w in e.windows(2) {
                assert!(w[1] > w[0] && w[1] % w[0] == 0);
            }
        }
        assert_eq!(
            PseudoValueSequence::constant_ratio(2).unwrap().small_elements().len(),
            64
        );
        assert_eq!(
            PseudoValueSequence::constant_ratio(1).unwrap_err(),
            SequenceError::InvalidRatio(1)
        );
        assert_eq!(
            PseudoValueSequence::periodic(vec![]).unwrap_err(),
            SequenceError::EmptyPattern
        );
        assert_eq!(
            PseudoValueSequence::from_elements(&[1, 2, 6, 30, 210]).unwrap().spec(),
            &SequenceSpec::Explicit {
                ratios: vec![2, 3, 5, 7]
            }
        );
        assert!(PseudoValueSequence::from_elements(&[1, 2, 5]).is_err());
    }

    #[test]
    fn norm_examples() {
        let two = PseudoValueSequence::constant_ratio(2).unwrap();
        assert_eq!(two.pseudo_norm(7).unwrap(), PseudoNorm { index: 0, element: 1 });
        let n12 = two.pseudo_norm(12).unwrap();
        assert_eq!(n12, PseudoNorm { index: 2, element: 4 });
        assert_eq!(n12.value(), BigRational::new(1.into(), 4.into()));
        let ten = PseudoValueSequence::constant_ratio(10).unwrap();
        assert_eq!(ten.pseudo_norm(100).unwrap(), PseudoNorm { index: 2, element: 100 });
        // largest representable power
        assert_eq!(two.pseudo_norm(1 << 63).unwrap().index, 63);
    }

    #[test]
    fn capital_m_examples() {
        let two = PseudoValueSequence::constant_ratio(2).unwrap();
        let three = PseudoValueSequence::constant_ratio(3).unwrap();
        assert_eq!(two.capital_m(1).unwrap(), 0);
        assert_eq!(two.capital_m(8).unwrap(), 3);
        assert_eq!(three.capital_m(100).unwrap(), 4);
        assert_eq!(two.capital_m(u64::MAX).unwrap(), 63);
    }

    #[test]
    fn explicit_exhaustion() {
        let prim = PseudoValueSequence::explicit(vec![2, 3, 5, 7]).unwrap();
        // 210 <= 419 < 420 <= n_5: certified
        assert_eq!(prim.capital_m(419).unwrap(), 4);
        assert_eq!(prim.capital_m(420).unwrap_err(), SequenceError::Exhausted { index: 5 });
        assert_eq!(prim.pseudo_norm(210).unwrap().index, 4);
        assert_eq!(
            prim.pseudo_norm(630).unwrap_err(),
            SequenceError::Exhausted { index: 5 }
        );
        assert_eq!(prim.pseudo_norm(631).unwrap().index, 0);
        assert_eq!(prim.element(5).unwrap_err(), SequenceError::Exhausted { index: 5 });
    }

    #[test]
    fn big_elements_extend_lazily() {
        let three = PseudoValueSequence::constant_ratio(3).unwrap();
        assert_eq!(three.element(100).unwrap(), BigUint::from(3u8).pow(100));
        assert_eq!(three.element(50).unwrap(), BigUint::from(3u8).pow(50));
        let periodic = PseudoValueSequence::periodic(vec![2, 3]).unwrap();
        assert_eq!(periodic.element(81).unwrap(), BigUint::from(6u8).pow(40) * 2u8);
        assert_eq!(periodic.support(500).unwrap(), vec![2, 3]);
        assert_eq!(periodic.support(1).unwrap(), vec![2]);
    }

    #[test]
    fn frak_m_examples() {
        let two = PseudoValueSequence::constant_ratio(2).unwrap();
        assert_eq!(two.frak_m(1).unwrap(), BigRational::one());
        assert_eq!(two.frak_m(8).unwrap(), BigRational::new(5.into(), 2.into()));
    }

    #[test]
    fn coprimality() {
        let two = PseudoValueSequence::constant_ratio(2).unwrap();
        let three = PseudoValueSequence::constant_ratio(3).unwrap();
        let six = PseudoValueSequence::constant_ratio(6).unwrap();
        assert!(SequenceFamily::new(vec![two.clone(), three.clone()]).is_mutually_coprime());
        assert!(!SequenceFamily::new(vec![two.clone(), two.clone()]).is_mutually_coprime());
        assert!(!SequenceFamily::new(vec![two, three, six]).is_mutually_coprime());
    }

    #[test]
    fn spec_json_shapes() {
        let s: SequenceSpec = serde_json::from_str(r#"{"rule":"prime_power","p":2}"#).unwrap();
        assert_eq!(s, SequenceSpec::PrimePower { p: 2 });
        let s: SequenceSpec = serde_json::from_str(r#"{"rule":"periodic","ratios":[2,3]}"#).unwrap();
        assert_eq!(s, SequenceSpec::Periodic { ratios: vec![2, 3] });
        let s: SequenceSpec = serde_json::from_str(r#"{"rule":"explicit","ratios":[2,3,5,7]}"#).unwrap();
        assert_eq!(
            s,
            SequenceSpec::Explicit {
                ratios: vec![2, 3, 5, 7]
            }
        );
    }
}
