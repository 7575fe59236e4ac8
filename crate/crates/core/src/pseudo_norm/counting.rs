use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use super::{PseudoValueSequence, SequenceError, SequenceFamily};

fn element_or_overflow(seq: &PseudoValueSequence, k: usize) -> Result<u128, SequenceError> {
    if let Some(&e) = seq.small_elements().get(k) {
        return Ok(e as u128);
    }
    // materialise (or fail on an explicit chain that ends earlier)
    seq.element(k)?;
    Ok(u128::MAX)
}

fn check_arity(family: &SequenceFamily, tuple: &[usize]) -> Result<(), SequenceError> {
    if tuple.len() != family.len() {
        return Err(SequenceError::TupleArity {
            expected: family.len(),
            got: tuple.len(),
        });
    }
    Ok(())
}

/// `lcm(n^1_{k_1}, …, n^m_{k_m})`, saturating at `u128::MAX`.
pub fn lcm_of_tuple(family: &SequenceFamily, tuple: &[usize]) -> Result<u128, SequenceError> {
    check_arity(family, tuple)?;
    let mut acc: u128 = 1;
    for (seq, &k) in family.members().iter().zip(tuple) {
        let e = element_or_overflow(seq, k)?;
        if e == u128::MAX {
            return Ok(u128::MAX);
        }
        acc = (acc / acc.gcd(&e)).saturating_mul(e);
    }
    Ok(acc)
}

/// `n^1_{k_1} ⋯ n^m_{k_m}`, saturating at `u128::MAX`.
pub fn product_of_tuple(family: &SequenceFamily, tuple: &[usize]) -> Result<u128, SequenceError> {
    check_arity(family, tuple)?;
    let mut acc: u128 = 1;
    for (seq, &k) in family.members().iter().zip(tuple) {
        acc = acc.saturating_mul(element_or_overflow(seq, k)?);
    }
    Ok(acc)
}

/// `S(n)`: index tuples whose element lcm is at most `n`, in lexicographic order.
pub fn s_set(n: u64, family: &SequenceFamily) -> Result<Vec<Vec<usize>>, SequenceError> {
    let lists = family
        .members()
        .iter()
        .map(|s| s.elements_up_to(n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    let mut tuple = Vec::with_capacity(lists.len());
    walk_lcm(&lists, n as u128, 1, &mut tuple, &mut out);
    Ok(out)
}

fn walk_lcm(lists: &[&[u64]], n: u128, lcm: u128, tuple: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let depth = tuple.len();
    if depth == lists.len() {
        out.push(tuple.clone());
        return;
    }
    for (k, &e) in lists[depth].iter().enumerate() {
        let e = e as u128;
        let next = (lcm / lcm.gcd(&e)).saturating_mul(e);
        // lcm with a later chain element is a multiple of this one
        if next > n {
            break;
        }
        tuple.push(k);
        walk_lcm(lists, n, next, tuple, out);
        tuple.pop();
    }
}

/// `f(n; k_1, …, k_m) = ⌊n / lcm⌋` for a tuple in `S(n)`.
pub fn f_count(n: u64, tuple: &[usize], family: &SequenceFamily) -> Result<u64, SequenceError> {
    let lcm = lcm_of_tuple(family, tuple)?;
    if lcm > n as u128 {
        return Err(SequenceError::TupleNotInS {
            n,
            tuple: tuple.to_vec(),
            lcm,
        });
    }
    Ok((n as u128 / lcm) as u64)
}

/// Every product `n^1_{k_1} ⋯ n^m_{k_m} <= n`, one entry per tuple, ascending.
pub fn sorted_products(family: &SequenceFamily, n: u64) -> Result<Vec<u64>, SequenceError> {
    let lists = family
        .members()
        .iter()
        .map(|s| s.elements_up_to(n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    walk_product(&lists, n as u128, 1, 0, &mut out);
    out.sort_unstable();
    Ok(out)
}

fn walk_product(lists: &[&[u64]], n: u128, prod: u128, depth: usize, out: &mut Vec<u64>) {
    if depth == lists.len() {
        out.push(prod as u64);
        return;
    }
    for &e in lists[depth] {
        let next = prod.saturating_mul(e as u128);
        if next > n {
            break;
        }
        walk_product(lists, n, next, depth + 1, out);
    }
}

/// `M(n) = #{tuples : n^1_{k_1} ⋯ n^m_{k_m} <= n} - 1`.
pub fn multi_count_m(n: u64, family: &SequenceFamily) -> Result<u64, SequenceError> {
    Ok(sorted_products(family, n)?.len() as u64 - 1)
}

/// Tabulated products up to a bound, for sweeps that need `M(n)` at every `n`.
#[derive(Debug, Clone)]
pub struct ProductCounter {
    products: Vec<u64>,
    limit: u64,
}

impl ProductCounter {
    pub fn new(family: &SequenceFamily, limit: u64) -> Result<Self, SequenceError> {
        Ok(Self {
            products: sorted_products(family, limit)?,
            limit,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Ascending products `t_0 = 1 <= t_1 <= …` up to the limit.
    pub fn products(&self) -> &[u64] {
        &self.products
    }

    /// Number of tuples with product `<= n`.
    pub fn count_le(&self, n: u64) -> u64 {
        assert!(n <= self.limit, "{n} beyond tabulated limit {}", self.limit);
        self.products.partition_point(|&t| t <= n) as u64
    }

    /// `M(n)`.
    pub fn m(&self, n: u64) -> u64 {
        self.count_le(n) - 1
    }
}

/// Pseudo-norm indices of `n`, one per family member.
pub fn norm_indices(n: u64, family: &SequenceFamily) -> Result<Vec<usize>, SequenceError> {
    family
        .members()
        .iter()
        .map(|s| s.pseudo_norm(n).map(|p| p.index))
        .collect()
}

/// `1 / (|n|_{D_1} ⋯ |n|_{D_m}) = ∏ n_{k_i}` as an integer.
pub fn inverse_norm_product(n: u64, family: &SequenceFamily) -> Result<BigUint, SequenceError> {
    family
        .members()
        .iter()
        .try_fold(BigUint::one(), |acc, s| Ok(acc * s.pseudo_norm(n)?.element))
}

/// `|n|_{D_1} ⋯ |n|_{D_m}`.
pub fn product_pseudo_norm(n: u64, family: &SequenceFamily) -> Result<BigRational, SequenceError> {
    Ok(BigRational::new(1u8.into(), inverse_norm_product(n, family)?.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(ps: &[u64]) -> SequenceFamily {
        SequenceFamily::new(
            ps.iter()
                .map(|&p| PseudoValueSequence::constant_ratio(p).unwrap())
                .collect(),
        )
    }

    #[test]
    fn s_set_examples() {
        assert_eq!(s_set(1, &fam(&[2, 3])).unwrap(), vec![vec![0, 0]]);
        assert_eq!(s_set(4, &fam(&[2])).unwrap(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(
            s_set(6, &fam(&[2, 3])).unwrap(),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1], vec![2, 0]]
        );
        // repeated members: lcm, not product
        assert_eq!(s_set(4, &fam(&[2, 2])).unwrap().len(), 9);
        assert_eq!(s_set(10, &fam(&[])).unwrap(), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn f_count_examples() {
        assert_eq!(f_count(5, &[0, 0], &fam(&[2, 3])).unwrap(), 5);
        assert_eq!(f_count(6, &[1, 1], &fam(&[2, 3])).unwrap(), 1);
        assert_eq!(f_count(7, &[2], &fam(&[2])).unwrap(), 1);
        assert!(matches!(
            f_count(5, &[1, 1], &fam(&[2, 3])),
            Err(SequenceError::TupleNotInS { lcm: 6, .. })
        ));
        assert!(matches!(
            f_count(5, &[1], &fam(&[2, 3])),
            Err(SequenceError::TupleArity { .. })
        ));
    }

    #[test]
    fn multi_count_examples() {
        assert_eq!(multi_count_m(1, &fam(&[2, 3])).unwrap(), 0);
        assert_eq!(multi_count_m(6, &fam(&[2, 3])).unwrap(), 4);
        let counter = ProductCounter::new(&fam(&[2, 3]), 100).unwrap();
        for n in 1..=100 {
            assert_eq!(counter.m(n), multi_count_m(n, &fam(&[2, 3])).unwrap());
        }
    }

    #[test]
    fn product_norm_examples() {
        let one = BigRational::one();
        assert_eq!(product_pseudo_norm(35, &fam(&[2, 3])).unwrap(), one);
        assert_eq!(
            product_pseudo_norm(12, &fam(&[2, 3])).unwrap(),
            BigRational::new(1.into(), 12.into())
        );
        assert_eq!(
            product_pseudo_norm(6, &fam(&[2, 2])).unwrap(),
            BigRational::new(1.into(), 4.into())
        );
        assert_eq!(norm_indices(12, &fam(&[2, 3])).unwrap(), vec![2, 1]);
    }

    #[test]
    fn saturating_helpers() {
        let f = fam(&[2, 3]);
        assert_eq!(lcm_of_tuple(&f, &[3, 2]).unwrap(), 72);
        assert_eq!(product_of_tuple(&f, &[63, 42]).unwrap(), u128::MAX);
        assert_eq!(lcm_of_tuple(&f, &[70, 0]).unwrap(), u128::MAX);
    }
}
