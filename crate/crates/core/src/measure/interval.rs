use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{pairwise_sum, MeasureError};
use crate::scalar::Scalar;

/// A finite union of open subintervals of the circle `[0, 1)`, kept sorted,
/// pairwise disjoint, with the total length cached.
///
/// Intervals that merely touch stay separate: their common endpoint is not
/// covered. Sound only over an exact `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet<T> {
    intervals: Vec<(T, T)>,
    total: T,
}

impl<T: Scalar> Default for IntervalSet<T> {
    fn default() -> Self {
        Self::empty()
    }
}

fn cmp<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).expect("ordered scalar")
}

fn max<T: Scalar>(a: T, b: T) -> T {
    if cmp(&a, &b) == Ordering::Less {
        b
    } else {
        a
    }
}

/// Sorts pieces by left endpoint, deciding by the cached `f64` key when the
/// keys are far apart and by the exact value otherwise.
fn sort_pieces<T: Scalar>(pieces: &mut [(f64, T, T)]) {
    pieces.sort_by(|a, b| {
        let (ka, kb) = (a.0, b.0);
        let tol = 1e-14 * ka.abs().max(kb.abs());
        if (ka - kb).abs() > tol {
            ka.partial_cmp(&kb).expect("finite key")
        } else {
            cmp(&a.1, &b.1)
        }
    });
}

impl<T: Scalar> IntervalSet<T> {
    pub fn empty() -> Self {
        Self {
            intervals: Vec::new(),
            total: T::zero(),
        }
    }

    /// The whole circle, as the single interval `(0, 1)`.
    pub fn full() -> Self {
        Self {
            intervals: vec![(T::zero(), T::one())],
            total: T::one(),
        }
    }

    /// Normalizes arbitrary open real intervals onto the circle.
    ///
    /// Each `(l, r)` is reduced mod 1, split where it wraps and merged with its
    /// neighbours. An interval of length at least 1 covers the whole circle.
    pub fn from_intervals<I>(raw: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = (T, T)>,
    {
        let mut pieces = Vec::new();
        for (l, r) in raw {
            let (lf, rf) = (l.to_f64(), r.to_f64());
            if lf > 1e-9 && rf < 1.0 - 1e-9 && rf - lf > 1e-12 {
                // strictly inside (0, 1) and non-empty, whatever the rounding
                pieces.push((lf, l, r));
                continue;
            }
            if cmp(&l, &r) != Ordering::Less {
                if cmp(&l, &r) == Ordering::Equal {
                    continue;
                }
                return Err(MeasureError::InvalidSet(format!("{l:?} > {r:?}")));
            }
            if cmp(&(r.clone() - l.clone()), &T::one()) != Ordering::Less {
                return Ok(Self::full());
            }
            push_wrapped(&mut pieces, l, r);
        }
        Ok(Self::from_pieces(pieces))
    }

    fn from_pieces(mut pieces: Vec<(f64, T, T)>) -> Self {
        sort_pieces(&mut pieces);
        let mut intervals: Vec<(T, T)> = Vec::with_capacity(pieces.len());
        for (_, l, r) in pieces {
            match intervals.last_mut() {
                Some(last) if cmp(&l, &last.1) == Ordering::Less => {
                    let hi = std::mem::replace(&mut last.1, T::zero());
                    last.1 = max(hi, r);
                }
                _ => intervals.push((l, r)),
            }
        }
        let total = total_length(&intervals);
        Self { intervals, total }
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> &T {
        &self.total
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::union_all([self, other])
    }

    pub fn union_all<'a, I>(sets: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
        T: 'a,
    {
        let mut pieces = Vec::new();
        for s in sets {
            for (l, r) in &s.intervals {
                if is_full_piece(l, r) {
                    return Self::full();
                }
                pieces.push((l.to_f64(), l.clone(), r.clone()));
            }
        }
        Self::from_pieces(pieces)
    }

    /// Strict membership of a point of `[0, 1)`.
    pub fn contains(&self, x: &T) -> bool {
        let idx = self.intervals.partition_point(|(l, _)| cmp(l, x) == Ordering::Less);
        idx > 0 && cmp(x, &self.intervals[idx - 1].1) == Ordering::Less
    }

    /// True when every interval of `self` lies inside one interval of `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.intervals.iter().all(|(l, r)| {
            let idx = other
                .intervals
                .partition_point(|(ol, _)| cmp(ol, l) != Ordering::Greater);
            idx > 0 && {
                let (_, or) = &other.intervals[idx - 1];
                cmp(r, or) != Ordering::Greater
            }
        })
    }

    /// Checks the sorted, disjoint, in-range invariant and the cached total.
    pub fn validate(&self) -> Result<(), MeasureError> {
        let mut prev: Option<&T> = None;
        for (l, r) in &self.intervals {
            if cmp(l, &T::zero()) == Ordering::Less || cmp(r, &T::one()) == Ordering::Greater {
                return Err(MeasureError::InvalidSet(format!("({l:?}, {r:?}) leaves [0, 1]")));
            }
            if cmp(l, r) != Ordering::Less {
                return Err(MeasureError::InvalidSet(format!("({l:?}, {r:?}) is empty")));
            }
            if let Some(p) = prev {
                if cmp(l, p) == Ordering::Less {
                    return Err(MeasureError::InvalidSet(format!("overlap at {l:?}")));
                }
            }
            prev = Some(r);
        }
        if T::EXACT && total_length(&self.intervals) != self.total {
            return Err(MeasureError::InvalidSet("cached measure is stale".into()));
        }
        Ok(())
    }
}

/// `Σ (r - l)`. Exact lengths are grouped by denominator first: adding many
/// fractions one by one lets the running denominator grow to thousands of bits.
fn total_length<T: Scalar>(intervals: &[(T, T)]) -> T {
    if !T::EXACT {
        let mut total = T::zero();
        for (l, r) in intervals {
            total += &(r.clone() - l.clone());
        }
        return total;
    }
    let mut buckets: BTreeMap<BigInt, BigInt> = BTreeMap::new();
    for (l, r) in intervals {
        let len = (r.clone() - l.clone()).exact_ratio().expect("exact scalar");
        let (num, den) = len.into_raw();
        *buckets.entry(den).or_default() += num;
    }
    T::from_ratio(&pairwise_sum(
        buckets.into_iter().map(|(d, n)| BigRational::new(n, d)).collect(),
    ))
}

fn is_full_piece<T: Scalar>(l: &T, r: &T) -> bool {
    l.is_zero() && r.is_one()
}

fn push_wrapped<T: Scalar>(pieces: &mut Vec<(f64, T, T)>, mut l: T, mut r: T) {
    while cmp(&l, &T::zero()) == Ordering::Less {
        l = l + T::one();
        r = r + T::one();
    }
    while cmp(&l, &T::one()) != Ordering::Less {
        l = l - T::one();
        r = r - T::one();
    }
    if cmp(&r, &T::one()) == Ordering::Greater {
        let over = r - T::one();
        pieces.push((l.to_f64(), l, T::one()));
        pieces.push((0.0, T::zero(), over));
    } else {
        pieces.push((l.to_f64(), l, r));
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl JsonInt {
    fn of(v: &BigInt) -> Self {
        v.to_i64().map_or_else(|| JsonInt::Big(v.to_string()), JsonInt::Small)
    }

    fn get<E: serde::de::Error>(self) -> Result<BigInt, E> {
        match self {
            JsonInt::Small(v) => Ok(v.into()),
            JsonInt::Big(s) => s.parse().map_err(|_| E::custom(format!("bad integer {s:?}"))),
        }
    }
}

/// `[[left_num, left_den, right_num, right_den], ...]`; integers beyond `i64`
/// are written as decimal strings.
impl Serialize for IntervalSet<BigRational> {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<[JsonInt; 4]> = self
            .intervals
            .iter()
            .map(|(l, r)| {
                [
                    JsonInt::of(l.numer()),
                    JsonInt::of(l.denom()),
                    JsonInt::of(r.numer()),
                    JsonInt::of(r.denom()),
                ]
            })
            .collect();
        rows.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for IntervalSet<BigRational> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let rows = Vec::<[JsonInt; 4]>::deserialize(de)?;
        let mut raw = Vec::with_capacity(rows.len());
        for [ln, ld, rn, rd] in rows {
            let (ln, ld, rn, rd) = (ln.get::<D::Error>()?, ld.get()?, rn.get()?, rd.get()?);
            if ld.is_zero() || rd.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            raw.push((BigRational::new(ln, ld), BigRational::new(rn, rd)));
        }
        // stored sets are canonical; anything unsorted or overlapping is rejected
        let total = total_length(&raw);
        let set = Self { intervals: raw, total };
        set.validate().map_err(D::Error::custom)?;
        Ok(set)
    }
}
