use mixlit::approx::{coprime_dist, dist_to_integers, enumerate_solutions, RealTarget, DEFAULT_SCAN_CAP};
use mixlit::pseudo_norm::{PseudoValueSequence, SequenceFamily};
use mixlit::psi::PsiSpec;
use mixlit::{BigInt, BigRational};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn target() -> impl Strategy<Value = RealTarget> {
    prop_oneof![
        (1i64..300)
            .prop_flat_map(|q| (0..q, Just(q)))
            .prop_map(|(p, q)| RealTarget::rational(p, q).unwrap()),
        prop::sample::select(vec![
            (1i64, 1i64, 5u64, 2i64),
            (0, 1, 2, 1),
            (-1, 1, 3, 2),
            (2, -1, 7, 3)
        ])
        .prop_map(|(a, b, d, e)| RealTarget::quadratic(a, b, d, e).unwrap()),
    ]
}

proptest! {
    #[test]
    fn coprime_distance_dominates_plain(alpha in target(), n in 1u64..5000) {
        let plain = dist_to_integers(n, &alpha).unwrap();
        let coprime = coprime_dist(n, &alpha, DEFAULT_SCAN_CAP).unwrap();
        prop_assert!(coprime.value >= plain.value);
        prop_assert_eq!(coprime.p.mod_floor(&BigInt::from(n)).gcd(&BigInt::from(n)), BigInt::from(1));
    }

    #[test]
    fn coprime_distance_matches_window_scan(p in 0i64..97, q in 1i64..97, n in 1u64..=500) {
        let alpha = RealTarget::rational(p, q).unwrap();
        let got = coprime_dist(n, &alpha, DEFAULT_SCAN_CAP).unwrap();
        let na = r(p, q) * BigRational::from_integer(BigInt::from(n));
        let floor = na.floor().to_integer();
        let mut best: Option<(BigRational, BigInt)> = None;
        for j in -50i64..=51 {
            let c = &floor + j;
            if c.mod_floor(&BigInt::from(n)).gcd(&BigInt::from(n)) != BigInt::from(1) {
                continue;
            }
            let d = (&na - BigRational::from_integer(c.clone())).abs();
            if best.as_ref().is_none_or(|(b, _)| d < *b) {
                best = Some((d, c));
            }
        }
        let (d, c) = best.unwrap();
        prop_assert_eq!(got.exact(), Some(d));
        prop_assert_eq!(got.p, c);
    }

    #[test]
    fn rational_hits_zero_exactly_at_multiples(p in 0i64..50, q in 1i64..50, n in 1u64..2000) {
        prop_assume!(p.gcd(&q) == 1);
        let d = dist_to_integers(n, &RealTarget::rational(p, q).unwrap()).unwrap();
        prop_assert_eq!(d.exact().unwrap().is_zero(), n % q as u64 == 0);
    }
}

#[test]
fn solutions_nest_under_scaling() {
    let family = SequenceFamily::single(PseudoValueSequence::constant_ratio(2).unwrap());
    let targets = [RealTarget::golden_ratio(), RealTarget::rational(3, 11).unwrap()];
    for alpha in &targets {
        let small = enumerate_solutions(alpha, &PsiSpec::constant(r(1, 5)).unwrap(), &family, 600).unwrap();
        let large = enumerate_solutions(alpha, &PsiSpec::constant(r(2, 5)).unwrap(), &family, 600).unwrap();
        let big: Vec<(u64, BigInt)> = large.records.iter().map(|x| (x.n, x.p.clone())).collect();
        for s in &small.records {
            assert!(big.contains(&(s.n, s.p.clone())), "n={}, p={}", s.n, s.p);
        }
        assert!(large.count() >= small.count());
    }
}

#[test]
fn zero_distance_records_at_multiples_of_q() {
    let alpha = RealTarget::rational(2, 9).unwrap();
    let scan = enumerate_solutions(
        &alpha,
        &PsiSpec::constant(r(1, 2)).unwrap(),
        &SequenceFamily::new(vec![]),
        900,
    )
    .unwrap();
    for rec in &scan.records {
        if rec.dist_exact.as_ref().is_some_and(|d| d.is_zero()) {
            assert_eq!(rec.n % 9, 0);
        }
    }
    assert!(scan
        .records
        .iter()
        .all(|x| !x.dist_exact.as_ref().unwrap().is_negative()));
}

#[test]
fn certified_records_have_nonnegative_slack() {
    let family = SequenceFamily::new(vec![
        PseudoValueSequence::constant_ratio(2).unwrap(),
        PseudoValueSequence::constant_ratio(3).unwrap(),
    ]);
    let scan = enumerate_solutions(
        &RealTarget::golden_ratio(),
        &PsiSpec::constant(r(1, 3)).unwrap(),
        &family,
        2000,
    )
    .unwrap();
    assert!(scan.count() > 0);
    for rec in scan.solutions() {
        let want = rec.dist * num_traits::ToPrimitive::to_f64(&rec.product_norm).unwrap();
        assert!((rec.value - want).abs() <= 1e-12 * want.max(1.0), "n={}", rec.n);
        assert!(rec.slack >= -1e-12, "n={}, slack {}", rec.n, rec.slack);
    }
}
