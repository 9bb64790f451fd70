use std::collections::BTreeMap;

use mfact::bounds::{floor_n, g_rational, hypergeom_lower_bound, solve_z, term_t};
use mfact::cache::{self, CacheFile};
use mfact::factorizations::{count_factorizations, exponent_signature, Factorizer};
use mfact::fcount::{distinct_values, enumerate_feasible};
use mfact::vpart::{
    canonical_alphas, canonical_integer, count_vpartitions, count_vpartitions_raw, PCounter,
};
use mfact::{Alpha, BigNat, BigRat, RealInterval};
use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRat {
    BigRat::new(BigInt::from(n), BigInt::from(d))
}

fn overlaps(a: &RealInterval, b: &RealInterval) -> bool {
    !a.certainly_lt(b) && !b.certainly_lt(a)
}

fn small_alpha() -> impl Strategy<Value = Alpha> {
    prop::collection::vec(1u32..=4, 1..=4).prop_map(|v| Alpha::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rational_arithmetic_is_enclosed(
        an in -10_000i64..10_000, ad in 1i64..1000,
        bn in 1i64..10_000, bd in 1i64..1000,
        bits in prop::sample::select(vec![64u32, 128, 256]),
    ) {
        let (a, b) = (rat(an, ad), rat(bn, bd));
        let ia = RealInterval::from_rational(&a, bits);
        let ib = RealInterval::from_rational(&b, bits);
        prop_assert!(ia.contains_rational(&a));
        prop_assert!(ia.add(&ib).contains_rational(&(&a + &b)));
        prop_assert!(ia.sub(&ib).contains_rational(&(&a - &b)));
        prop_assert!(ia.mul(&ib).contains_rational(&(&a * &b)));
        prop_assert!(ia.div(&ib).contains_rational(&(&a / &b)));
        prop_assert!(ib.square().contains_rational(&(&b * &b)));
        prop_assert!(ib.mul(&ib).sqrt().contains_rational(&b));
    }

    #[test]
    fn exp_and_ln_are_consistent(n in 1i64..100_000, d in 1i64..1000, m in 1i64..100_000) {
        let x = rat(n, d);
        let y = rat(m, 7);
        let ix = RealInterval::from_rational(&x, 128);
        let iy = RealInterval::from_rational(&y, 128);
        prop_assert!(ix.ln().exp().contains_rational(&x));
        prop_assert!(overlaps(&ix.mul(&iy).ln(), &ix.ln().add(&iy.ln())));
        let lx = RealInterval::ln_rational(&x, 128);
        prop_assert!(overlaps(&lx, &ix.ln()));
        let f = (n as f64 / d as f64).ln();
        prop_assert!((lx.mid_f64() - f).abs() <= 1e-12 * f.abs().max(1.0));
    }

    #[test]
    fn count_ignores_component_order(mut v in prop::collection::vec(0u32..=4, 1..=5), seed in any::<u64>()) {
        let base = count_vpartitions_raw(&v, 10_000_000).unwrap();
        let k = v.len();
        v.rotate_left((seed as usize) % k);
        v.swap(0, (seed as usize / 7) % k);
        prop_assert_eq!(count_vpartitions_raw(&v, 10_000_000).unwrap(), base);
    }

    #[test]
    fn f_equals_p_of_signature(n in 2u64..50_000_000) {
        let alpha = exponent_signature(n).unwrap();
        prop_assert_eq!(count_factorizations(n).unwrap(), count_vpartitions(&alpha));
    }

    #[test]
    fn g_is_strictly_increasing(a in small_alpha(), z1n in 1i64..500, dz in 1i64..500, den in 1i64..50) {
        let z1 = rat(z1n, den);
        let z2 = rat(z1n + dz, den);
        prop_assert!(g_rational(&a, &z1) < g_rational(&a, &z2));
    }

    #[test]
    fn root_and_floor_bracket_unity(a in small_alpha()) {
        let z = solve_z(&a, 1e-12).unwrap();
        let ctx = floor_n(&a).unwrap();
        let one = BigRat::one();
        let n = ctx.n_floor as i64;
        prop_assert!(g_rational(&a, &rat(n, 1)) <= one);
        prop_assert!(g_rational(&a, &rat(n + 1, 1)) > one);
        prop_assert!(z.lo().to_rational() <= rat(n + 1, 1));
        prop_assert!(z.hi().to_rational() >= rat(n, 1));
    }

    #[test]
    fn single_term_is_below_series_bound(a in small_alpha()) {
        let ctx = floor_n(&a).unwrap();
        let bound = hypergeom_lower_bound(&a, 1e-9).unwrap();
        let bits = bound.precision();
        for k in [0, ctx.n_floor, ctx.n_floor + 1] {
            let t = RealInterval::from_rational(&term_t(&a, k), bits).div(&RealInterval::e(bits));
            prop_assert!(t.hi().to_rational() <= bound.hi().to_rational());
        }
        let p = count_vpartitions(&a);
        prop_assert!(bound.lo().to_rational() <= BigRat::from_integer(BigInt::from(p)));
    }

    #[test]
    fn cache_text_round_trips(entries in prop::collection::btree_map(
        prop::collection::vec(1u32..=6, 1..=4),
        1u64..u64::MAX,
        0..40,
    )) {
        let mut file = CacheFile::new();
        let mut expected = BTreeMap::new();
        for (k, v) in entries {
            let a = Alpha::new(k).unwrap();
            if expected.contains_key(&a) {
                continue;
            }
            file.insert(a.clone(), BigNat::from(v)).unwrap();
            expected.insert(a, BigNat::from(v));
        }
        let text = cache::render(&file);
        let back = cache::parse(&text, None).unwrap();
        prop_assert_eq!(back.entries(), &expected);
        prop_assert_eq!(cache::render(&back), text);
    }
}

#[test]
fn count_strictly_increases_along_search_edges() {
    for a in canonical_alphas(10) {
        let p = count_vpartitions(&a);
        assert!(count_vpartitions(&a.bump_last()) > p, "bump at ({a})");
        assert!(count_vpartitions(&a.repeat_last()) > p, "repeat at ({a})");
    }
}

#[test]
fn f_is_monotone_under_divisibility() {
    const M: usize = 10_000;
    let fz = Factorizer::new();
    let f: Vec<BigNat> = (0..=M as u64)
        .map(|n| {
            if n == 0 {
                BigNat::from(0u32)
            } else {
                fz.count(n).unwrap()
            }
        })
        .collect();
    for n in 1..=M {
        for m in (2 * n..=M).step_by(n) {
            assert!(f[n] <= f[m], "f({n}) > f({m})");
        }
    }
}

#[test]
fn distinct_values_grow_with_x() {
    let counter = PCounter::new();
    let mut prev: Option<Vec<BigNat>> = None;
    for x in [1u32, 2, 5, 10, 50, 100, 500, 1000, 5000] {
        let fs = enumerate_feasible(&BigNat::from(x), &counter, 1_000_000).unwrap();
        assert!(fs.complete);
        let dv = distinct_values(&fs).unwrap();
        assert!(dv.values.iter().all(|v| v <= &BigNat::from(x)));
        assert!(dv.count() <= fs.len());
        if let Some(p) = &prev {
            assert!(p.iter().all(|v| dv.values.contains(v)));
            assert!(p.len() <= dv.count());
        }
        prev = Some(dv.values);
    }
}

#[test]
fn every_spectrum_value_is_some_f() {
    let counter = PCounter::new();
    let fz = Factorizer::with_limit(u64::MAX);
    let fs = enumerate_feasible(&BigNat::from(10_000u32), &counter, 1_000_000).unwrap();
    for e in &fs.entries {
        let n = canonical_integer(&e.alpha).unwrap();
        assert_eq!(fz.count(n).unwrap(), e.p, "({})", e.alpha);
        assert_eq!(exponent_signature(n).unwrap(), e.alpha);
    }
}

#[test]
fn large_cache_store_and_load() {
    let counter = PCounter::new();
    let mut file = CacheFile::new();
    let mut n = 0u32;
    'outer: for a in 1..=400u32 {
        for b in a..=400 {
            if n == 100_000 {
                break 'outer;
            }
            let alpha = Alpha::new(vec![a, b, (a * b) % 7 + 1]).unwrap();
            if file.get(&alpha).is_none() {
                file.insert(alpha, BigNat::from(u64::from(a) * 1_000_003 + u64::from(b)))
                    .unwrap();
                n += 1;
            }
        }
    }
    assert!(file.len() >= 50_000);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.cache");
    cache::store(&file, &path).unwrap();
    let back = cache::load(&path).unwrap();
    assert_eq!(back, file);
    counter.insert(Alpha::new(vec![1]).unwrap(), BigNat::from(1u32));
    assert_eq!(
        cache::merge(&back, &CacheFile::from_counter(&counter))
            .unwrap()
            .len(),
        file.len() + 1
    );
}
