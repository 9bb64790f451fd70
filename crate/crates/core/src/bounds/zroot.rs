use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use super::rational;
use crate::error::{Error, Result};
use crate::interval::{Dyadic, RealInterval, DEFAULT_PRECISION, MAX_PRECISION};
use crate::vpart::Alpha;

/// `z / prod(1 + alpha_i / z)`, exactly.
///
/// Panics unless `z > 0`.
pub fn g_rational(alpha: &Alpha, z: &BigRational) -> BigRational {
    assert!(z.is_positive(), "g(alpha, z) needs z > 0");
    let mut num = z.clone();
    let mut den = BigRational::one();
    for &a in alpha.components() {
        num *= z;
        den *= z + rational(a);
    }
    num / den
}

/// Enclosure of `g(alpha, z)` for every `z` in the interval.
///
/// `g` is strictly increasing on `z > 0`, so the image of `[lo, hi]` is
/// `[g(lo), g(hi)]`; both endpoints are evaluated exactly and then rounded
/// outward.
pub fn g_value(alpha: &Alpha, z: &RealInterval) -> RealInterval {
    let p = z.precision();
    let lo = RealInterval::from_rational(&g_rational(alpha, &z.lo().to_rational()), p);
    let hi = RealInterval::from_rational(&g_rational(alpha, &z.hi().to_rational()), p);
    lo.hull(&hi)
}

/// `g(alpha, z) >= 1`, i.e. `z^(r+1) >= prod(z + alpha_i)`.
fn g_at_least_one(alpha: &Alpha, z: &BigRational) -> std::cmp::Ordering {
    g_rational(alpha, z).cmp(&BigRational::one())
}

/// Encloses the unique root of `g(alpha, z) = 1` in an interval of width
/// at most `tol`.
///
/// Bisection runs on dyadic rationals with exact comparisons, so each
/// bracket endpoint is certified on the correct side of the root.
pub fn solve_z(alpha: &Alpha, tol: f64) -> Result<RealInterval> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let one = BigRational::one();
    assert!(g_rational(alpha, &one) < one, "g(alpha, 1) must be below 1");
    let tol_q = Dyadic::from_f64(tol)
        .expect("finite tolerance")
        .to_rational();
    let mut lo = one.clone();
    let mut hi = rational(2);
    loop {
        match g_at_least_one(alpha, &hi) {
            std::cmp::Ordering::Less => {
                lo = hi.clone();
                hi *= rational(2);
            }
            std::cmp::Ordering::Equal => lo = hi.clone(),
            std::cmp::Ordering::Greater => {}
        }
        if lo == hi || g_at_least_one(alpha, &hi).is_gt() {
            break;
        }
    }
    let two = rational(2);
    while lo != hi && &hi - &lo > tol_q {
        let mid = (&lo + &hi) / &two;
        match g_at_least_one(alpha, &mid) {
            std::cmp::Ordering::Less => lo = mid,
            std::cmp::Ordering::Greater => hi = mid,
            std::cmp::Ordering::Equal => {
                lo = mid.clone();
                hi = mid;
            }
        }
    }
    // The endpoints are dyadic; pick a precision that holds them exactly.
    let bits = |q: &BigRational| q.numer().bits() as u32 + 1;
    let need = bits(&lo).max(bits(&hi)).max(DEFAULT_PRECISION);
    if need > MAX_PRECISION {
        return Err(Error::PrecisionExhausted { cap: MAX_PRECISION });
    }
    let to_dyadic = |q: &BigRational| {
        let den_bits = q.denom().bits() as i64 - 1;
        Dyadic::new(q.numer().clone(), -den_bits)
    };
    Ok(RealInterval::new(to_dyadic(&lo), to_dyadic(&hi), need))
}

/// Root of `g = 1` together with its floor.
#[derive(Clone, Debug, Serialize)]
pub struct BoundContext {
    pub alpha: Alpha,
    pub z_alpha: RealInterval,
    pub n_floor: u64,
}

/// Width used for the root enclosure stored in a [`BoundContext`].
const Z_TOL: f64 = 1.0 / (1u64 << 60) as f64;

/// `N = floor(z(alpha))`, found as the largest integer `m` with
/// `g(alpha, m) <= 1` by exact rational search. The sandwich
/// `g(N) <= 1 < g(N+1)` holds by construction and is re-checked.
/// When the root is an integer `m`, `g(m) = 1` exactly and `N = m`.
pub fn floor_n(alpha: &Alpha) -> Result<BoundContext> {
    let g_le_one = |m: u64| g_rational(alpha, &rational(m)) <= BigRational::one();
    let mut lo = 1u64;
    let mut hi = 2u64;
    while g_le_one(hi) {
        lo = hi;
        hi = hi
            .checked_mul(2)
            .ok_or(Error::PrecisionExhausted { cap: MAX_PRECISION })?;
    }
    // Invariant: g(lo) <= 1 < g(hi).
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if g_le_one(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !(g_le_one(lo) && !g_le_one(lo + 1)) {
        return Err(Error::PrecisionExhausted { cap: MAX_PRECISION });
    }
    let z = solve_z(alpha, Z_TOL)?;
    debug_assert!(z.lo().to_rational() >= rational(lo));
    debug_assert!(z.hi().to_rational() <= rational(BigInt::from(lo + 1)));
    Ok(BoundContext {
        alpha: alpha.clone(),
        z_alpha: z,
        n_floor: lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(v: &[u32]) -> Alpha {
        Alpha::new(v.to_vec()).unwrap()
    }

    #[test]
    fn g_examples() {
        let one = BigRational::one();
        assert_eq!(
            g_rational(&alpha(&[1, 2]), &one),
            BigRational::new(1.into(), 6.into())
        );
        assert_eq!(
            g_rational(&alpha(&[1]), &one),
            BigRational::new(1.into(), 2.into())
        );
        let phi = RealInterval::from_int(5, 128)
            .sqrt()
            .add(&RealInterval::one(128))
            .mul_pow2(-1);
        let g = g_value(&alpha(&[1]), &phi);
        assert!(g.contains_int(&1u32.into()));
    }

    #[test]
    fn roots() {
        let z = solve_z(&alpha(&[1]), 1e-12).unwrap();
        assert!(z.width().to_f64() <= 1e-12);
        assert!((z.mid_f64() - 1.618_033_988_749_895).abs() < 1e-11);
        let z = solve_z(&alpha(&[10]), 1e-12).unwrap();
        let want = (1.0 + 41f64.sqrt()) / 2.0;
        assert!((z.mid_f64() - want).abs() < 1e-11);
        let z = solve_z(&alpha(&[1, 1]), 1e-12).unwrap();
        let m = z.mid_f64();
        assert!((m.powi(3) - (m + 1.0).powi(2)).abs() < 1e-9);
        assert!(solve_z(&alpha(&[1]), 0.0).is_err());
    }

    #[test]
    fn root_brackets_are_certified() {
        for v in [&[1][..], &[2, 3], &[1, 1, 1, 1], &[7, 7]] {
            let a = alpha(v);
            let z = solve_z(&a, 1e-9).unwrap();
            let one = BigRational::one();
            assert!(g_rational(&a, &z.lo().to_rational()) <= one);
            assert!(g_rational(&a, &z.hi().to_rational()) >= one);
            assert!(z.lo().to_rational() > one);
        }
    }

    #[test]
    fn floors() {
        assert_eq!(floor_n(&alpha(&[1])).unwrap().n_floor, 1);
        assert_eq!(floor_n(&alpha(&[10])).unwrap().n_floor, 3);
        assert_eq!(floor_n(&alpha(&[1, 1])).unwrap().n_floor, 2);
    }

    #[test]
    fn integer_root_is_its_own_floor() {
        // z^2 = z + 2 has root 2, so g((2), 2) = 1 exactly.
        let a = alpha(&[2]);
        assert_eq!(g_rational(&a, &rational(2)), BigRational::one());
        let ctx = floor_n(&a).unwrap();
        assert_eq!(ctx.n_floor, 2);
        assert!(ctx.z_alpha.is_point());
    }
}
