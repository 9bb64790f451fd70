//! Exact classic sequences: integer partitions, Bell numbers, binomials,
//! factorials and the sum-of-divisors function.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;

use crate::error::{Error, Result};
use crate::interval::{RealInterval, DEFAULT_PRECISION, MAX_PRECISION};
use crate::BigNat;

static PARTITIONS: Lazy<RwLock<Vec<BigNat>>> = Lazy::new(|| RwLock::new(vec![BigNat::one()]));

/// `p(n)`, the number of partitions of `n`, with `p(0) = 1`.
///
/// Values are produced by Euler's pentagonal-number recurrence and kept in a
/// process-wide table, so repeated calls are lookups.
pub fn partition_number(n: usize) -> BigNat {
    if let Some(v) = PARTITIONS.read().get(n) {
        return v.clone();
    }
    let mut table = PARTITIONS.write();
    extend_partitions(&mut table, n);
    table[n].clone()
}

/// `[p(0), p(1), ..., p(n)]`.
pub fn partition_numbers_upto(n: usize) -> Vec<BigNat> {
    {
        let table = PARTITIONS.read();
        if table.len() > n {
            return table[..=n].to_vec();
        }
    }
    let mut table = PARTITIONS.write();
    extend_partitions(&mut table, n);
    table[..=n].to_vec()
}

fn extend_partitions(table: &mut Vec<BigNat>, n: usize) {
    while table.len() <= n {
        let m = table.len();
        let mut acc = BigInt::zero();
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let mut s = BigInt::from(table[m - g1].clone());
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= m {
                s += BigInt::from(table[m - g2].clone());
            }
            if k % 2 == 1 {
                acc += s;
            } else {
                acc -= s;
            }
        }
        table.push(acc.to_biguint().expect("p(n) is positive"));
    }
}

/// The Bell number `B_r` via the Bell triangle (`B_0 = 1`).
pub fn bell_number(r: usize) -> BigNat {
    if r == 0 {
        return BigNat::one();
    }
    let mut row = vec![BigNat::one()];
    for _ in 1..r {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().unwrap().clone());
        for v in &row {
            let s = next.last().unwrap() + v;
            next.push(s);
        }
        row = next;
    }
    row.pop().unwrap()
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigNat {
    if k > n {
        return BigNat::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigNat::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

pub fn factorial(n: u64) -> BigNat {
    (2..=n).fold(BigNat::one(), |acc, i| acc * i)
}

/// Sum of the divisors of `m`, by trial-division factorization.
pub fn sigma(m: u64) -> BigNat {
    assert!(m >= 1, "sigma is defined for m >= 1");
    let mut rest = m;
    let mut acc = BigNat::one();
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            // 1 + p + ... + p^e
            let mut term = BigNat::one();
            let mut pk = BigNat::one();
            while rest.is_multiple_of(p) {
                rest /= p;
                pk *= p;
                term += &pk;
            }
            acc *= term;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        acc *= rest + 1;
    }
    acc
}

/// Sum an infinite series of positive exact terms whose successive ratios
/// are eventually non-increasing. Once the ratio drops to `1/2` the tail is
/// bounded by twice the next term; terms are added until that bound is
/// below `tail_tol`. Returns `(partial_sum, tail_bound, terms_used)`.
pub(crate) fn sum_with_geometric_tail(
    mut term: impl FnMut(u64) -> BigRational,
    first: u64,
    tail_tol: &BigRational,
    max_terms: u64,
) -> Option<(BigRational, BigRational, u64)> {
    let half = BigRational::new(1.into(), 2.into());
    let mut sum = BigRational::zero();
    let mut k = first;
    let mut current = term(k);
    let mut prev_ratio: Option<BigRational> = None;
    loop {
        let next = term(k + 1);
        sum += &current;
        if !current.is_zero() {
            let ratio = &next / &current;
            if let Some(prev) = &prev_ratio {
                // Ratios must settle into a non-increasing run once small.
                debug_assert!(ratio <= *prev || *prev > half);
            }
            if ratio <= half {
                let tail = &next * BigRational::from_integer(2.into());
                if &tail < tail_tol {
                    return Some((sum, tail, k - first + 1));
                }
            }
            prev_ratio = Some(ratio);
        }
        k += 1;
        if k - first > max_terms {
            return None;
        }
        current = next;
    }
}

/// Enclosure of Dobinski's series `(1/e) * sum_{k>=0} k^r / k!`, which
/// equals `B_r`, truncated with a certified tail below `tail_tol`.
pub fn dobinski_partial(r: u32, tail_tol: f64) -> Result<RealInterval> {
    dobinski_partial_with(r, tail_tol, DEFAULT_PRECISION, MAX_PRECISION)
}

pub fn dobinski_partial_with(
    r: u32,
    tail_tol: f64,
    precision: u32,
    precision_cap: u32,
) -> Result<RealInterval> {
    if r == 0 {
        return Err(Error::InvalidInput("dobinski_partial needs r >= 1".into()));
    }
    let tol = positive_tolerance(tail_tol)?;
    // k^r / k! is increasing until k ~ r, then the ratio (1+1/k)^r/(k+1)
    // decreases monotonically; start the geometric test past the peak.
    let term = |k: u64| {
        BigRational::new(
            BigInt::from(BigNat::from(k).pow(r)),
            BigInt::from(factorial(k)),
        )
    };
    let (sum, tail, _) = sum_with_geometric_tail(term, 0, &tol, 100_000 + 4 * r as u64)
        .ok_or(Error::PrecisionExhausted { cap: precision_cap })?;
    Ok(divide_by_e(&sum, &tail, precision))
}

/// `[sum / e, (sum + tail) / e]`.
pub(crate) fn divide_by_e(sum: &BigRational, tail: &BigRational, precision: u32) -> RealInterval {
    let e = RealInterval::e(precision);
    let lo = RealInterval::from_rational(sum, precision).div(&e);
    let hi = RealInterval::from_rational(&(sum + tail), precision).div(&e);
    lo.hull(&hi)
}

pub(crate) fn positive_tolerance(tol: f64) -> Result<BigRational> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "tail tolerance must be a positive finite number, got {tol}"
        )));
    }
    Ok(BigRational::from_float(tol).expect("finite float"))
}

/// Natural log of a big integer as an `f64` (for reports, never for verdicts).
pub fn ln_f64(n: &BigNat) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 900;
    (n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}
