//! Unordered factorizations of an integer into factors larger than one.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::vpart::Alpha;
use crate::BigNat;

/// Default trial-division guard for [`count_factorizations`].
pub const DEFAULT_FACTOR_LIMIT: u64 = 1_000_000_000_000;
/// Largest `n` accepted by [`enumerate_factorizations`].
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

/// A multiset of factors `>= 2`, stored nondecreasing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Factorization {
    factors: Vec<u64>,
}

impl Factorization {
    pub fn new(mut factors: Vec<u64>) -> Result<Self> {
        if factors.iter().any(|&f| f < 2) {
            return Err(Error::InvalidInput("factors must be at least 2".into()));
        }
        factors.sort_unstable();
        Ok(Factorization { factors })
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn product(&self) -> u64 {
        self.factors.iter().product()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors.iter().map(u64::to_string).collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// Prime factorization by trial division, primes ascending.
pub fn prime_factorization(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Sorted multiset of prime exponents of `n`.
pub fn exponent_signature(n: u64) -> Result<Alpha> {
    exponent_signature_with_limit(n, DEFAULT_FACTOR_LIMIT)
}

pub fn exponent_signature_with_limit(n: u64, limit: u64) -> Result<Alpha> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if n == 1 {
        return Err(Error::UndefinedForOne);
    }
    if n > limit {
        return Err(Error::too_large("n", n, limit));
    }
    let exps = prime_factorization(n).into_iter().map(|(_, e)| e).collect();
    Alpha::new(exps)
}

pub fn count_factorizations(n: u64) -> Result<BigNat> {
    Factorizer::new().count(n)
}

pub fn enumerate_factorizations(n: u64) -> Result<Vec<Factorization>> {
    Factorizer::new().enumerate(n)
}

/// Factorization counter with a configurable trial-division guard.
#[derive(Clone, Debug)]
pub struct Factorizer {
    limit: u64,
}

impl Default for Factorizer {
    fn default() -> Self {
        Self::new()
    }
}

impl Factorizer {
    pub fn new() -> Self {
        Factorizer {
            limit: DEFAULT_FACTOR_LIMIT,
        }
    }

    pub fn with_limit(limit: u64) -> Self {
        Factorizer { limit }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `f(n)` via `F(n, m) = sum_{d | n, 2 <= d <= m} F(n/d, d)`, `F(1, _) = 1`.
    pub fn count(&self, n: u64) -> Result<BigNat> {
        if n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        if n > self.limit {
            return Err(Error::too_large("n", n, self.limit));
        }
        if n == 1 {
            return Ok(BigNat::one());
        }
        let primes = prime_factorization(n).into_iter().map(|(p, _)| p).collect();
        let mut rec = DivisorRecursion {
            primes,
            divisors: HashMap::new(),
            memo: HashMap::new(),
        };
        Ok(rec.count(n, n))
    }

    /// All factorizations of `n`, sorted lexicographically.
    pub fn enumerate(&self, n: u64) -> Result<Vec<Factorization>> {
        if n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        if n > ENUMERATION_LIMIT.min(self.limit) {
            return Err(Error::too_large("n", n, ENUMERATION_LIMIT.min(self.limit)));
        }
        let mut out = Vec::new();
        let mut current = Vec::new();
        enumerate_from(n, 2, &mut current, &mut out);
        out.sort();
        Ok(out)
    }
}

fn enumerate_from(n: u64, least: u64, current: &mut Vec<u64>, out: &mut Vec<Factorization>) {
    if n == 1 {
        out.push(Factorization {
            factors: current.clone(),
        });
        return;
    }
    let mut d = least;
    while d * d <= n {
        if n.is_multiple_of(d) {
            current.push(d);
            enumerate_from(n / d, d, current, out);
            current.pop();
        }
        d += 1;
    }
    if n >= least {
        current.push(n);
        out.push(Factorization {
            factors: current.clone(),
        });
        current.pop();
    }
}

struct DivisorRecursion {
    /// Primes of the top-level `n`; every recursive argument divides it.
    primes: Vec<u64>,
    divisors: HashMap<u64, Rc<Vec<u64>>>,
    memo: HashMap<(u64, u64), BigNat>,
}

impl DivisorRecursion {
    fn divisors_of(&mut self, n: u64) -> Rc<Vec<u64>> {
        if let Some(d) = self.divisors.get(&n) {
            return d.clone();
        }
        let mut divs = vec![1u64];
        let mut rest = n;
        for &p in &self.primes {
            if !rest.is_multiple_of(p) {
                continue;
            }
            let len = divs.len();
            let mut pk = 1u64;
            while rest.is_multiple_of(p) {
                rest /= p;
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        debug_assert_eq!(rest, 1);
        divs.sort_unstable();
        let divs = Rc::new(divs);
        self.divisors.insert(n, divs.clone());
        divs
    }

    fn count(&mut self, n: u64, bound: u64) -> BigNat {
        if n == 1 {
            return BigNat::one();
        }
        let divs = self.divisors_of(n);
        // Normalize the bound to the largest divisor of n not exceeding it.
        let end = divs.partition_point(|&d| d <= bound);
        if end <= 1 {
            return BigNat::zero();
        }
        let key = (n, divs[end - 1]);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut acc = BigNat::zero();
        for &d in &divs[1..end] {
            acc += self.count(n / d, d);
        }
        self.memo.insert(key, acc.clone());
        acc
    }
}
