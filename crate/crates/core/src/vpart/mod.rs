//! Partitions of exponent vectors.
//!
//! A partition of `alpha` in `N^r` is an unordered sum of nonzero
//! nonnegative vectors equal to `alpha`; `p(alpha)` counts them and equals
//! `f(n)` for any `n` whose exponent signature is `alpha`.

mod count;
mod enumerate;
mod series;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bigcomb::sigma;
use crate::error::{Error, Result};
use crate::BigRat;

pub use count::{count_vpartitions, count_vpartitions_raw, PCounter};
pub use enumerate::{enumerate_vpartitions, for_each_vpartition, ORACLE_MAX_TOTAL};
pub use series::{truncated_p_coefficients, PSeries, SERIES_MAX_TOTAL};

/// Canonical exponent tuple: nonempty, positive, nondecreasing.
///
/// Ordering is length-first, then lexicographic; that is the order cache
/// files are written in.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Alpha(Vec<u32>);

impl Alpha {
    /// Canonicalizes (sorts) the components; rejects empty input and zeros.
    pub fn new(mut components: Vec<u32>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInput(
                "alpha must have at least one component".into(),
            ));
        }
        if components.contains(&0) {
            return Err(Error::InvalidInput(
                "alpha components must be positive".into(),
            ));
        }
        components.sort_unstable();
        Ok(Alpha(components))
    }

    /// Like [`Alpha::new`] but rejects input that is not already sorted.
    pub fn from_canonical(components: Vec<u32>) -> Result<Self> {
        if components.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput(format!(
                "components {components:?} are not nondecreasing"
            )));
        }
        Self::new(components)
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    /// Number of components `r`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&a| a as u64).sum()
    }

    pub fn last(&self) -> u32 {
        *self.0.last().unwrap()
    }

    /// `prod (alpha_i + 1)`, the number of vectors below `alpha`, if it fits.
    pub fn box_size(&self) -> Option<u64> {
        self.0
            .iter()
            .try_fold(1u64, |acc, &a| acc.checked_mul(a as u64 + 1))
    }

    /// The tuple with the last component incremented.
    pub fn bump_last(&self) -> Alpha {
        let mut v = self.0.clone();
        *v.last_mut().unwrap() += 1;
        Alpha(v)
    }

    /// The tuple with a copy of the last component appended.
    pub fn repeat_last(&self) -> Alpha {
        let mut v = self.0.clone();
        v.push(self.last());
        Alpha(v)
    }
}

impl Ord for Alpha {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Alpha {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Parses `"a1,a2,...,ar"`; the components must already be canonical.
impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let comps = s
            .split(',')
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| Error::InvalidInput(format!("bad component {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Alpha::from_canonical(comps)
    }
}

impl TryFrom<Vec<u32>> for Alpha {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        Alpha::new(v)
    }
}

impl From<Alpha> for Vec<u32> {
    fn from(a: Alpha) -> Self {
        a.0
    }
}

/// A nonzero nonnegative vector: one part of a vector partition.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
#[serde(transparent)]
pub struct VectorPart(Vec<u32>);

impl VectorPart {
    pub fn new(components: Vec<u32>) -> Result<Self> {
        if components.iter().all(|&c| c == 0) {
            return Err(Error::InvalidInput(
                "a part must be a nonzero vector".into(),
            ));
        }
        Ok(VectorPart(components))
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    /// gcd of the components.
    pub fn gcd(&self) -> u64 {
        self.0.iter().fold(0u64, |g, &c| g.gcd(&(c as u64)))
    }
}

impl fmt::Display for VectorPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A multiset of parts, stored in non-increasing lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct VPartition {
    parts: Vec<VectorPart>,
}

impl VPartition {
    pub fn new(mut parts: Vec<VectorPart>) -> Self {
        parts.sort_by(|a, b| b.cmp(a));
        VPartition { parts }
    }

    pub fn parts(&self) -> &[VectorPart] {
        &self.parts
    }

    /// Component-wise sum of the parts.
    pub fn total(&self) -> Vec<u32> {
        let r = self.parts.first().map_or(0, |p| p.0.len());
        let mut out = vec![0u32; r];
        for p in &self.parts {
            for (o, c) in out.iter_mut().zip(&p.0) {
                *o += c;
            }
        }
        out
    }
}

impl fmt::Display for VPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(VectorPart::to_string).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `sigma(g) / g` with `g` the gcd of the components: the coefficient of
/// `q^beta` in `log P(q)`.
pub fn logp_coefficient(beta: &VectorPart) -> BigRat {
    let g = beta.gcd();
    BigRational::new(BigInt::from(sigma(g)), BigInt::from(g))
}

/// Every canonical `Alpha` with `1 <= total <= max_total`, in `Alpha` order.
pub fn canonical_alphas(max_total: u32) -> Vec<Alpha> {
    fn extend(rest: u32, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Alpha>) {
        if !cur.is_empty() {
            out.push(Alpha(cur.clone()));
        }
        for c in min..=rest {
            cur.push(c);
            extend(rest - c, c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(max_total, 1, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// First `r` primes.
pub(crate) fn first_primes(r: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(r);
    let mut c = 2u64;
    while primes.len() < r {
        if primes
            .iter()
            .take_while(|&&p| p * p <= c)
            .all(|&p| !c.is_multiple_of(p))
        {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

/// The smallest integer with exponent signature `alpha`: the largest
/// exponents go on the smallest primes.
pub fn canonical_integer(alpha: &Alpha) -> Result<u64> {
    let primes = first_primes(alpha.len());
    let mut n = 1u64;
    for (p, &e) in primes.iter().zip(alpha.components().iter().rev()) {
        for _ in 0..e {
            n = n
                .checked_mul(*p)
                .ok_or_else(|| Error::too_large("canonical integer of", alpha, u64::MAX))?;
        }
    }
    Ok(n)
}
