//! Truncated multivariate expansion of `P(q) = prod_beta (1 - q^beta)^-1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::Alpha;
use crate::bigcomb::sigma;
use crate::error::{Error, Result};
use crate::BigNat;

/// Largest `sum(alpha_max)` accepted by [`truncated_p_coefficients`].
pub const SERIES_MAX_TOTAL: u64 = 12;

/// Coefficients of `P(q)` for every exponent `beta <= alpha_max`, together
/// with the outcome of the logarithm/exponential cross-checks.
#[derive(Clone, Debug)]
pub struct PSeries {
    dims: Vec<u32>,
    strides: Vec<usize>,
    coeffs: Vec<BigNat>,
    /// `[q^beta] log P == sigma(gcd beta) / gcd beta` for every nonzero beta.
    pub log_identity_holds: bool,
    /// `exp(sum sigma(g)/g q^beta)` reproduces every coefficient of `P`.
    pub exp_identity_holds: bool,
    /// `exp(H)` with `H = log P - sum q^beta` has no negative coefficient.
    pub exp_h_nonnegative: bool,
}

impl PSeries {
    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    /// Coefficient of `q^beta`, or `None` outside the truncation box.
    pub fn coefficient(&self, beta: &[u32]) -> Option<&BigNat> {
        if beta.len() != self.dims.len() || beta.iter().zip(&self.dims).any(|(b, d)| b > d) {
            return None;
        }
        Some(&self.coeffs[index(beta, &self.strides)])
    }

    /// `(beta, coefficient)` for every beta in the box, lexicographically.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<u32>, &BigNat)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (decode(i, &self.strides, self.dims.len()), c))
    }
}

fn index(v: &[u32], strides: &[usize]) -> usize {
    v.iter().zip(strides).map(|(&c, &s)| c as usize * s).sum()
}

fn decode(mut i: usize, strides: &[usize], r: usize) -> Vec<u32> {
    let mut out = vec![0; r];
    for (o, &s) in out.iter_mut().zip(strides) {
        *o = (i / s) as u32;
        i %= s;
    }
    out
}

/// Calls `f(beta_index)` for every `beta <= gamma` component-wise.
fn for_each_below(gamma: &[u32], strides: &[usize], mut f: impl FnMut(usize, &[u32])) {
    let r = gamma.len();
    let mut beta = vec![0u32; r];
    let mut idx = 0usize;
    loop {
        f(idx, &beta);
        let mut i = r;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if beta[i] < gamma[i] {
                beta[i] += 1;
                idx += strides[i];
                break;
            }
            idx -= beta[i] as usize * strides[i];
            beta[i] = 0;
        }
    }
}

/// Expands `P(q)` up to `alpha_max` by multiplying in each geometric factor
/// `(1 - q^beta)^-1`, then verifies the logarithmic coefficient identity and
/// the non-negativity of `exp(H)` on the same box.
pub fn truncated_p_coefficients(alpha_max: &Alpha) -> Result<PSeries> {
    if alpha_max.total() > SERIES_MAX_TOTAL {
        return Err(Error::too_large(
            "sum of components of",
            alpha_max,
            SERIES_MAX_TOTAL,
        ));
    }
    let dims = alpha_max.components().to_vec();
    let r = dims.len();
    let mut strides = vec![1usize; r];
    for i in (0..r.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * (dims[i + 1] as usize + 1);
    }
    let size = strides[0] * (dims[0] as usize + 1);
    let vectors: Vec<Vec<u32>> = (0..size).map(|i| decode(i, &strides, r)).collect();

    // Product of geometric series, one factor per nonzero beta in the box.
    let mut coeffs = vec![BigNat::zero(); size];
    coeffs[0] = BigNat::from(1u32);
    for b in 1..size {
        // Offsets visited in increasing order, so q^beta may repeat.
        let room: Vec<u32> = dims.iter().zip(&vectors[b]).map(|(d, x)| d - x).collect();
        for_each_below(&room, &strides, |off, _| {
            let add = coeffs[off].clone();
            coeffs[off + b] += add;
        });
    }

    let degree: Vec<u64> = vectors
        .iter()
        .map(|v| v.iter().map(|&c| c as u64).sum())
        .collect();
    let rat = |n: &BigNat| BigRational::from_integer(BigInt::from(n.clone()));

    // log P from P via the Euler-operator recurrence:
    // |g| L[g] = |g| P[g] - sum_{0 < b < g} |b| L[b] P[g - b].
    let mut log_p = vec![BigRational::zero(); size];
    for g in 1..size {
        let mut acc = rat(&coeffs[g]) * BigInt::from(degree[g]);
        for_each_below(&vectors[g], &strides, |b, _| {
            if b != 0 && b != g {
                acc -= &log_p[b] * BigInt::from(degree[b]) * rat(&coeffs[g - b]);
            }
        });
        log_p[g] = acc / BigInt::from(degree[g]);
    }
    let sigma_ratio: Vec<BigRational> = vectors
        .iter()
        .map(|v| {
            let g = v.iter().fold(0u64, |g, &c| g.gcd(&(c as u64)));
            if g == 0 {
                BigRational::zero()
            } else {
                BigRational::new(BigInt::from(sigma(g)), BigInt::from(g))
            }
        })
        .collect();
    let log_identity_holds = (1..size).all(|b| log_p[b] == sigma_ratio[b]);

    let exp_series = |c: &[BigRational]| -> Vec<BigRational> {
        // |g| E[g] = sum_{0 < b <= g} |b| c[b] E[g - b]
        let mut e = vec![BigRational::zero(); size];
        e[0] = BigRational::from_integer(1.into());
        for g in 1..size {
            let mut acc = BigRational::zero();
            for_each_below(&vectors[g], &strides, |b, _| {
                if b != 0 && !c[b].is_zero() {
                    acc += &c[b] * BigInt::from(degree[b]) * &e[g - b];
                }
            });
            e[g] = acc / BigInt::from(degree[g]);
        }
        e
    };

    let exp_c = exp_series(&sigma_ratio);
    let exp_identity_holds = (0..size).all(|g| exp_c[g] == rat(&coeffs[g]));

    let one = BigRational::from_integer(1.into());
    let h: Vec<BigRational> = sigma_ratio
        .iter()
        .enumerate()
        .map(|(i, c)| if i == 0 { c.clone() } else { c - &one })
        .collect();
    let exp_h_nonnegative = exp_series(&h).iter().all(|c| !c.is_negative());

    Ok(PSeries {
        dims,
        strides,
        coeffs,
        log_identity_holds,
        exp_identity_holds,
        exp_h_nonnegative,
    })
}
