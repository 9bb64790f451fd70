use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::{
    check_le, compare_exp_sqrt, floor_n, fold_outcomes, rational, BoundContext, Check, LemmaId,
    LemmaReport, Outcome, Precision, Status,
};
use crate::bigcomb::{binomial, divide_by_e, factorial, ln_f64, positive_tolerance};
use crate::error::{Error, Result};
use crate::interval::{RealInterval, DEFAULT_PRECISION, MAX_PRECISION};
use crate::vpart::{Alpha, PCounter};
use crate::BigNat;

/// Hard cap on hypergeometric terms before giving up.
const MAX_TERMS: u64 = 1_000_000;

/// `T(alpha, k) = prod C(k + alpha_i, k) / (k+1)!`.
pub fn term_t(alpha: &Alpha, k: u64) -> BigRational {
    let mut num = BigNat::one();
    for &a in alpha.components() {
        num *= binomial(k + a as u64, k);
    }
    BigRational::new(BigInt::from(num), BigInt::from(factorial(k + 1)))
}

/// Exact partial sum of `sum_k T(alpha, k)` and a certified bound on the
/// remainder. The term ratio `prod(1 + alpha_i/(k+1)) / (k+2)` decreases
/// in `k`, so the geometric tail bound applies once it reaches `1/2`.
fn hypergeom_series(alpha: &Alpha, tail_tol: f64) -> Result<(BigRational, BigRational)> {
    let tol = positive_tolerance(tail_tol)?;
    let (sum, tail, _) =
        crate::bigcomb::sum_with_geometric_tail(|k| term_t(alpha, k), 0, &tol, MAX_TERMS)
            .ok_or(Error::PrecisionExhausted { cap: MAX_PRECISION })?;
    Ok((sum, tail))
}

/// Enclosure of `(1/e) sum_{k>=0} T(alpha, k)`, a lower bound for `p(alpha)`
/// that is an equality when every component is 1.
pub fn hypergeom_lower_bound(alpha: &Alpha, tail_tol: f64) -> Result<RealInterval> {
    hypergeom_lower_bound_with(alpha, tail_tol, DEFAULT_PRECISION)
}

pub fn hypergeom_lower_bound_with(
    alpha: &Alpha,
    tail_tol: f64,
    precision: u32,
) -> Result<RealInterval> {
    let (sum, tail) = hypergeom_series(alpha, tail_tol)?;
    Ok(divide_by_e(&sum, &tail, precision))
}

/// Squared, exponential-free part of the explicit bound:
/// `1/(4 N^3) * prod (1/(8N)) (1 + N/alpha_i)^(2 alpha_i + 1)`.
fn prop_a_square_factor(ctx: &BoundContext) -> BigRational {
    let n = ctx.n_floor;
    let mut q = BigRational::new(1.into(), BigInt::from(4u32) * BigInt::from(n).pow(3));
    for &a in ctx.alpha.components() {
        let base = BigRational::new(BigInt::from(a as u64 + n), BigInt::from(a));
        q *= pow_rat(&base, 2 * a + 1) / rational(8 * n);
    }
    q
}

fn pow_rat(q: &BigRational, e: u32) -> BigRational {
    BigRational::new(q.numer().pow(e), q.denom().pow(e))
}

/// `log` of the explicit bound: `(N - 2) + (1/2) log Q`.
fn prop_a_log(ctx: &BoundContext, precision: u32) -> RealInterval {
    let q = prop_a_square_factor(ctx);
    RealInterval::ln_rational(&q, precision)
        .mul_pow2(-1)
        .add(&RealInterval::from_int(ctx.n_floor as i64 - 2, precision))
}

/// `e^(N-2) / (2 N^(3/2)) * prod (1/(2 sqrt(2N))) (1 + N/alpha_i)^(alpha_i + 1/2)`,
/// evaluated in log space.
pub fn prop_a_lower_bound(ctx: &BoundContext) -> RealInterval {
    prop_a_lower_bound_with(ctx, DEFAULT_PRECISION)
}

pub fn prop_a_lower_bound_with(ctx: &BoundContext, precision: u32) -> RealInterval {
    prop_a_log(ctx, precision).exp()
}

/// The single-term bound at `k = N`:
/// `T(alpha, N) >= e^(N-1) / (2 N^(N+3/2)) prod (1/(2 sqrt(2N))) (1+alpha_i/N)^N (1+N/alpha_i)^(alpha_i+1/2)`.
/// Both sides are squared so the comparison is exact when `N = 1`.
pub(crate) fn eq5_outcome(ctx: &BoundContext, precision: &Precision) -> Outcome {
    let n = ctx.n_floor;
    let t = term_t(&ctx.alpha, n);
    let mut q = BigRational::new(
        1.into(),
        BigInt::from(4u32) * BigInt::from(n).pow(2 * n as u32 + 3),
    );
    for &a in ctx.alpha.components() {
        let a64 = a as u64;
        let left = BigRational::new(BigInt::from(n + a64), BigInt::from(n));
        let right = BigRational::new(BigInt::from(n + a64), BigInt::from(a));
        q *= pow_rat(&left, 2 * n as u32) * pow_rat(&right, 2 * a + 1) / rational(8 * n);
    }
    compare_exp_sqrt(&t, n as i64 - 1, &q, true, precision, || {
        format!("alpha=({}), N={n}", ctx.alpha)
    })
}

/// `prod (1 + alpha_i / N) >= N`, exactly.
pub(crate) fn eq7_outcome(ctx: &BoundContext) -> Outcome {
    let n = ctx.n_floor;
    let mut prod = BigRational::one();
    for &a in ctx.alpha.components() {
        prod *= BigRational::new(BigInt::from(n + a as u64), BigInt::from(n));
    }
    let target = rational(n);
    let slack = super::ln_ratio_f64(&prod, &target);
    Outcome::exact(prod >= target, slack, || {
        format!("alpha=({}), N={n}", ctx.alpha)
    })
}

/// Certifies the single-term bound and the product bound for one alpha.
pub fn eq5_term_check(ctx: &BoundContext) -> LemmaReport {
    let outcomes = vec![eq5_outcome(ctx, &Precision::default()), eq7_outcome(ctx)];
    fold_outcomes(
        LemmaId::Eq5,
        format!("alpha=({}), N={}", ctx.alpha, ctx.n_floor),
        outcomes,
    )
}

/// Both lower bounds for one alpha, compared with the exact count.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub alpha: Alpha,
    pub z: RealInterval,
    pub n_floor: u64,
    pub prop_a_lower: RealInterval,
    pub hypergeom_lower: RealInterval,
    #[serde(serialize_with = "crate::serial::opt_decimal")]
    pub exact_p: Option<BigNat>,
    /// `log p(alpha) - log(explicit bound)`.
    pub slack_log: Option<f64>,
    /// `log p(alpha) - log(hypergeometric bound)`.
    pub hypergeom_slack_log: Option<f64>,
    /// All components are 1, where the hypergeometric bound is an equality
    /// and is certified by containment instead of strict separation.
    pub equality_case: bool,
    pub status: Status,
}

/// Builds a [`BoundReport`]. The exact count is taken from `counter` when
/// it fits the counter's state budget; otherwise `exact_p` is absent and
/// the status is `UNDECIDED`.
pub fn bound_report(
    alpha: &Alpha,
    counter: &PCounter,
    tail_tol: f64,
    precision: &Precision,
) -> Result<BoundReport> {
    let ctx = floor_n(alpha)?;
    let (sum, tail) = hypergeom_series(alpha, tail_tol)?;
    let exact = match counter.count(alpha) {
        Ok(v) => Some(v),
        Err(Error::BudgetExceeded { .. }) | Err(Error::InputTooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let equality_case = alpha.components().iter().all(|&a| a == 1);

    let mut prop_a = prop_a_lower_bound_with(&ctx, precision.start);
    let mut hyper = divide_by_e(&sum, &tail, precision.start);
    let mut status = Status::Undecided;
    if let Some(p) = &exact {
        let (prop_check, _) = precision.escalate(|bits| {
            prop_a = prop_a_lower_bound_with(&ctx, bits);
            check_le(&prop_a, &RealInterval::from_biguint(p, bits))
        });
        let (hyper_check, _) = precision.escalate(|bits| {
            hyper = divide_by_e(&sum, &tail, bits);
            if equality_case {
                if hyper.contains_int(p) {
                    Check::Holds
                } else {
                    Check::Violated
                }
            } else {
                check_le(&hyper, &RealInterval::from_biguint(p, bits))
            }
        });
        status = Status::from(prop_check).combine(Status::from(hyper_check));
    }
    let ln_p = exact.as_ref().map(ln_f64);
    Ok(BoundReport {
        alpha: alpha.clone(),
        z: ctx.z_alpha.clone(),
        n_floor: ctx.n_floor,
        slack_log: ln_p.map(|l| l - prop_a_log(&ctx, DEFAULT_PRECISION).mid_f64()),
        hypergeom_slack_log: ln_p.map(|l| l - hyper.mid_f64().ln()),
        prop_a_lower: prop_a,
        hypergeom_lower: hyper,
        exact_p: exact,
        equality_case,
        status,
    })
}
