use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use super::hypergeom::{eq5_outcome, eq7_outcome};
use super::{
    check_le, check_lt, compare_exp_sqrt, floor_n, fold_outcomes, g_rational, ln_ratio_f64,
    rational, sweep, Check, LemmaId, LemmaReport, Outcome, Precision,
};
use crate::bigcomb::{factorial, ln_f64, partition_numbers_upto};
use crate::error::{Error, Result};
use crate::interval::RealInterval;
use crate::vpart::Alpha;
use crate::BigNat;

/// Deliberate defects for exercising the failure paths of the sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Uses `pi / 2` in place of `pi` in the partition-function bounds.
    ShrinkPi,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SweepConfig {
    pub precision: Precision,
    pub fault: Option<Fault>,
}

impl SweepConfig {
    fn pi(&self, bits: u32) -> RealInterval {
        let pi = RealInterval::pi(bits);
        match self.fault {
            Some(Fault::ShrinkPi) => pi.mul_pow2(-1),
            None => pi,
        }
    }
}

fn require_positive(name: &str, v: u64) -> Result<()> {
    if v == 0 {
        return Err(Error::InvalidInput(format!("{name} must be at least 1")));
    }
    Ok(())
}

/// Combines several checks made at one precision.
fn all_of(checks: &[Check]) -> Check {
    if checks.contains(&Check::Violated) {
        Check::Violated
    } else if checks.contains(&Check::Unknown) {
        Check::Unknown
    } else {
        Check::Holds
    }
}

/// `log h1(x) = (x + 1/2) log(1 + 1/x)`.
fn ln_h1(x: u64, bits: u32) -> RealInterval {
    RealInterval::ln_rational(
        &BigRational::new(BigInt::from(x + 1), BigInt::from(x)),
        bits,
    )
    .mul_int(2 * x + 1)
    .mul_pow2(-1)
}

/// `log h2(x) = log((x+1)/(x+2)) + (x + 3/2) log(1 + 1/x)`.
fn ln_h2(x: u64, bits: u32) -> RealInterval {
    let ratio = BigRational::new(BigInt::from(x + 1), BigInt::from(x + 2));
    RealInterval::ln_rational(
        &BigRational::new(BigInt::from(x + 1), BigInt::from(x)),
        bits,
    )
    .mul_int(2 * x + 3)
    .mul_pow2(-1)
    .add(&RealInterval::ln_rational(&ratio, bits))
}

/// Certifies `h(x) > h(x+1) > e` for `h1` and `h2` and every `1 <= x <= x_max`.
/// The comparison with `e` is done on logarithms: `log h > 1`.
pub fn verify_h_monotone(x_max: u64, cfg: &SweepConfig) -> Result<LemmaReport> {
    require_positive("x_max", x_max)?;
    let xs: Vec<u64> = (1..=x_max).collect();
    Ok(sweep(
        LemmaId::HMonotone,
        format!("1<=x<={x_max}"),
        &xs,
        |&x| {
            let mut slack = f64::INFINITY;
            let verdict = cfg.precision.escalate(|bits| {
                let one = RealInterval::one(bits);
                let (a1, b1) = (ln_h1(x, bits), ln_h1(x + 1, bits));
                let (a2, b2) = (ln_h2(x, bits), ln_h2(x + 1, bits));
                slack = a1
                    .sub(&b1)
                    .mid_f64()
                    .min(a2.sub(&b2).mid_f64())
                    .min(b1.sub(&one).mid_f64())
                    .min(b2.sub(&one).mid_f64());
                all_of(&[
                    check_lt(&b1, &a1),
                    check_lt(&one, &b1),
                    check_lt(&b2, &a2),
                    check_lt(&one, &b2),
                ])
            });
            Outcome::interval(verdict, slack, || format!("x={x}"))
        },
    ))
}

/// `(k+1)! <= 2 k^(k+3/2) / e^(k-1)` for `1 <= k <= k_max`, squared as
/// `(k+1)! <= e^-(k-1) sqrt(4 k^(2k+3))`.
pub fn verify_factorial_bound(k_max: u64, cfg: &SweepConfig) -> Result<LemmaReport> {
    require_positive("k_max", k_max)?;
    let ks: Vec<u64> = (1..=k_max).collect();
    Ok(sweep(
        LemmaId::FactBound,
        format!("1<=k<={k_max}"),
        &ks,
        |&k| {
            let lhs = BigRational::from_integer(BigInt::from(factorial(k + 1)));
            let q = rational(BigInt::from(4u32) * BigInt::from(k).pow(2 * k as u32 + 3));
            compare_exp_sqrt(&lhs, 1 - k as i64, &q, false, &cfg.precision, || {
                format!("k={k}")
            })
        },
    ))
}

/// `C(k+n, k) >= (k+n)^(k+n+1/2) / (2 sqrt 2 k^(k+1/2) n^(n+1/2))` over the
/// grid, checked exactly after squaring:
/// `8 C(k+n,k)^2 k^(2k+1) n^(2n+1) >= (k+n)^(2k+2n+1)`.
pub fn verify_binomial_bound(k_max: u64, n_max: u64) -> Result<LemmaReport> {
    require_positive("k_max", k_max)?;
    require_positive("n_max", n_max)?;
    let top = k_max + n_max;
    let powers: Vec<BigNat> = (0..=top)
        .into_par_iter()
        .map(|m| BigNat::from(m).pow(2 * m as u32 + 1))
        .collect();
    let rows: Vec<Vec<Outcome>> = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let mut out = Vec::with_capacity(n_max as usize);
            // C(k+n, k) built up from C(k, k) = 1.
            let mut c = BigNat::one();
            for n in 1..=n_max {
                c = c * BigNat::from(k + n) / BigNat::from(n);
                let lhs = &c * &c * 8u32 * &powers[k as usize] * &powers[n as usize];
                let rhs = &powers[(k + n) as usize];
                let slack = 0.5 * (ln_f64(&lhs) - ln_f64(rhs));
                let holds = lhs >= *rhs;
                out.push(Outcome::exact(
                    holds,
                    if holds { slack.max(0.0) } else { slack },
                    || format!("k={k}, n={n}"),
                ));
            }
            out
        })
        .collect();
    Ok(fold_outcomes(
        LemmaId::BinomBound,
        format!("1<=k<={k_max}, 1<=n<={n_max}"),
        rows.into_iter().flatten().collect(),
    ))
}

/// Both factorial and binomial bounds.
pub fn verify_factorial_binomial(
    k_max: u64,
    n_max: u64,
    cfg: &SweepConfig,
) -> Result<Vec<LemmaReport>> {
    Ok(vec![
        verify_factorial_bound(k_max, cfg)?,
        verify_binomial_bound(k_max, n_max)?,
    ])
}

/// `exp(pi sqrt(2n/3))` at the given precision.
fn hardy_ramanujan_exp(n: u64, cfg: &SweepConfig, bits: u32) -> RealInterval {
    RealInterval::from_ratio(2 * n, 3u32, bits)
        .sqrt()
        .mul(&cfg.pi(bits))
        .exp()
}

/// `sum_{n=1}^{y} p(n) <= y exp(pi sqrt(2y/3))` for every `y <= y_max`.
/// The left side counts multisets of positive integers with sum at most `y`.
pub fn verify_maxp(y_max: u64, cfg: &SweepConfig) -> Result<LemmaReport> {
    require_positive("y_max", y_max)?;
    let p = partition_numbers_upto(y_max as usize);
    let mut cumulative = Vec::with_capacity(y_max as usize);
    let mut acc = BigNat::from(0u32);
    for v in &p[1..] {
        acc += v;
        cumulative.push(acc.clone());
    }
    let ys: Vec<u64> = (1..=y_max).collect();
    Ok(sweep(LemmaId::Maxp, format!("1<=y<={y_max}"), &ys, |&y| {
        let s = &cumulative[y as usize - 1];
        let mut slack = 0.0;
        let verdict = cfg.precision.escalate(|bits| {
            let rhs = hardy_ramanujan_exp(y, cfg, bits).mul_int(y);
            slack = rhs.mid_f64().ln() - ln_f64(s);
            if !slack.is_finite() {
                slack = (y as f64).ln() + cfg.pi(bits).mid_f64() * (2.0 * y as f64 / 3.0).sqrt()
                    - ln_f64(s);
            }
            check_le(&RealInterval::from_biguint(s, bits), &rhs)
        });
        Outcome::interval(verdict, slack, || format!("y={y}, sum={s}"))
    }))
}

/// `p(n) <= exp(pi sqrt(2n/3))` for `1 <= n <= n_max`.
pub fn verify_p_upper(n_max: u64, cfg: &SweepConfig) -> Result<LemmaReport> {
    require_positive("n_max", n_max)?;
    let p = partition_numbers_upto(n_max as usize);
    let ns: Vec<u64> = (1..=n_max).collect();
    Ok(sweep(
        LemmaId::PUpper,
        format!("1<=n<={n_max}"),
        &ns,
        |&n| {
            let pn = &p[n as usize];
            let mut slack = 0.0;
            let verdict = cfg.precision.escalate(|bits| {
                let rhs_log = RealInterval::from_ratio(2 * n, 3u32, bits)
                    .sqrt()
                    .mul(&cfg.pi(bits));
                slack = rhs_log.mid_f64() - ln_f64(pn);
                check_le(
                    &RealInterval::from_biguint(pn, bits),
                    &hardy_ramanujan_exp(n, cfg, bits),
                )
            });
            Outcome::interval(verdict, slack, || format!("n={n}, p(n)={pn}"))
        },
    ))
}

/// `exp(2 sqrt n) <= 14 p(n)` for `1 <= n <= n_max`.
pub fn verify_p_lower(n_max: u64, cfg: &SweepConfig) -> Result<LemmaReport> {
    require_positive("n_max", n_max)?;
    let p = partition_numbers_upto(n_max as usize);
    let ns: Vec<u64> = (1..=n_max).collect();
    Ok(sweep(
        LemmaId::PLower,
        format!("1<=n<={n_max}"),
        &ns,
        |&n| {
            let scaled = &p[n as usize] * 14u32;
            let mut slack = 0.0;
            let verdict = cfg.precision.escalate(|bits| {
                let lhs_log = RealInterval::from_int(n, bits).sqrt().mul_int(2);
                slack = ln_f64(&scaled) - lhs_log.mid_f64();
                check_le(&lhs_log.exp(), &RealInterval::from_biguint(&scaled, bits))
            });
            Outcome::interval(verdict, slack, || format!("n={n}"))
        },
    ))
}

fn grid_range(alphas: &[Alpha]) -> String {
    match (alphas.first(), alphas.last()) {
        (Some(a), Some(b)) => format!(
            "{} alphas, max sum {}, from ({a}) to ({b})",
            alphas.len(),
            alphas.iter().map(Alpha::total).max().unwrap_or(0)
        ),
        _ => "empty".into(),
    }
}

/// `g(alpha, N) <= 1 <= g(alpha, N+1)` with `N` from [`floor_n`], exactly.
pub fn verify_sandwich(alphas: &[Alpha]) -> Result<LemmaReport> {
    let ctxs = alphas.par_iter().map(floor_n).collect::<Result<Vec<_>>>()?;
    Ok(sweep(LemmaId::Sandwich, grid_range(alphas), &ctxs, |ctx| {
        let one = BigRational::one();
        let g_n = g_rational(&ctx.alpha, &rational(ctx.n_floor));
        let g_n1 = g_rational(&ctx.alpha, &rational(ctx.n_floor + 1));
        let holds =
            g_n <= one && one <= g_n1 && ctx.n_floor >= 1 && ctx.z_alpha.lo().to_rational() > one;
        let slack = ln_ratio_f64(&one, &g_n).min(ln_ratio_f64(&g_n1, &one));
        Outcome::exact(holds, slack, || {
            format!("alpha=({}), N={}", ctx.alpha, ctx.n_floor)
        })
    }))
}

/// `prod (1 + alpha_i / N) >= N` for every alpha in the grid.
pub fn verify_eq7(alphas: &[Alpha]) -> Result<LemmaReport> {
    let ctxs = alphas.par_iter().map(floor_n).collect::<Result<Vec<_>>>()?;
    Ok(sweep(LemmaId::Eq7, grid_range(alphas), &ctxs, eq7_outcome))
}

/// The single-term bound at `k = N` for every alpha in the grid.
pub fn verify_eq5(alphas: &[Alpha], cfg: &SweepConfig) -> Result<LemmaReport> {
    let ctxs = alphas.par_iter().map(floor_n).collect::<Result<Vec<_>>>()?;
    Ok(sweep(LemmaId::Eq5, grid_range(alphas), &ctxs, |ctx| {
        eq5_outcome(ctx, &cfg.precision)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::Status;
    use crate::vpart::canonical_alphas;

    fn cfg() -> SweepConfig {
        SweepConfig::default()
    }

    #[test]
    fn h_values_at_one() {
        let h1 = ln_h1(1, 128).exp();
        assert!((h1.mid_f64() - 2f64.powf(1.5)).abs() < 1e-12);
        let h2 = ln_h2(1, 128).exp();
        assert!((h2.mid_f64() - 2.0 / 3.0 * 2f64.powf(2.5)).abs() < 1e-12);
        let r = verify_h_monotone(200, &cfg()).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
        assert_eq!(r.checked, 200);
    }

    #[test]
    fn factorial_and_binomial_small() {
        let reports = verify_factorial_binomial(40, 40, &cfg()).unwrap();
        for r in &reports {
            assert_eq!(r.status, Status::Pass, "{r:?}");
            // Both bounds are equalities at k = 1 (and n = 1).
            assert_eq!(r.worst_slack, 0.0);
        }
        assert_eq!(reports[1].checked, 1600);
    }

    #[test]
    fn partition_bounds() {
        let r = verify_maxp(200, &cfg()).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(verify_p_upper(300, &cfg()).unwrap().status, Status::Pass);
        assert_eq!(verify_p_lower(300, &cfg()).unwrap().status, Status::Pass);
    }

    #[test]
    fn shrunk_pi_is_caught() {
        let bad = SweepConfig {
            fault: Some(Fault::ShrinkPi),
            ..cfg()
        };
        let r = verify_p_upper(100, &bad).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.counterexample.is_some());
        assert!(r.worst_slack < 0.0);
    }

    #[test]
    fn grid_checks() {
        let grid = canonical_alphas(8);
        for r in [
            verify_sandwich(&grid).unwrap(),
            verify_eq7(&grid).unwrap(),
            verify_eq5(&grid, &cfg()).unwrap(),
        ] {
            assert_eq!(r.status, Status::Pass, "{r:?}");
            assert_eq!(r.checked as usize, grid.len());
        }
    }

    #[test]
    fn zero_ranges_are_rejected() {
        assert!(verify_maxp(0, &cfg()).is_err());
        assert!(verify_binomial_bound(3, 0).is_err());
    }
}
