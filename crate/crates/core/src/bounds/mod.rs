//! Lower bounds for `p(alpha)` and the inequalities they rest on.
//!
//! Every verdict here is either exact (rational arithmetic) or certified by
//! outward-rounded intervals: a claim `A <= B` passes only when
//! `hi(A) <= lo(B)`. Interval checks start at [`Precision::start`] bits and
//! double up to [`Precision::cap`]; anything still ambiguous is reported as
//! `UNDECIDED`, never as `PASS`.

mod budget;
mod hypergeom;
mod lemmas;
mod zroot;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::bigcomb::ln_f64;
use crate::interval::{RealInterval, DEFAULT_PRECISION, MAX_PRECISION};

pub use crate::vpart::canonical_alphas;
pub use budget::{budget_check, BudgetReport};
pub use hypergeom::{
    bound_report, eq5_term_check, hypergeom_lower_bound, hypergeom_lower_bound_with,
    prop_a_lower_bound, prop_a_lower_bound_with, term_t, BoundReport,
};
pub use lemmas::{
    verify_binomial_bound, verify_eq5, verify_eq7, verify_factorial_binomial,
    verify_factorial_bound, verify_h_monotone, verify_maxp, verify_p_lower, verify_p_upper,
    verify_sandwich, Fault, SweepConfig,
};
pub use zroot::{floor_n, g_rational, g_value, solve_z, BoundContext};

/// Interval precision schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub start: u32,
    pub cap: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            start: DEFAULT_PRECISION,
            cap: MAX_PRECISION,
        }
    }
}

impl Precision {
    pub fn with_cap(cap: u32) -> Self {
        Precision {
            start: DEFAULT_PRECISION.min(cap),
            cap,
        }
    }

    /// Runs `check` at doubling precisions until it is decided or the cap
    /// is reached. Returns the verdict and the precision it was reached at.
    pub fn escalate(&self, mut check: impl FnMut(u32) -> Check) -> (Check, u32) {
        let mut prec = self.start;
        loop {
            let v = check(prec);
            if v != Check::Unknown || prec >= self.cap {
                return (v, prec);
            }
            prec = (prec * 2).min(self.cap);
        }
    }
}

/// Outcome of a single comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Holds,
    Violated,
    Unknown,
}

/// Certified `a <= b`.
pub fn check_le(a: &RealInterval, b: &RealInterval) -> Check {
    if a.certainly_le(b) {
        Check::Holds
    } else if b.certainly_lt(a) {
        Check::Violated
    } else {
        Check::Unknown
    }
}

/// Certified `a < b`.
pub fn check_lt(a: &RealInterval, b: &RealInterval) -> Check {
    if a.certainly_lt(b) {
        Check::Holds
    } else if b.certainly_le(a) {
        Check::Violated
    } else {
        Check::Unknown
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Undecided,
}

impl Status {
    /// FAIL dominates UNDECIDED, which dominates PASS.
    pub fn combine(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Undecided, _) | (_, Status::Undecided) => Status::Undecided,
            _ => Status::Pass,
        }
    }
}

impl From<Check> for Status {
    fn from(c: Check) -> Self {
        match c {
            Check::Holds => Status::Pass,
            Check::Violated => Status::Fail,
            Check::Unknown => Status::Undecided,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Undecided => "UNDECIDED",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LemmaId {
    /// `h1`, `h2` strictly decrease and stay above `e`.
    HMonotone,
    /// `(k+1)! <= 2 k^(k+3/2) / e^(k-1)`.
    FactBound,
    /// `C(k+n, k) >= (k+n)^(k+n+1/2) / (2 sqrt 2 k^(k+1/2) n^(n+1/2))`.
    BinomBound,
    /// `sum_{n<=y} p(n) <= y exp(pi sqrt(2y/3))`.
    Maxp,
    /// `p(n) <= exp(pi sqrt(2n/3))`.
    PUpper,
    /// `p(n) >= exp(2 sqrt n) / 14`.
    PLower,
    /// `g(alpha, N) <= 1 <= g(alpha, N+1)`.
    Sandwich,
    /// `prod (1 + alpha_i/N) >= N`.
    Eq7,
    /// Single-term bound on `T(alpha, N)`.
    Eq5,
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LemmaId::HMonotone => "H_MONOTONE",
            LemmaId::FactBound => "FACT_BOUND",
            LemmaId::BinomBound => "BINOM_BOUND",
            LemmaId::Maxp => "MAXP",
            LemmaId::PUpper => "P_UPPER",
            LemmaId::PLower => "P_LOWER",
            LemmaId::Sandwich => "SANDWICH",
            LemmaId::Eq7 => "EQ7",
            LemmaId::Eq5 => "EQ5",
        })
    }
}

/// Result of one inequality sweep.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub lemma_id: LemmaId,
    pub range: String,
    pub status: Status,
    /// Smallest `log(rhs) - log(lhs)` seen (orientation: positive = holds).
    pub worst_slack: f64,
    pub checked: u64,
    pub undecided: u64,
    /// Highest precision any single check needed.
    pub max_precision_bits: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

/// One parameter point of a sweep.
#[derive(Clone, Debug)]
pub(crate) struct Outcome {
    pub check: Check,
    pub slack: f64,
    pub precision: u32,
    pub witness: Option<String>,
}

impl Outcome {
    pub fn exact(holds: bool, slack: f64, describe: impl FnOnce() -> String) -> Self {
        Outcome {
            check: if holds { Check::Holds } else { Check::Violated },
            slack,
            precision: 0,
            witness: (!holds).then(describe),
        }
    }

    pub fn interval(
        (check, precision): (Check, u32),
        slack: f64,
        describe: impl FnOnce() -> String,
    ) -> Self {
        Outcome {
            check,
            slack,
            precision,
            witness: (check != Check::Holds).then(describe),
        }
    }
}

/// Evaluates `f` over `params` in parallel and folds the outcomes in
/// parameter order, so the report does not depend on scheduling.
pub(crate) fn sweep<P, F>(id: LemmaId, range: String, params: &[P], f: F) -> LemmaReport
where
    P: Sync,
    F: Fn(&P) -> Outcome + Sync,
{
    let outcomes: Vec<Outcome> = params.par_iter().map(&f).collect();
    fold_outcomes(id, range, outcomes)
}

pub(crate) fn fold_outcomes(id: LemmaId, range: String, outcomes: Vec<Outcome>) -> LemmaReport {
    let mut report = LemmaReport {
        lemma_id: id,
        range,
        status: Status::Pass,
        worst_slack: f64::INFINITY,
        checked: 0,
        undecided: 0,
        max_precision_bits: 0,
        counterexample: None,
    };
    let mut first_undecided = None;
    for o in outcomes {
        report.checked += 1;
        report.max_precision_bits = report.max_precision_bits.max(o.precision);
        if o.slack < report.worst_slack {
            report.worst_slack = o.slack;
        }
        match o.check {
            Check::Holds => {}
            Check::Violated => {
                report.status = Status::Fail;
                if report.counterexample.is_none() {
                    report.counterexample = o.witness;
                }
            }
            Check::Unknown => {
                report.undecided += 1;
                if first_undecided.is_none() {
                    first_undecided = o.witness;
                }
            }
        }
    }
    if report.status != Status::Fail && report.undecided > 0 {
        report.status = Status::Undecided;
        report.counterexample = first_undecided.map(|w| format!("undecided at {w}"));
    }
    if !report.worst_slack.is_finite() {
        report.worst_slack = 0.0;
    }
    report
}

/// `log(a) - log(b)` for positive rationals, in floating point.
pub(crate) fn ln_ratio_f64(a: &BigRational, b: &BigRational) -> f64 {
    let l = |q: &BigRational| ln_f64(q.numer().magnitude()) - ln_f64(q.denom().magnitude());
    l(a) - l(b)
}

/// Compares a positive rational with `e^e_pow * sqrt(q)`.
///
/// `want_ge` selects the claim `lhs >= e^e_pow sqrt(q)` (otherwise `<=`).
/// With `e_pow == 0` the comparison squares both sides and is exact; this
/// is what makes the boundary equalities of the factorial and binomial
/// bounds decidable. Returns the outcome with slack in log units.
pub(crate) fn compare_exp_sqrt(
    lhs: &BigRational,
    e_pow: i64,
    q: &BigRational,
    want_ge: bool,
    precision: &Precision,
    describe: impl FnOnce() -> String,
) -> Outcome {
    debug_assert!(lhs.is_positive() && q.is_positive());
    let ln_gap = 0.5 * ln_ratio_f64(&(lhs * lhs), q) - e_pow as f64;
    let slack = if want_ge { ln_gap } else { -ln_gap };
    if e_pow == 0 {
        let sq = lhs * lhs;
        let holds = if want_ge { sq >= *q } else { sq <= *q };
        return Outcome::exact(holds, if holds { slack.max(0.0) } else { slack }, describe);
    }
    let verdict = precision.escalate(|p| {
        let l = RealInterval::ln_rational(lhs, p);
        let r = RealInterval::ln_rational(q, p)
            .mul_pow2(-1)
            .add(&RealInterval::from_int(e_pow, p));
        if want_ge {
            check_le(&r, &l)
        } else {
            check_le(&l, &r)
        }
    });
    Outcome::interval(verdict, slack, describe)
}

pub(crate) fn rational(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

impl Serialize for RealInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RealInterval", 3)?;
        st.serialize_field("lo", &self.lo_decimal(30))?;
        st.serialize_field("hi", &self.hi_decimal(30))?;
        st.serialize_field("precision_bits", &self.precision())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escalation_stops_at_cap() {
        let p = Precision::with_cap(512);
        let mut seen = Vec::new();
        let (v, at) = p.escalate(|bits| {
            seen.push(bits);
            Check::Unknown
        });
        assert_eq!(v, Check::Unknown);
        assert_eq!(at, 512);
        assert_eq!(seen, vec![128, 256, 512]);
        let (v, at) = p.escalate(|bits| {
            if bits >= 256 {
                Check::Holds
            } else {
                Check::Unknown
            }
        });
        assert_eq!((v, at), (Check::Holds, 256));
    }

    #[test]
    fn fold_reports_first_counterexample_in_order() {
        let outs = vec![
            Outcome::exact(true, 1.0, || "a".into()),
            Outcome::exact(false, -0.5, || "b".into()),
            Outcome::exact(false, -2.0, || "c".into()),
        ];
        let r = fold_outcomes(LemmaId::Eq7, "test".into(), outs);
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.counterexample.as_deref(), Some("b"));
        assert_eq!(r.worst_slack, -2.0);
        assert_eq!(r.checked, 3);
    }

    #[test]
    fn undecided_is_reported() {
        let outs = vec![
            Outcome::exact(true, 1.0, || "a".into()),
            Outcome::interval((Check::Unknown, 4096), 0.0, || "x = 3".into()),
        ];
        let r = fold_outcomes(LemmaId::PUpper, "test".into(), outs);
        assert_eq!(r.status, Status::Undecided);
        assert_eq!(r.undecided, 1);
        assert_eq!(r.max_precision_bits, 4096);
    }

    #[test]
    fn exp_sqrt_comparison_handles_equality_exactly() {
        // 2 >= e^0 sqrt(4) holds with equality.
        let o = compare_exp_sqrt(
            &rational(2),
            0,
            &rational(4),
            true,
            &Precision::default(),
            String::new,
        );
        assert_eq!(o.check, Check::Holds);
        assert_eq!(o.slack, 0.0);
        // 3 <= e sqrt(2) ~ 3.844
        let o = compare_exp_sqrt(
            &rational(3),
            1,
            &rational(2),
            false,
            &Precision::default(),
            String::new,
        );
        assert_eq!(o.check, Check::Holds);
        // 4 <= e sqrt(2) fails
        let o = compare_exp_sqrt(
            &rational(4),
            1,
            &rational(2),
            false,
            &Precision::default(),
            String::new,
        );
        assert_eq!(o.check, Check::Violated);
    }

    #[test]
    fn lemma_ids_render_in_screaming_case() {
        assert_eq!(LemmaId::HMonotone.to_string(), "H_MONOTONE");
        assert_eq!(LemmaId::Eq7.to_string(), "EQ7");
        assert_eq!(LemmaId::PUpper.to_string(), "P_UPPER");
    }
}
