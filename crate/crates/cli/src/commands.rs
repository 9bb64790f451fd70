use std::fmt::Write as _;

use mfact::bigcomb::{bell_number, partition_number};
use mfact::bounds::{
    self, bound_report, canonical_alphas, BoundReport, Fault, LemmaReport, Precision, Status,
    SweepConfig,
};
use mfact::factorizations::Factorizer;
use mfact::fcount::{conjecture_s, spectrum, ConjectureSReport, SpectrumReport};
use mfact::vpart::PCounter;
use mfact::{Alpha, BigNat, Error, RealInterval};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{Command, FaultArg};
use crate::output::Report;

/// Desk-scale guards on command arguments.
pub const PARTITION_MAX: u64 = 100_000;
pub const BELL_MAX: u64 = 5_000;
pub const VERIFY_KN_MAX: u64 = 4_000;
pub const VERIFY_Y_MAX: u64 = 100_000;
pub const VERIFY_H_MAX: u64 = 1_000_000;
pub const VERIFY_P_MAX: u64 = 100_000;
pub const VERIFY_ALPHA_SUM_MAX: u32 = 16;

fn guard(what: &'static str, value: u64, limit: u64) -> Result<(), Error> {
    if value > limit {
        return Err(Error::InputTooLarge {
            what,
            value: value.to_string(),
            limit: limit.to_string(),
        });
    }
    Ok(())
}

fn ser_big<S: serde::Serializer>(n: &BigNat, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(n)
}

#[derive(Serialize)]
pub struct FDoc {
    pub n: u64,
    #[serde(serialize_with = "ser_big")]
    pub f: BigNat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factorizations: Option<Vec<Vec<u64>>>,
}

impl Report for FDoc {
    fn text(&self) -> String {
        let mut s = format!("f({}) = {}\n", self.n, self.f);
        for f in self.factorizations.iter().flatten() {
            let parts: Vec<String> = f.iter().map(u64::to_string).collect();
            let _ = writeln!(s, "{}", parts.join("·"));
        }
        s
    }
}

#[derive(Serialize)]
pub struct PvecDoc {
    pub alpha: Alpha,
    #[serde(serialize_with = "ser_big")]
    pub p: BigNat,
}

impl Report for PvecDoc {
    fn text(&self) -> String {
        format!("p({}) = {}\n", self.alpha, self.p)
    }
}

#[derive(Serialize)]
pub struct PartitionDoc {
    pub n: u64,
    #[serde(serialize_with = "ser_big")]
    pub p: BigNat,
}

impl Report for PartitionDoc {
    fn text(&self) -> String {
        format!("p({}) = {}\n", self.n, self.p)
    }
}

#[derive(Serialize)]
pub struct BellDoc {
    pub r: u64,
    #[serde(serialize_with = "ser_big")]
    pub bell: BigNat,
}

impl Report for BellDoc {
    fn text(&self) -> String {
        format!("B({}) = {}\n", self.r, self.bell)
    }
}

fn interval_text(i: &RealInterval) -> String {
    format!("[{}, {}]", i.lo_decimal(12), i.hi_decimal(12))
}

fn opt_f64(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.6}"))
}

#[derive(Serialize)]
#[serde(transparent)]
pub struct BoundDoc(pub BoundReport);

impl Report for BoundDoc {
    fn text(&self) -> String {
        let r = &self.0;
        let mut s = String::new();
        let _ = writeln!(s, "alpha            ({})", r.alpha);
        let _ = writeln!(s, "z(alpha)         {}", interval_text(&r.z));
        let _ = writeln!(s, "N                {}", r.n_floor);
        let _ = writeln!(s, "explicit bound   {}", interval_text(&r.prop_a_lower));
        let _ = writeln!(s, "hypergeometric   {}", interval_text(&r.hypergeom_lower));
        let exact = r.exact_p.as_ref().map_or("-".into(), ToString::to_string);
        let _ = writeln!(s, "exact p(alpha)   {exact}");
        let _ = writeln!(s, "slack (log)      {}", opt_f64(r.slack_log));
        let _ = writeln!(s, "hypergeom slack  {}", opt_f64(r.hypergeom_slack_log));
        let _ = writeln!(s, "status           {}", r.status);
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyParams {
    pub kmax: u64,
    pub nmax: u64,
    pub ymax: u64,
    pub hmax: u64,
    pub pmax: u64,
    pub alpha_sum: u32,
    pub tail_tol: f64,
    pub precision_cap: u32,
}

#[derive(Serialize)]
pub struct VerifyReportDoc {
    pub version: String,
    pub parameters: VerifyParams,
    pub lemmas: Vec<LemmaReport>,
    pub bounds: Vec<BoundReport>,
    pub status: Status,
}

impl Report for VerifyReportDoc {
    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<12} {:<10} {:>9} {:>9} {:>14}  range",
            "lemma", "status", "checked", "undecided", "worst slack"
        );
        for l in &self.lemmas {
            let _ = writeln!(
                s,
                "{:<12} {:<10} {:>9} {:>9} {:>14.6e}  {}",
                l.lemma_id.to_string(),
                l.status.to_string(),
                l.checked,
                l.undecided,
                l.worst_slack,
                l.range
            );
            if let Some(c) = &l.counterexample {
                let _ = writeln!(s, "    counterexample: {c}");
            }
        }
        let count = |st: Status| self.bounds.iter().filter(|b| b.status == st).count();
        let _ = writeln!(
            s,
            "lower bounds on {} alphas: {} PASS, {} FAIL, {} UNDECIDED",
            self.bounds.len(),
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Undecided)
        );
        for b in self.bounds.iter().filter(|b| b.status != Status::Pass) {
            let _ = writeln!(s, "    ({}) {}", b.alpha, b.status);
        }
        let _ = writeln!(s, "overall          {}", self.status);
        s
    }
}

#[derive(Serialize)]
#[serde(transparent)]
pub struct SpectrumDoc(pub SpectrumReport);

impl Report for SpectrumDoc {
    fn text(&self) -> String {
        let r = &self.0;
        let mut s = String::new();
        let _ = writeln!(s, "x                 {}", r.x);
        let _ = writeln!(s, "tuples            {}", r.tuple_count);
        let _ = writeln!(s, "distinct values   {}", r.distinct_count);
        let _ = writeln!(s, "theorem bound     {}", opt_f64(r.theorem_bound_value));
        let _ = writeln!(s, "prior bound       {:.6e}", r.prior_bound_value);
        let _ = writeln!(s, "ratio_log         {}", opt_f64(r.ratio_log));
        let shown: Vec<String> = r.values.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "values            {}", shown.join(" "));
        s
    }
}

#[derive(Serialize)]
#[serde(transparent)]
pub struct ConjectureDoc(pub ConjectureSReport);

impl Report for ConjectureDoc {
    fn text(&self) -> String {
        let r = &self.0;
        let mut s = String::new();
        let _ = writeln!(s, "x                 {}", r.x);
        let _ = writeln!(s, "B                 {}", r.b);
        let _ = writeln!(s, "component max     {}", r.component_max);
        let _ = writeln!(s, "sum max           {}", r.sum_max);
        let _ = writeln!(s, "|S|               {}", r.s_size);
        let _ = writeln!(s, "distinct p on S   {}", r.distinct_p_on_s);
        s
    }
}

/// Shared settings for one invocation.
pub struct Context<'a> {
    pub counter: &'a PCounter,
    pub precision: Precision,
    pub tail_tol: f64,
}

pub enum Outcome {
    F(FDoc),
    Pvec(PvecDoc),
    Partition(PartitionDoc),
    Bell(BellDoc),
    Bound(Box<BoundDoc>),
    Verify(VerifyReportDoc),
    Spectrum(SpectrumDoc),
    Conjecture(ConjectureDoc),
}

impl Outcome {
    /// Verdict carried by the result, if any.
    pub fn status(&self) -> Option<Status> {
        match self {
            Outcome::Bound(b) => Some(b.0.status),
            Outcome::Verify(v) => Some(v.status),
            _ => None,
        }
    }
}

fn run_verify(
    ctx: &Context,
    params: VerifyParams,
    fault: Option<FaultArg>,
) -> Result<VerifyReportDoc, Error> {
    guard("kmax", params.kmax, VERIFY_KN_MAX)?;
    guard("nmax", params.nmax, VERIFY_KN_MAX)?;
    guard("ymax", params.ymax, VERIFY_Y_MAX)?;
    guard("hmax", params.hmax, VERIFY_H_MAX)?;
    guard("pmax", params.pmax, VERIFY_P_MAX)?;
    guard(
        "alpha-sum",
        params.alpha_sum as u64,
        VERIFY_ALPHA_SUM_MAX as u64,
    )?;
    if params.alpha_sum == 0 {
        return Err(Error::InvalidInput("alpha-sum must be at least 1".into()));
    }
    let cfg = SweepConfig {
        precision: ctx.precision,
        fault: fault.map(|f| match f {
            FaultArg::ShrinkPi => Fault::ShrinkPi,
        }),
    };
    let grid = canonical_alphas(params.alpha_sum);
    let mut lemmas = vec![bounds::verify_h_monotone(params.hmax, &cfg)?];
    lemmas.extend(bounds::verify_factorial_binomial(
        params.kmax,
        params.nmax,
        &cfg,
    )?);
    lemmas.push(bounds::verify_maxp(params.ymax, &cfg)?);
    lemmas.push(bounds::verify_p_upper(params.pmax, &cfg)?);
    lemmas.push(bounds::verify_p_lower(params.pmax, &cfg)?);
    lemmas.push(bounds::verify_sandwich(&grid)?);
    lemmas.push(bounds::verify_eq7(&grid)?);
    lemmas.push(bounds::verify_eq5(&grid, &cfg)?);
    let reports = grid
        .par_iter()
        .map(|a| bound_report(a, ctx.counter, ctx.tail_tol, &ctx.precision))
        .collect::<Result<Vec<_>, _>>()?;
    let status = lemmas
        .iter()
        .map(|l| l.status)
        .chain(reports.iter().map(|b| b.status))
        .fold(Status::Pass, Status::combine);
    Ok(VerifyReportDoc {
        version: env!("CARGO_PKG_VERSION").to_string(),
        parameters: params,
        lemmas,
        bounds: reports,
        status,
    })
}

pub fn execute(cmd: &Command, ctx: &Context) -> Result<Outcome, Error> {
    Ok(match cmd {
        Command::F { n, list } => {
            let fz = Factorizer::new();
            let f = fz.count(*n)?;
            let factorizations = if *list {
                Some(
                    fz.enumerate(*n)?
                        .into_iter()
                        .map(|f| f.factors().to_vec())
                        .collect(),
                )
            } else {
                None
            };
            Outcome::F(FDoc {
                n: *n,
                f,
                factorizations,
            })
        }
        Command::Pvec { components } => {
            let alpha = Alpha::new(components.clone())?;
            let p = ctx.counter.count(&alpha)?;
            Outcome::Pvec(PvecDoc { alpha, p })
        }
        Command::Partition { n } => {
            guard("n", *n, PARTITION_MAX)?;
            Outcome::Partition(PartitionDoc {
                n: *n,
                p: partition_number(*n as usize),
            })
        }
        Command::Bell { r } => {
            guard("r", *r, BELL_MAX)?;
            Outcome::Bell(BellDoc {
                r: *r,
                bell: bell_number(*r as usize),
            })
        }
        Command::Bound { components } => {
            let alpha = Alpha::new(components.clone())?;
            Outcome::Bound(Box::new(BoundDoc(bound_report(
                &alpha,
                ctx.counter,
                ctx.tail_tol,
                &ctx.precision,
            )?)))
        }
        Command::Verify {
            kmax,
            nmax,
            ymax,
            hmax,
            pmax,
            alpha_sum,
            inject_fault,
        } => {
            let params = VerifyParams {
                kmax: *kmax,
                nmax: *nmax,
                ymax: *ymax,
                hmax: *hmax,
                pmax: *pmax,
                alpha_sum: *alpha_sum,
                tail_tol: ctx.tail_tol,
                precision_cap: ctx.precision.cap,
            };
            Outcome::Verify(run_verify(ctx, params, *inject_fault)?)
        }
        Command::Spectrum { x, max_nodes } => {
            let x: BigNat = x.parse().map_err(|_| {
                Error::InvalidInput(format!("x must be a positive integer, got {x:?}"))
            })?;
            Outcome::Spectrum(SpectrumDoc(spectrum(&x, ctx.counter, *max_nodes)?))
        }
        Command::Conjecture { x, b, max_tuples } => Outcome::Conjecture(ConjectureDoc(
            conjecture_s(*x, *b, ctx.counter, *max_tuples)?,
        )),
    })
}
