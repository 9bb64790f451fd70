//! The set of values `f(n) <= x`, obtained through exponent signatures.
//!
//! Every value of `f` is `p(alpha)` for a canonical tuple `alpha`, and `p`
//! strictly increases when the last component is incremented or a copy of
//! it is appended. Those two moves generate every canonical tuple from
//! `(1)` with a unique parent, so a depth-first search that stops at
//! `p(alpha) > x` visits each feasible tuple exactly once.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::vpart::{Alpha, PCounter};
use crate::BigNat;

/// `2 pi sqrt(2/3)`.
pub const THEOREM_CONSTANT: f64 = 5.130_199_320_647_456;

/// Default cap on tuples visited by one search.
pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

/// Default cap on the size of the set `S` in [`conjecture_s`].
pub const DEFAULT_S_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeasibleEntry {
    pub alpha: Alpha,
    #[serde(serialize_with = "crate::serial::decimal")]
    pub p: BigNat,
}

/// Canonical tuples with `p(alpha) <= x`, sorted by `Alpha` order.
#[derive(Clone, Debug, Serialize)]
pub struct FeasibleSet {
    #[serde(serialize_with = "crate::serial::decimal")]
    pub x: BigNat,
    pub entries: Vec<FeasibleEntry>,
    /// `false` when the node budget ran out before the search finished.
    pub complete: bool,
}

impl FeasibleSet {
    pub fn alphas(&self) -> impl Iterator<Item = &Alpha> {
        self.entries.iter().map(|e| &e.alpha)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

struct Search<'a> {
    x: &'a BigNat,
    counter: &'a PCounter,
    visited: AtomicUsize,
    budget: usize,
}

impl Search<'_> {
    fn dfs(&self, alpha: Alpha, p: BigNat) -> Result<(Vec<FeasibleEntry>, bool)> {
        if self.visited.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Ok((vec![FeasibleEntry { alpha, p }], false));
        }
        let child = |a: Alpha| -> Result<(Vec<FeasibleEntry>, bool)> {
            let q = self.counter.count(&a)?;
            if &q > self.x {
                Ok((Vec::new(), true))
            } else {
                self.dfs(a, q)
            }
        };
        let (bumped, repeated) =
            rayon::join(|| child(alpha.bump_last()), || child(alpha.repeat_last()));
        let (mut left, left_done) = bumped?;
        let (right, right_done) = repeated?;
        left.push(FeasibleEntry { alpha, p });
        left.extend(right);
        Ok((left, left_done && right_done))
    }
}

/// All canonical `alpha` with `p(alpha) <= x`.
///
/// Subtrees are explored in parallel and the result is sorted, so the
/// output does not depend on scheduling. When more than `node_budget`
/// tuples would be visited the partial set is returned with
/// `complete = false`.
pub fn enumerate_feasible(
    x: &BigNat,
    counter: &PCounter,
    node_budget: usize,
) -> Result<FeasibleSet> {
    if x == &BigNat::from(0u32) {
        return Err(Error::InvalidInput("x must be at least 1".into()));
    }
    let search = Search {
        x,
        counter,
        visited: AtomicUsize::new(0),
        budget: node_budget,
    };
    let root = Alpha::new(vec![1])?;
    let p = counter.count(&root)?;
    let (mut entries, complete) = search.dfs(root, p)?;
    entries.sort_by(|a, b| a.alpha.cmp(&b.alpha));
    Ok(FeasibleSet {
        x: x.clone(),
        entries,
        complete,
    })
}

/// The sorted set of distinct `p` values in a feasible set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistinctValues {
    #[serde(serialize_with = "crate::serial::decimal_vec")]
    pub values: Vec<BigNat>,
}

impl DistinctValues {
    pub fn count(&self) -> usize {
        self.values.len()
    }
}

/// Errors with `IncompleteInput` on a truncated search: a partial set
/// could silently miss values.
pub fn distinct_values(fs: &FeasibleSet) -> Result<DistinctValues> {
    if !fs.complete {
        return Err(Error::IncompleteInput);
    }
    let set: BTreeSet<&BigNat> = fs.entries.iter().map(|e| &e.p).collect();
    Ok(DistinctValues {
        values: set.into_iter().cloned().collect(),
    })
}

fn require_above_e_e(x: f64) -> Result<(f64, f64)> {
    let e_e = std::f64::consts::E.powf(std::f64::consts::E);
    if !x.is_finite() || x <= e_e {
        return Err(Error::Domain(format!("needs x > e^e ~ {e_e:.4}, got {x}")));
    }
    let l = x.ln();
    Ok((l, l.ln()))
}

/// `C sqrt(log x / log log x)`, the exponent of [`theorem_bound`].
pub fn theorem_bound_log(x: f64) -> Result<f64> {
    let (l, ll) = require_above_e_e(x)?;
    Ok(THEOREM_CONSTANT * (l / ll).sqrt())
}

/// `exp(C sqrt(log x / log log x))`: the leading factor only.
pub fn theorem_bound(x: f64) -> Result<f64> {
    theorem_bound_log(x).map(f64::exp)
}

/// `exp(9 (log x)^(2/3))`.
pub fn prior_bound(x: f64) -> Result<f64> {
    if x.is_nan() || x < 1.0 {
        return Err(Error::Domain(format!("needs x >= 1, got {x}")));
    }
    Ok((9.0 * x.ln().powf(2.0 / 3.0)).exp())
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    #[serde(serialize_with = "crate::serial::decimal")]
    pub x: BigNat,
    pub distinct_count: usize,
    pub tuple_count: usize,
    /// Absent when `x <= e^e`, outside the formula's domain.
    pub theorem_bound_value: Option<f64>,
    pub prior_bound_value: f64,
    /// `log(distinct_count) / (C sqrt(log x / log log x))`.
    pub ratio_log: Option<f64>,
    #[serde(serialize_with = "crate::serial::decimal_vec")]
    pub values: Vec<BigNat>,
}

/// Feasible set, distinct values and the comparison curves at `x`.
pub fn spectrum(x: &BigNat, counter: &PCounter, node_budget: usize) -> Result<SpectrumReport> {
    let fs = enumerate_feasible(x, counter, node_budget)?;
    if !fs.complete {
        return Err(Error::BudgetExceeded { explored: fs.len() });
    }
    let dv = distinct_values(&fs)?;
    let xf = x.to_f64().unwrap_or(f64::INFINITY);
    let theorem_log = theorem_bound_log(xf).ok();
    Ok(SpectrumReport {
        x: x.clone(),
        distinct_count: dv.count(),
        tuple_count: fs.len(),
        theorem_bound_value: theorem_log.map(f64::exp),
        prior_bound_value: prior_bound(xf)?,
        ratio_log: theorem_log.map(|t| (dv.count() as f64).ln() / t),
        values: dv.values,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureSReport {
    pub x: f64,
    #[serde(rename = "B")]
    pub b: f64,
    /// Largest allowed component, `floor(sqrt(log x))`.
    pub component_max: u32,
    /// Largest allowed sum, `floor(B log x / log log x)`.
    pub sum_max: u64,
    #[serde(rename = "S_size", serialize_with = "crate::serial::decimal")]
    pub s_size: BigNat,
    #[serde(serialize_with = "crate::serial::decimal")]
    pub distinct_p_on_s: BigNat,
}

/// Canonical tuples with components at most `a_max` and sum at most `s_max`.
fn tuples_in_s(a_max: u32, s_max: u64, limit: usize) -> Result<Vec<Alpha>> {
    fn extend(
        min: u32,
        a_max: u32,
        rest: u64,
        cur: &mut Vec<u32>,
        out: &mut Vec<Alpha>,
        limit: usize,
    ) -> Result<()> {
        for c in min..=a_max {
            if c as u64 > rest {
                break;
            }
            cur.push(c);
            if out.len() >= limit {
                return Err(Error::BudgetExceeded {
                    explored: out.len(),
                });
            }
            out.push(Alpha::new(cur.clone())?);
            extend(c, a_max, rest - c as u64, cur, out, limit)?;
            cur.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    if a_max >= 1 {
        extend(1, a_max, s_max, &mut Vec::new(), &mut out, limit)?;
    }
    out.sort();
    Ok(out)
}

/// Enumerates `S = {alpha : alpha_i <= sqrt(log x), sum <= B log x / log log x}`
/// and counts distinct values of `p` on it.
///
/// For `1 <= x < e` no positive component fits below `sqrt(log x) < 1`, so
/// `S` is empty. For `e <= x <= e^e` the sum bound is undefined or not yet
/// meaningful and the call is a domain error.
pub fn conjecture_s(
    x: f64,
    b: f64,
    counter: &PCounter,
    s_budget: usize,
) -> Result<ConjectureSReport> {
    if !b.is_finite() || b <= 0.0 {
        return Err(Error::InvalidInput(format!("B must be positive, got {b}")));
    }
    if !x.is_finite() || x < 1.0 {
        return Err(Error::Domain(format!("needs x >= 1, got {x}")));
    }
    if x < std::f64::consts::E {
        return Ok(ConjectureSReport {
            x,
            b,
            component_max: 0,
            sum_max: 0,
            s_size: BigNat::from(0u32),
            distinct_p_on_s: BigNat::from(0u32),
        });
    }
    let (l, ll) = require_above_e_e(x)?;
    let a_max = l.sqrt().floor() as u32;
    let s_max = (b * l / ll).floor() as u64;
    let tuples = tuples_in_s(a_max, s_max, s_budget)?;
    let values = {
        use rayon::prelude::*;
        tuples
            .par_iter()
            .map(|a| counter.count(a))
            .collect::<Result<Vec<_>>>()?
    };
    let distinct: BTreeSet<&BigNat> = values.iter().collect();
    Ok(ConjectureSReport {
        x,
        b,
        component_max: a_max,
        sum_max: s_max,
        s_size: BigNat::from(tuples.len()),
        distinct_p_on_s: BigNat::from(distinct.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values_at(x: u32) -> Vec<u32> {
        let fs =
            enumerate_feasible(&BigNat::from(x), &PCounter::new(), DEFAULT_NODE_BUDGET).unwrap();
        distinct_values(&fs)
            .unwrap()
            .values
            .iter()
            .map(|v| v.to_u32_digits().first().copied().unwrap_or(0))
            .collect()
    }

    #[test]
    fn small_spectra() {
        assert_eq!(values_at(1), vec![1]);
        assert_eq!(values_at(4), vec![1, 2, 3, 4]);
        assert_eq!(values_at(10), vec![1, 2, 3, 4, 5, 7, 9]);
        let fs = enumerate_feasible(&BigNat::from(1u32), &PCounter::new(), 100).unwrap();
        assert_eq!(
            fs.alphas().map(|a| a.to_string()).collect::<Vec<_>>(),
            ["1"]
        );
    }

    #[test]
    fn feasible_set_for_four() {
        let fs = enumerate_feasible(&BigNat::from(4u32), &PCounter::new(), 100).unwrap();
        let shown: Vec<String> = fs.alphas().map(|a| a.to_string()).collect();
        assert_eq!(shown, ["1", "2", "3", "1,1", "1,2"]);
    }

    #[test]
    fn spectrum_counts() {
        let counter = PCounter::new();
        let r = spectrum(&BigNat::from(10u32), &counter, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!((r.distinct_count, r.tuple_count), (7, 10));
        assert!(r.theorem_bound_value.is_none());
        let r = spectrum(&BigNat::from(1000u32), &counter, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!((r.distinct_count, r.tuple_count), (107, 121));
        assert!(r.theorem_bound_value.unwrap() < r.prior_bound_value);
    }

    #[test]
    fn budget_marks_incomplete() {
        let fs = enumerate_feasible(&BigNat::from(1000u32), &PCounter::new(), 5).unwrap();
        assert!(!fs.complete);
        assert!(matches!(distinct_values(&fs), Err(Error::IncompleteInput)));
        assert!(matches!(
            spectrum(&BigNat::from(1000u32), &PCounter::new(), 5),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn curves() {
        assert!(
            (THEOREM_CONSTANT - 2.0 * std::f64::consts::PI * (2.0f64 / 3.0).sqrt()).abs() < 1e-14
        );
        let x = std::f64::consts::E.powf(std::f64::consts::E.powi(2));
        let want = (THEOREM_CONSTANT * std::f64::consts::E / 2f64.sqrt()).exp();
        assert!((theorem_bound(x).unwrap() / want - 1.0).abs() < 1e-9);
        assert_eq!(prior_bound(1.0).unwrap(), 1.0);
        assert!((prior_bound(std::f64::consts::E).unwrap() - 9f64.exp()).abs() < 1e-6);
        assert!(theorem_bound(10.0).is_err());
        assert!(prior_bound(0.5).is_err());
    }

    #[test]
    fn conjecture_set() {
        let counter = PCounter::new();
        let r = conjecture_s(2.0, 1.0, &counter, DEFAULT_S_BUDGET).unwrap();
        assert_eq!(r.s_size, BigNat::from(0u32));
        let r = conjecture_s(1e4, 1.0, &counter, DEFAULT_S_BUDGET).unwrap();
        assert!(r.distinct_p_on_s <= r.s_size);
        assert_eq!(r.component_max, 3);
        assert!(conjecture_s(10.0, 1.0, &counter, DEFAULT_S_BUDGET).is_err());
        assert!(conjecture_s(0.5, 1.0, &counter, DEFAULT_S_BUDGET).is_err());
        assert!(conjecture_s(1e4, 0.0, &counter, DEFAULT_S_BUDGET).is_err());
        assert!(matches!(
            conjecture_s(1e6, 10.0, &counter, 3),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
