use serde::Serialize;

use super::floor_n;
use crate::error::{Error, Result};
use crate::vpart::Alpha;

/// Advisory comparison of `r` and `N` against the budgets
/// `R = (2 L / LL)(1 + 2 LLL / LL)` and `3 L`, where `L = log x`.
#[derive(Clone, Debug, Serialize)]
pub struct BudgetReport {
    pub x: f64,
    pub alpha: Alpha,
    pub r: usize,
    #[serde(rename = "R")]
    pub r_budget: f64,
    #[serde(rename = "N")]
    pub n_floor: u64,
    #[serde(rename = "N_cap")]
    pub n_cap: f64,
    pub r_within: bool,
    pub n_within: bool,
}

impl BudgetReport {
    pub fn holds(&self) -> bool {
        self.r_within && self.n_within
    }

    /// Human-readable description of each exceeded budget.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !self.r_within {
            v.push(format!("r = {} exceeds R = {:.4}", self.r, self.r_budget));
        }
        if !self.n_within {
            v.push(format!(
                "N = {} exceeds 3 log x = {:.4}",
                self.n_floor, self.n_cap
            ));
        }
        v
    }
}

/// Never fails on a violated budget: the budgets are only claimed for
/// sufficiently large `x`, so a violation is data, not an error.
pub fn budget_check(x: f64, alpha: &Alpha) -> Result<BudgetReport> {
    let e_e = std::f64::consts::E.powf(std::f64::consts::E);
    if !x.is_finite() || x <= e_e {
        return Err(Error::Domain(format!(
            "budgets need x > e^e ~ {e_e:.4}, got {x}"
        )));
    }
    let l = x.ln();
    let ll = l.ln();
    let lll = ll.ln();
    let r_budget = (2.0 * l / ll) * (1.0 + 2.0 * lll / ll);
    let n_cap = 3.0 * l;
    let ctx = floor_n(alpha)?;
    Ok(BudgetReport {
        x,
        alpha: alpha.clone(),
        r: alpha.len(),
        r_budget,
        n_floor: ctx.n_floor,
        n_cap,
        r_within: alpha.len() as f64 <= r_budget,
        n_within: ctx.n_floor as f64 <= n_cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(v: &[u32]) -> Alpha {
        Alpha::new(v.to_vec()).unwrap()
    }

    #[test]
    fn examples() {
        assert!(budget_check(1e4, &alpha(&[1])).unwrap().holds());
        assert!(budget_check(1e4, &alpha(&[1, 1, 1, 1])).unwrap().holds());
        let r = budget_check(1e2, &alpha(&[2, 2])).unwrap();
        assert_eq!(r.n_floor, 2);
        assert!((r.r_budget - 9.37).abs() < 0.05, "{}", r.r_budget);
    }

    #[test]
    fn violations_are_reported_not_raised() {
        let r = budget_check(16.0, &alpha(&[1; 9])).unwrap();
        assert!(!r.r_within);
        assert_eq!(r.violations().len(), 1);
    }

    #[test]
    fn domain() {
        assert!(matches!(
            budget_check(15.0, &alpha(&[1])),
            Err(Error::Domain(_))
        ));
        assert!(budget_check(f64::NAN, &alpha(&[1])).is_err());
    }
}
