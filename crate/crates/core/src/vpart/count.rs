use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;

use super::Alpha;
use crate::error::{Error, Result};
use crate::BigNat;

/// Default cap on the multiply-adds spent on a single count.
pub const DEFAULT_STATE_BUDGET: usize = 50_000_000;

/// Memoizing counter for `p(alpha)`.
///
/// Finished values are kept per canonical `Alpha`, so every permutation of
/// a tuple shares one entry. The map is safe to share between threads.
#[derive(Debug)]
pub struct PCounter {
    memo: RwLock<HashMap<Alpha, BigNat>>,
    state_budget: usize,
}

impl Default for PCounter {
    fn default() -> Self {
        Self::new()
    }
}

impl PCounter {
    pub fn new() -> Self {
        Self::with_state_budget(DEFAULT_STATE_BUDGET)
    }

    pub fn with_state_budget(state_budget: usize) -> Self {
        PCounter {
            memo: RwLock::new(HashMap::new()),
            state_budget,
        }
    }

    pub fn count(&self, alpha: &Alpha) -> Result<BigNat> {
        if let Some(v) = self.memo.read().get(alpha) {
            return Ok(v.clone());
        }
        let v = count_vpartitions_raw(alpha.components(), self.state_budget)?;
        self.memo
            .write()
            .entry(alpha.clone())
            .or_insert_with(|| v.clone());
        Ok(v)
    }

    pub fn get(&self, alpha: &Alpha) -> Option<BigNat> {
        self.memo.read().get(alpha).cloned()
    }

    /// Seeds the memo (e.g. from a cache file) without recomputing.
    pub fn insert(&self, alpha: Alpha, value: BigNat) {
        self.memo.write().insert(alpha, value);
    }

    pub fn len(&self) -> usize {
        self.memo.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn snapshot(&self) -> BTreeMap<Alpha, BigNat> {
        self.memo
            .read()
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

static GLOBAL: Lazy<PCounter> = Lazy::new(PCounter::new);

/// `p(alpha)` through a process-wide memo.
pub fn count_vpartitions(alpha: &Alpha) -> BigNat {
    GLOBAL
        .count(alpha)
        .expect("default state budget exhausted; use PCounter::with_state_budget")
}

/// `p(v)` for an arbitrary component vector: any order, zeros allowed.
///
/// Fills a table of `p(gamma)` for every `gamma <= v` from the logarithmic
/// derivative of the generating function along one coordinate `j`:
///
/// `gamma_j p(gamma) = sum_{0 < beta <= gamma} (beta_j / g) sigma(g) p(gamma - beta)`
///
/// with `g = gcd(beta)`. `j` is the first nonzero coordinate of `gamma`.
/// The work is one multiply-add per pair `beta <= gamma`, i.e.
/// `prod (v_i + 1)(v_i + 2) / 2`; `state_budget` caps that number.
pub fn count_vpartitions_raw(components: &[u32], state_budget: usize) -> Result<BigNat> {
    let dims: Vec<u32> = components.iter().copied().filter(|&c| c > 0).collect();
    if dims.is_empty() {
        return Ok(BigNat::one());
    }
    let size = dims
        .iter()
        .try_fold(1u64, |acc, &a| acc.checked_mul(a as u64 + 1))
        .filter(|&s| s <= u32::MAX as u64)
        .ok_or_else(|| Error::too_large("box size of", format!("{dims:?}"), u32::MAX))?;
    let work = dims.iter().try_fold(1u64, |acc, &a| {
        acc.checked_mul((a as u64 + 1) * (a as u64 + 2) / 2)
    });
    match work {
        Some(w) if w <= state_budget as u64 => {}
        _ => {
            return Err(Error::BudgetExceeded {
                explored: work.map_or(usize::MAX, |w| w.min(usize::MAX as u64) as usize),
            })
        }
    }
    let size = size as usize;
    let r = dims.len();
    let mut strides = vec![1usize; r];
    for i in (0..r - 1).rev() {
        strides[i] = strides[i + 1] * (dims[i + 1] as usize + 1);
    }

    let max_dim = *dims.iter().max().unwrap() as u64;
    let sigma: Vec<u64> = (0..=max_dim)
        .map(|m| {
            if m == 0 {
                0
            } else {
                (1..=m).filter(|d| m % d == 0).sum()
            }
        })
        .collect();
    // gcd of every vector in the box, by index.
    let mut gcds = vec![0u64; size];
    let mut v = vec![0u32; r];
    for g in gcds.iter_mut().skip(1) {
        advance(&mut v, &dims);
        *g = v.iter().fold(0u64, |acc, &c| acc.gcd(&(c as u64)));
    }

    let mut table: Vec<BigNat> = Vec::with_capacity(size);
    table.push(BigNat::one());
    let mut gamma = vec![0u32; r];
    let mut beta = vec![0u32; r];
    for gamma_idx in 1..size {
        advance(&mut gamma, &dims);
        let j = gamma.iter().position(|&c| c > 0).unwrap();
        let mut acc = BigNat::zero();
        beta.iter_mut().for_each(|b| *b = 0);
        let mut beta_idx = 0usize;
        while advance_within(&mut beta, &gamma, &strides, &mut beta_idx) {
            let g = gcds[beta_idx];
            let w = (beta[j] as u64 / g) * sigma[g as usize];
            if w != 0 {
                acc += &table[gamma_idx - beta_idx] * w;
            }
        }
        table.push(acc / gamma[j]);
    }
    Ok(table.pop().unwrap())
}

/// Next vector of the box `0 <= v <= dims` in index order.
fn advance(v: &mut [u32], dims: &[u32]) {
    for i in (0..v.len()).rev() {
        if v[i] < dims[i] {
            v[i] += 1;
            return;
        }
        v[i] = 0;
    }
}

/// Next `beta <= gamma` in index order, tracking its box index. Returns
/// `false` after the last one.
fn advance_within(beta: &mut [u32], gamma: &[u32], strides: &[usize], idx: &mut usize) -> bool {
    for i in (0..beta.len()).rev() {
        if beta[i] < gamma[i] {
            beta[i] += 1;
            *idx += strides[i];
            return true;
        }
        *idx -= beta[i] as usize * strides[i];
        beta[i] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigcomb::{bell_number, partition_number};

    fn p(v: &[u32]) -> BigNat {
        count_vpartitions(&Alpha::new(v.to_vec()).unwrap())
    }

    #[test]
    fn examples() {
        assert_eq!(p(&[1, 2]), BigNat::from(4u32));
        assert_eq!(p(&[5]), BigNat::from(7u32));
        assert_eq!(p(&[1, 1, 1]), BigNat::from(5u32));
        assert_eq!(p(&[2, 2]), BigNat::from(9u32));
    }

    #[test]
    fn one_dimensional_and_squarefree_cases() {
        for n in 1..=20u32 {
            assert_eq!(p(&[n]), partition_number(n as usize));
        }
        for r in 1..=8usize {
            assert_eq!(p(&vec![1; r]), bell_number(r));
        }
    }

    #[test]
    fn raw_counter_ignores_order_and_zeros() {
        let base = count_vpartitions_raw(&[1, 2, 3], DEFAULT_STATE_BUDGET).unwrap();
        for v in [[3, 2, 1], [2, 1, 3], [3, 1, 2]] {
            assert_eq!(
                count_vpartitions_raw(&v, DEFAULT_STATE_BUDGET).unwrap(),
                base
            );
        }
        assert_eq!(
            count_vpartitions_raw(&[0, 1, 0, 2, 3, 0], DEFAULT_STATE_BUDGET).unwrap(),
            base
        );
        assert_eq!(count_vpartitions_raw(&[0, 0], 10).unwrap(), BigNat::one());
    }

    #[test]
    fn budget_is_enforced_and_memo_survives() {
        let counter = PCounter::with_state_budget(5);
        counter.count(&Alpha::new(vec![1]).unwrap()).unwrap();
        let err = counter
            .count(&Alpha::new(vec![3, 3, 3]).unwrap())
            .unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert_eq!(counter.len(), 1);
        assert_eq!(
            counter.get(&Alpha::new(vec![1]).unwrap()),
            Some(BigNat::one())
        );
    }
}
