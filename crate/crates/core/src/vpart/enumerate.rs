use super::{Alpha, VPartition, VectorPart};
use crate::error::{Error, Result};

/// Largest `sum(alpha)` the enumerator accepts.
pub const ORACLE_MAX_TOTAL: u64 = 14;

/// Every partition of `alpha`, parts in non-increasing lexicographic order.
pub fn enumerate_vpartitions(alpha: &Alpha) -> Result<Vec<VPartition>> {
    let mut out = Vec::new();
    for_each_vpartition(alpha, |parts| {
        out.push(VPartition {
            parts: parts.iter().map(|p| VectorPart(p.clone())).collect(),
        })
    })?;
    Ok(out)
}

/// Streams every partition of `alpha` to `visit` without materializing the
/// list. Parts are generated in non-increasing lexicographic order, so each
/// multiset is produced exactly once.
pub fn for_each_vpartition(alpha: &Alpha, mut visit: impl FnMut(&[Vec<u32>])) -> Result<()> {
    if alpha.total() > ORACLE_MAX_TOTAL {
        return Err(Error::too_large(
            "sum of components of",
            alpha,
            ORACLE_MAX_TOTAL,
        ));
    }
    let mut rest = alpha.components().to_vec();
    let bound = rest.clone();
    let mut parts = Vec::new();
    descend(&mut rest, &bound, &mut parts, &mut visit);
    Ok(())
}

fn descend(
    rest: &mut Vec<u32>,
    bound: &[u32],
    parts: &mut Vec<Vec<u32>>,
    visit: &mut impl FnMut(&[Vec<u32>]),
) {
    let Some(lead) = rest.iter().position(|&c| c > 0) else {
        visit(parts);
        return;
    };
    // The next part must be <= rest component-wise and <=_lex bound. It must
    // also use the leading nonzero coordinate of `rest`: later parts are
    // lexicographically smaller and could never cover it.
    let mut beta = largest_below(rest, bound);
    while beta[lead] > 0 {
        for (r, b) in rest.iter_mut().zip(&beta) {
            *r -= b;
        }
        parts.push(beta.clone());
        descend(rest, &beta, parts, visit);
        parts.pop();
        for (r, b) in rest.iter_mut().zip(&beta) {
            *r += b;
        }
        if !step_down(&mut beta, rest) {
            break;
        }
    }
}

/// The lexicographically largest vector `<= rest` component-wise that is
/// also `<=_lex bound`.
fn largest_below(rest: &[u32], bound: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(rest.len());
    for i in 0..rest.len() {
        if bound[i] <= rest[i] {
            out.push(bound[i]);
        } else {
            out.push(rest[i]);
            out.extend_from_slice(&rest[i + 1..]);
            break;
        }
    }
    out
}

/// Previous vector in lexicographic order inside the box `[0, rest]`.
/// Returns `false` when `v` was already zero.
fn step_down(v: &mut [u32], rest: &[u32]) -> bool {
    for i in (0..v.len()).rev() {
        if v[i] > 0 {
            v[i] -= 1;
            v[i + 1..].copy_from_slice(&rest[i + 1..]);
            return true;
        }
    }
    false
}
