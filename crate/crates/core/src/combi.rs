//! Higher-order indicator features: AND-combinations of one-hot columns from
//! distinct features, filtered by minimum support.
//!
//! Enumeration is level-wise in the Apriori style. A k-set is only built when
//! every (k-1)-subset met the support threshold, which is sound because the
//! support of an AND never exceeds the support of any member.

use std::collections::HashSet;

use crate::error::{HnetError, Result};
use crate::ingest::{CategoryColumn, OneHotMatrix};

pub const DEFAULT_MAX_CANDIDATES: usize = 1_000_000;

/// Appends every combination of order 2..=`k_max` with at least `y_min`
/// positives to the columns of `m`. With `k_max == 1` the input is returned
/// unchanged.
pub fn expand_combinations(
    m: &OneHotMatrix,
    k_max: usize,
    y_min: usize,
    max_candidates: usize,
) -> Result<OneHotMatrix> {
    if k_max == 0 {
        return Err(HnetError::InvalidConfig("k_max must be at least 1".into()));
    }
    if m.is_empty() {
        return Err(HnetError::NoUsableColumns { y_min });
    }
    let mut out = m.clone();
    if k_max == 1 {
        return Ok(out);
    }

    let base = &m.columns;
    let mut level: Vec<(Vec<usize>, CategoryColumn)> = base
        .iter()
        .enumerate()
        .filter(|(_, c)| c.order() == 1 && c.positives >= y_min)
        .map(|(i, c)| (vec![i], c.clone()))
        .collect();
    let mut candidates = 0usize;

    for _k in 2..=k_max {
        let survivors: HashSet<Vec<usize>> = level.iter().map(|(s, _)| s.clone()).collect();
        let mut next = Vec::new();
        for (i, (set_a, col_a)) in level.iter().enumerate() {
            let prefix = &set_a[..set_a.len() - 1];
            for (set_b, _) in &level[i + 1..] {
                // level is sorted, so sets sharing a prefix are contiguous
                if &set_b[..set_b.len() - 1] != prefix {
                    break;
                }
                let last = *set_b.last().unwrap();
                let member = &base[last];
                if col_a.shares_feature(member) {
                    continue;
                }
                let mut set = set_a.clone();
                set.push(last);
                if !all_subsets_survive(&set, &survivors) {
                    continue;
                }
                candidates += 1;
                if candidates > max_candidates {
                    return Err(HnetError::CombinatorialBudgetExceeded(max_candidates));
                }
                let positives = col_a.bits.and_count(&member.bits);
                // zero overlap: mutually exclusive members
                if positives == 0 || positives < y_min {
                    continue;
                }
                next.push((set, col_a.combine(member)));
            }
        }
        if next.is_empty() {
            break;
        }
        out.columns.extend(next.iter().map(|(_, c)| c.clone()));
        level = next;
    }
    Ok(out)
}

fn all_subsets_survive(set: &[usize], survivors: &HashSet<Vec<usize>>) -> bool {
    (0..set.len()).all(|skip| {
        let sub: Vec<usize> = set
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, &v)| v)
            .collect();
        survivors.contains(&sub)
    })
}
