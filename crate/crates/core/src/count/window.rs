//! Window sums sum_g rho(g) * sum_{|g'_i - g_i| <= w_i} rho(g') over a table.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::table::ProfileTable;
use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowMethod {
    /// Prefix-sum tensor over the table's bounding box (d <= 3).
    DensePrefix,
    /// Grouping by the first d-1 coordinates, binary search on the last.
    Sweep,
}

/// Per-axis half-widths min(w, span_i); wider windows change nothing.
fn half_widths(table: &ProfileTable, w: u64) -> Vec<i128> {
    table.codec().span().iter().map(|&m| m.min(w as i128)).collect()
}

/// Box count for window w, choosing the dense path when d <= 3 and the
/// tensor fits in the memory budget.
pub fn box_window_sum(table: &ProfileTable, w: u64, mem_budget: u128) -> Result<(u128, WindowMethod)> {
    let cells: u128 = table
        .codec()
        .span()
        .iter()
        .try_fold(1u128, |acc, &m| acc.checked_mul(m as u128 + 1))
        .unwrap_or(u128::MAX);
    if table.d <= 3 && cells.saturating_mul(16) <= mem_budget / 2 {
        Ok((dense(table, w, cells as usize), WindowMethod::DensePrefix))
    } else {
        Ok((sweep(table, w)?, WindowMethod::Sweep))
    }
}

pub(crate) fn dense(table: &ProfileTable, w: u64, cells: usize) -> u128 {
    let d = table.d;
    let dims: Vec<usize> = table.codec().span().iter().map(|&m| m as usize + 1).collect();
    let base = table.s as i128;
    let stride: Vec<usize> = (0..d).map(|i| dims[i + 1..].iter().product()).collect();
    let mut t = vec![0u128; cells];
    for i in 0..table.len() {
        let g = table.profile(i);
        let idx: usize = g.iter().zip(&stride).map(|(v, st)| (v - base) as usize * st).sum();
        t[idx] = table.count_at(i);
    }
    // inclusive prefix sums along each axis
    for ax in 0..d {
        let st = stride[ax];
        for idx in 0..cells {
            if !(idx / st).is_multiple_of(dims[ax]) {
                t[idx] = t[idx].wrapping_add(t[idx - st]);
            }
        }
    }
    let hw = half_widths(table, w);
    let total: u128 = (0..table.len())
        .into_par_iter()
        .with_min_len(1024)
        .map(|i| {
            let g = table.profile(i);
            let mut lo = vec![0i64; d];
            let mut hi = vec![0i64; d];
            for a in 0..d {
                let o = (g[a] - base) as i64;
                lo[a] = (o - hw[a] as i64).max(0) - 1;
                hi[a] = (o + hw[a] as i64).min(dims[a] as i64 - 1);
            }
            // inclusion-exclusion over the 2^d corners; wrapping is exact
            // because the true value is nonnegative and below 2^128
            let mut acc: u128 = 0;
            for mask in 0..(1u32 << d) {
                let mut idx = 0usize;
                let mut skip = false;
                for a in 0..d {
                    let c = if mask >> a & 1 == 1 { lo[a] } else { hi[a] };
                    if c < 0 {
                        skip = true;
                        break;
                    }
                    idx += c as usize * stride[a];
                }
                if skip {
                    continue;
                }
                if mask.count_ones() % 2 == 0 {
                    acc = acc.wrapping_add(t[idx]);
                } else {
                    acc = acc.wrapping_sub(t[idx]);
                }
            }
            table.count_at(i).wrapping_mul(acc)
        })
        .reduce(|| 0u128, |a, b| a.wrapping_add(b));
    total
}

pub(crate) fn sweep(table: &ProfileTable, w: u64) -> Result<u128> {
    let d = table.d;
    // groups of consecutive entries sharing g_1..g_{d-1}
    let mut groups: HashMap<Vec<i128>, (usize, usize)> = HashMap::new();
    let mut lasts: Vec<i128> = Vec::with_capacity(table.len());
    let mut cum: Vec<u128> = Vec::with_capacity(table.len() + 1);
    cum.push(0);
    let mut i = 0;
    while i < table.len() {
        let g = table.profile(i);
        let prefix = g[..d - 1].to_vec();
        let start = i;
        while i < table.len() {
            let gi = table.profile(i);
            if gi[..d - 1] != prefix[..] {
                break;
            }
            lasts.push(gi[d - 1]);
            cum.push(cum[cum.len() - 1] + table.count_at(i));
            i += 1;
        }
        groups.insert(prefix, (start, i));
    }
    let hw = half_widths(table, w);
    let parts: Vec<Result<u128>> = (0..table.len())
        .into_par_iter()
        .with_min_len(256)
        .map(|idx| {
            let g = table.profile(idx);
            let mut acc: u128 = 0;
            let mut off = vec![0i128; d - 1];
            for (a, o) in off.iter_mut().enumerate() {
                *o = -hw[a];
            }
            loop {
                let key: Vec<i128> = (0..d - 1).map(|a| g[a] + off[a]).collect();
                if let Some(&(s, e)) = groups.get(&key) {
                    let slice = &lasts[s..e];
                    let lo = slice.partition_point(|&v| v < g[d - 1] - hw[d - 1]);
                    let hi = slice.partition_point(|&v| v <= g[d - 1] + hw[d - 1]);
                    acc += cum[s + hi] - cum[s + lo];
                }
                // odometer over the first d-1 offsets
                let mut a = 0;
                while a < d - 1 {
                    off[a] += 1;
                    if off[a] <= hw[a] {
                        break;
                    }
                    off[a] = -hw[a];
                    a += 1;
                }
                if a == d - 1 {
                    break;
                }
            }
            table
                .count_at(idx)
                .checked_mul(acc)
                .ok_or_else(|| LabError::Overflow("window product".into()))
        })
        .collect();
    parts.into_iter().try_fold(0u128, |acc, r| {
        acc.checked_add(r?).ok_or_else(|| LabError::Overflow("window total".into()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_and_sweep_agree() {
        for (s, d, n) in [(1u32, 1usize, 9u64), (2, 2, 9), (2, 3, 6), (3, 2, 5)] {
            let t = ProfileTable::build(s, d, n, u128::MAX).unwrap();
            let cells: u128 = t.codec().span().iter().map(|&m| m as u128 + 1).product();
            for w in [0u64, 1, 2, 5, 13, 40, 1000] {
                assert_eq!(dense(&t, w, cells as usize), sweep(&t, w).unwrap(), "s={s} d={d} n={n} w={w}");
            }
        }
    }

    #[test]
    fn zero_window_is_j() {
        let t = ProfileTable::build(2, 2, 11, u128::MAX).unwrap();
        assert_eq!(sweep(&t, 0).unwrap(), 2 * 121 - 11);
    }
}
