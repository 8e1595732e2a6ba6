//! The exact partition of the box count and the Cauchy bound over H.

use serde::{Deserialize, Serialize};

use super::hj::{hj_members, window_of_delta, HjSpec};
use super::table::ProfileTable;
use super::window::box_window_sum;
use super::CountOptions;
use crate::error::{LabError, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionReport {
    pub s: u32,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub delta: f64,
    pub window: u64,
    /// box count by window sums
    pub lhs: u128,
    /// J_{s,d}(N)
    pub homogeneous: u128,
    /// sum over H_j of J(h), j = 1..d
    pub per_slice: Vec<u128>,
    pub rhs: u128,
}

/// Checks box count = J + sum_j sum_{h in H_j} J(h) exactly.
pub fn verify_partition(s: u32, d: usize, delta: f64, n: u64, opts: &CountOptions) -> Result<PartitionReport> {
    let w = window_of_delta(delta)?;
    let table = ProfileTable::build(s, d, n, opts.mem_budget)?;
    let (lhs, _) = box_window_sum(&table, w, opts.mem_budget)?;
    let homogeneous = table.self_correlation()?;
    let span = table.codec().span().to_vec();
    let mut per_slice = Vec::with_capacity(d);
    for j in 1..=d {
        let hs = hj_members(&HjSpec { j, s, d, n, delta })?;
        let mut acc = 0u128;
        for h in hs {
            // beyond the span of differences the count is exactly zero
            if h.iter().zip(&span).any(|(x, m)| x.abs() > *m) {
                continue;
            }
            acc += table.correlation(&h)?;
        }
        per_slice.push(acc);
    }
    let rhs = homogeneous + per_slice.iter().sum::<u128>();
    let report = PartitionReport {
        s,
        d,
        n,
        delta,
        window: w,
        lhs,
        homogeneous,
        per_slice,
        rhs,
    };
    if lhs != rhs {
        return Err(LabError::HardIdentity(format!(
            "partition fails at s={s} d={d} N={n} delta={delta}: {lhs} != {rhs}"
        )));
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CauchyReport {
    pub s: u32,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub card: u128,
    pub lhs: u128,
    pub lhs_sq: u128,
    /// J_{2s,d}(N)
    pub j_double: u128,
    /// #H * J_{2s,d}(N)
    pub rhs_sq: u128,
}

/// Checks (sum_{h in H} J(h))^2 <= #H J_{2s,d}(N) in exact integers.
pub fn verify_cauchy_bound(
    s: u32,
    d: usize,
    n: u64,
    hs: &[Vec<i128>],
    opts: &CountOptions,
) -> Result<CauchyReport> {
    let mut set: Vec<Vec<i128>> = hs.to_vec();
    set.sort();
    set.dedup();
    if set.iter().any(|h| h.len() != d) {
        return Err(LabError::Domain(format!("every h needs {d} entries")));
    }
    let table = ProfileTable::build(s, d, n, opts.mem_budget)?;
    let span = table.codec().span().to_vec();
    let mut lhs = 0u128;
    for h in &set {
        if h.iter().zip(&span).any(|(x, m)| x.abs() > *m) {
            continue;
        }
        lhs += table.correlation(h)?;
    }
    let double = ProfileTable::build(2 * s, d, n, opts.mem_budget)?.self_correlation()?;
    let ovf = || LabError::Overflow("Cauchy sides".into());
    let lhs_sq = lhs.checked_mul(lhs).ok_or_else(ovf)?;
    let card = set.len() as u128;
    let rhs_sq = card.checked_mul(double).ok_or_else(ovf)?;
    let report = CauchyReport {
        s,
        d,
        n,
        card,
        lhs,
        lhs_sq,
        j_double: double,
        rhs_sq,
    };
    if lhs_sq > rhs_sq {
        return Err(LabError::HardIdentity(format!(
            "Cauchy bound fails: {lhs_sq} > {rhs_sq}"
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_small_cases() {
        let o = CountOptions::default();
        let r = verify_partition(2, 2, 0.2, 8, &o).unwrap();
        assert_eq!(r.lhs, r.rhs);
        let r = verify_partition(1, 1, 0.5, 4, &o).unwrap();
        // pairs in [1,4]^2 with |n2 - n1| <= 2
        assert_eq!(r.lhs, 14);
        let r = verify_partition(2, 2, 1.0 / 1000.0, 5, &o).unwrap();
        assert_eq!(r.lhs, 625);
    }

    #[test]
    fn cauchy_examples() {
        let o = CountOptions::default();
        let r = verify_cauchy_bound(1, 1, 6, &[vec![1], vec![2]], &o).unwrap();
        assert_eq!(r.lhs, 9);
        assert_eq!(r.card, 2);
        let r = verify_cauchy_bound(2, 2, 7, &[vec![0, 0]], &o).unwrap();
        assert_eq!(r.lhs, 2 * 49 - 7);
    }
}
