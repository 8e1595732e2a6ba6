//! Exact counts of Vinogradov systems: homogeneous, inhomogeneous and
//! box-constrained, plus the H_j combinatorics.

mod hj;
mod identities;
mod table;
mod window;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub use hj::{hj_asymptotic, hj_count, hj_members, scale_k, window_of_delta, HjSpec};
pub use identities::{verify_cauchy_bound, verify_partition, CauchyReport, PartitionReport};
pub use table::{binomial, multiset_count, power_sum_profile, KeyCodec, ProfileTable};
pub use window::{box_window_sum, WindowMethod};

/// Default memory cap for profile tables.
pub const DEFAULT_MEM_BUDGET: u128 = 1 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    Direct,
    MeetInMiddle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountParams {
    pub s: u32,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<i128>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// floor(1/delta) as used by the box count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub params: CountParams,
    pub count: u128,
    pub elapsed_secs: f64,
    pub method: CountMethod,
}

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    pub mem_budget: u128,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            mem_budget: DEFAULT_MEM_BUDGET,
        }
    }
}

fn check_sdn(s: u32, d: usize, n: u64) -> Result<()> {
    if s == 0 || d == 0 || n == 0 {
        return domain(format!("need s, d, N >= 1 (got s={s} d={d} N={n})"));
    }
    Ok(())
}

fn params(s: u32, d: usize, n: u64) -> CountParams {
    CountParams {
        s,
        d,
        n,
        h: None,
        delta: None,
        window: None,
    }
}

/// J_{s,d}(N) = sum_g rho_s(g)^2.
pub fn count_j(s: u32, d: usize, n: u64, opts: &CountOptions) -> Result<CountResult> {
    check_sdn(s, d, n)?;
    let t0 = Instant::now();
    let table = ProfileTable::build(s, d, n, opts.mem_budget)?;
    let count = table.self_correlation()?;
    Ok(CountResult {
        params: params(s, d, n),
        count,
        elapsed_secs: t0.elapsed().as_secs_f64(),
        method: CountMethod::MeetInMiddle,
    })
}

/// True when some |h_i| exceeds 2sN^i, which forces a zero count.
pub fn h_out_of_reach(s: u32, n: u64, h: &[i128]) -> bool {
    let mut pw: i128 = 1;
    for &hi in h {
        pw = pw.saturating_mul(n as i128);
        if hi.unsigned_abs() > (pw.saturating_mul(2 * s as i128)) as u128 {
            return true;
        }
    }
    false
}

/// J_{s,d}(h; N) = sum_g rho_s(g) rho_s(g + h).
pub fn count_j_inhom(s: u32, d: usize, h: &[i128], n: u64, opts: &CountOptions) -> Result<CountResult> {
    check_sdn(s, d, n)?;
    if h.len() != d {
        return domain(format!("h has {} entries, expected d={d}", h.len()));
    }
    let t0 = Instant::now();
    let mut p = params(s, d, n);
    p.h = Some(h.to_vec());
    if h_out_of_reach(s, n, h) {
        return Ok(CountResult {
            params: p,
            count: 0,
            elapsed_secs: t0.elapsed().as_secs_f64(),
            method: CountMethod::MeetInMiddle,
        });
    }
    let table = ProfileTable::build(s, d, n, opts.mem_budget)?;
    let count = table.correlation(h)?;
    Ok(CountResult {
        params: p,
        count,
        elapsed_secs: t0.elapsed().as_secs_f64(),
        method: CountMethod::MeetInMiddle,
    })
}

/// The box count: 2s-tuples whose signed power sums all lie in
/// [-1/delta, 1/delta].
pub fn count_j_box(s: u32, d: usize, delta: f64, n: u64, opts: &CountOptions) -> Result<CountResult> {
    check_sdn(s, d, n)?;
    let w = window_of_delta(delta)?;
    let t0 = Instant::now();
    let table = ProfileTable::build(s, d, n, opts.mem_budget)?;
    let (count, _) = box_window_sum(&table, w, opts.mem_budget)?;
    let mut p = params(s, d, n);
    p.delta = Some(delta);
    p.window = Some(w);
    Ok(CountResult {
        params: p,
        count,
        elapsed_secs: t0.elapsed().as_secs_f64(),
        method: CountMethod::MeetInMiddle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> CountOptions {
        CountOptions::default()
    }

    #[test]
    fn one_pair_forces_diagonal() {
        for d in 1..=4 {
            for n in [1, 5, 17] {
                assert_eq!(count_j(1, d, n, &opts()).unwrap().count, n as u128);
            }
        }
    }

    #[test]
    fn quadratic_closed_form() {
        assert_eq!(count_j(2, 2, 3, &opts()).unwrap().count, 15);
        assert_eq!(count_j(2, 2, 500, &opts()).unwrap().count, 499_500);
    }

    #[test]
    fn inhomogeneous_examples() {
        assert_eq!(count_j_inhom(1, 1, &[3], 10, &opts()).unwrap().count, 7);
        assert_eq!(count_j_inhom(1, 2, &[1, 3], 10, &opts()).unwrap().count, 1);
        assert_eq!(count_j_inhom(1, 2, &[0, 0], 10, &opts()).unwrap().count, 10);
        assert_eq!(count_j_inhom(1, 1, &[100], 10, &opts()).unwrap().count, 0);
        assert!(count_j_inhom(1, 2, &[1], 10, &opts()).is_err());
    }

    #[test]
    fn box_examples() {
        assert_eq!(count_j_box(1, 1, 1.0, 5, &opts()).unwrap().count, 13);
        // window covering everything
        let r = count_j_box(2, 2, 1.0 / 400.0, 10, &opts()).unwrap();
        assert_eq!(r.count, 10_000);
    }

    #[test]
    fn symmetry_in_h() {
        let t = ProfileTable::build(2, 2, 12, u128::MAX).unwrap();
        for h1 in -22..=22i128 {
            for h2 in (-286..=286i128).step_by(7) {
                assert_eq!(t.correlation(&[h1, h2]).unwrap(), t.correlation(&[-h1, -h2]).unwrap());
            }
        }
    }

    #[test]
    fn aggregation_over_all_h() {
        for n in [3u64, 8, 13] {
            let t = ProfileTable::build(2, 2, n, u128::MAX).unwrap();
            let m1 = 2 * (n as i128 - 1);
            let m2 = 2 * (n as i128 * n as i128 - 1);
            let mut total = 0u128;
            for h1 in -m1..=m1 {
                for h2 in -m2..=m2 {
                    total += t.correlation(&[h1, h2]).unwrap();
                }
            }
            assert_eq!(total, (n as u128).pow(4));
        }
    }

    #[test]
    fn monotone_in_n() {
        let mut prev = 0;
        for n in 1..=15 {
            let c = count_j(2, 3, n, &opts()).unwrap().count;
            assert!(c >= prev);
            prev = c;
        }
    }
}
