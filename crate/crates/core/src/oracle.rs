//! Independent brute-force references. Nothing here shares code with the
//! table-based counters or the fixed-point phase engine.

use std::time::Instant;

use num_complex::Complex64;

use crate::count::{CountMethod, CountParams, CountResult};
use crate::error::{domain, Result};

/// Signed power sums sum_j (-1)^j n_j^i over a full 2s-tuple.
fn signed_profile(t: &[u64], d: usize) -> Vec<i128> {
    (1..=d as u32)
        .map(|i| {
            t.iter()
                .enumerate()
                .map(|(j, &n)| {
                    let v = (n as i128).pow(i);
                    if j % 2 == 1 {
                        v
                    } else {
                        -v
                    }
                })
                .sum()
        })
        .collect()
}

/// Calls f on every tuple in [1,N]^len.
fn for_each_tuple(len: usize, n: u64, mut f: impl FnMut(&[u64])) {
    let mut t = vec![1u64; len];
    loop {
        f(&t);
        let mut i = 0;
        while i < len {
            if t[i] < n {
                t[i] += 1;
                break;
            }
            t[i] = 1;
            i += 1;
        }
        if i == len {
            return;
        }
    }
}

fn guard(s: u32, n: u64) -> Result<()> {
    let total = (n as f64).powi(2 * s as i32);
    if total > 2e8 {
        return domain(format!("direct enumeration of N^2s = {total:.3e} tuples refused"));
    }
    Ok(())
}

/// 2s-fold enumeration of J_{s,d}(h;N); h = 0 gives J_{s,d}(N).
pub fn count_direct(s: u32, d: usize, h: &[i128], n: u64) -> Result<CountResult> {
    guard(s, n)?;
    let t0 = Instant::now();
    let mut c: u128 = 0;
    for_each_tuple(2 * s as usize, n, |t| {
        if signed_profile(t, d) == h {
            c += 1;
        }
    });
    Ok(CountResult {
        params: CountParams {
            s,
            d,
            n,
            h: if h.iter().all(|&x| x == 0) { None } else { Some(h.to_vec()) },
            delta: None,
            window: None,
        },
        count: c,
        elapsed_secs: t0.elapsed().as_secs_f64(),
        method: CountMethod::Direct,
    })
}

/// 2s-fold enumeration of the box count with window w.
pub fn box_count_direct(s: u32, d: usize, w: u64, n: u64) -> Result<u128> {
    guard(s, n)?;
    let mut c: u128 = 0;
    for_each_tuple(2 * s as usize, n, |t| {
        if signed_profile(t, d).iter().all(|v| v.unsigned_abs() <= w as u128) {
            c += 1;
        }
    });
    Ok(c)
}

/// J_{s,1}(N) as sum_h r_s(h)^2, with r_s built by repeated convolution.
pub fn count_linear_convolution(s: u32, n: u64) -> u128 {
    let mut r: Vec<u128> = vec![1];
    for _ in 0..s {
        let mut next = vec![0u128; r.len() + n as usize];
        for (i, &c) in r.iter().enumerate() {
            for k in 1..=n as usize {
                next[i + k] += c;
            }
        }
        r = next;
    }
    r.iter().map(|c| c * c).sum()
}

/// Weyl sum with naive float phases, only trustworthy for small N.
pub fn weyl_naive(x: &[f64], a: Option<&[Complex64]>, n: u64) -> Complex64 {
    (1..=n)
        .map(|k| {
            let kf = k as f64;
            let ph: f64 = x.iter().enumerate().map(|(j, c)| c * kf.powi(j as i32 + 1)).sum();
            let w = a.map_or(Complex64::new(1.0, 0.0), |a| a[k as usize - 1]);
            w * Complex64::from_polar(1.0, std::f64::consts::TAU * ph.fract())
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::{count_j, count_j_box, count_j_inhom, CountOptions};

    #[test]
    fn direct_matches_tables() {
        let o = CountOptions::default();
        for (s, d, n) in [(1u32, 2usize, 9u64), (2, 2, 10), (2, 3, 7), (3, 2, 5), (2, 1, 12)] {
            let a = count_direct(s, d, &vec![0; d], n).unwrap().count;
            assert_eq!(a, count_j(s, d, n, &o).unwrap().count, "s={s} d={d} n={n}");
        }
        let a = count_direct(2, 2, &[1, 1], 20).unwrap().count;
        assert_eq!(a, count_j_inhom(2, 2, &[1, 1], 20, &o).unwrap().count);
        let a = box_count_direct(2, 2, 10, 10).unwrap();
        assert_eq!(a, count_j_box(2, 2, 0.1, 10, &o).unwrap().count);
    }

    #[test]
    fn closed_form_up_to_30() {
        for n in 1..=30u64 {
            let c = count_direct(2, 2, &[0, 0], n).unwrap().count;
            assert_eq!(c, 2 * (n as u128).pow(2) - n as u128);
        }
    }

    #[test]
    fn convolution_oracle() {
        let o = CountOptions::default();
        assert_eq!(count_linear_convolution(3, 6), count_j(3, 1, 6, &o).unwrap().count);
        assert_eq!(count_linear_convolution(1, 9), 9);
    }

    #[test]
    fn refuses_huge() {
        assert!(count_direct(4, 2, &[0, 0], 100).is_err());
    }
}
