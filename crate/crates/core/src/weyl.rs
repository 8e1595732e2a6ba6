//! Weyl sums, Gauss sums and complete sums over prime fields.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::phase::PhaseEngine;
use crate::primes::is_prime;
use crate::summation::{par_sum_c, BLOCK};
use crate::torus::{PrimePoint, TorusPoint, WeightSeq};

/// e(z) = exp(2 pi i z).
#[inline]
pub fn e(z: f64) -> Complex64 {
    let (s, c) = (TAU * z).sin_cos();
    Complex64::new(c, s)
}

fn check_weights(a: Option<&WeightSeq>, n_max: u64) -> Result<()> {
    if let Some(a) = a {
        if (a.len() as u64) < n_max {
            return domain(format!("weights have {} entries, need {n_max}", a.len()));
        }
    }
    Ok(())
}

/// Sum over n in [start, start+len) of a_n e(x . (n, ..., n^d)). Weights are
/// indexed from n = 1, so a weighted sum needs start >= 1.
pub fn weyl_sum_range(
    x: &TorusPoint,
    a: Option<&WeightSeq>,
    start: u64,
    len: u64,
) -> Result<Complex64> {
    if a.is_some() && start == 0 {
        return domain("weighted sums start at n = 1");
    }
    check_weights(a, start + len.saturating_sub(1))?;
    let eng = PhaseEngine::new(x.coords());
    eng.check_range(start + len)?;
    let weight = |n: u64| match a {
        Some(w) if !w.is_unit() => w.get(n as usize),
        _ => Complex64::new(1.0, 0.0),
    };
    let s = par_sum_c(len as usize, |i| {
        let n = start + i as u64;
        weight(n) * e(eng.phase(n))
    });
    Ok(s)
}

/// S_d(x; a, N) = sum_{n=1}^N a_n e(x_1 n + ... + x_d n^d).
pub fn weyl_sum(x: &TorusPoint, a: Option<&WeightSeq>, n: u64) -> Result<Complex64> {
    if n == 0 {
        return domain("N must be >= 1");
    }
    let s = weyl_sum_range(x, a, 1, n)?;
    debug_assert!(
        s.norm() <= a.map_or(n as f64, |w| w.truncated(n as usize).l1()) * (1.0 + 1e-12) + 1e-9
    );
    Ok(s)
}

/// Unit-weight S_d(x; N) for signed coordinates |x_j| < 1, used near the
/// origin where reducing a tiny negative x_j mod 1 would round it away.
pub fn weyl_sum_near(x: &[f64], n: u64) -> Result<Complex64> {
    if n == 0 {
        return domain("N must be >= 1");
    }
    if x.is_empty() || x.iter().any(|c| !c.is_finite() || c.abs() >= 1.0) {
        return domain("coordinates must be finite with |x_j| < 1");
    }
    let eng = PhaseEngine::new(x);
    eng.check_range(n + 1)?;
    Ok(par_sum_c(n as usize, |i| e(eng.phase(i as u64 + 1))))
}

/// Terms between exact resyncs in `weyl_sum_fast`.
const FAST_RUN: u64 = 256;

/// Unit-weight S_d(x; N) for signed |x_j| < 1 by the multiplicative
/// difference recurrence e(Delta^k P(n+1)) = e(Delta^k P(n)) e(Delta^{k+1} P(n)),
/// restarted from exact phases every 256 terms. Rounding drift stays near
/// 256 d ulp per run; used by the sampling scans where speed dominates.
pub fn weyl_sum_fast(x: &[f64], n: u64) -> Result<Complex64> {
    if n == 0 {
        return domain("N must be >= 1");
    }
    if x.is_empty() || x.iter().any(|c| !c.is_finite() || c.abs() >= 1.0) {
        return domain("coordinates must be finite with |x_j| < 1");
    }
    let eng = PhaseEngine::new(x);
    eng.check_range(n + 1)?;
    let runs = n.div_ceil(FAST_RUN) as usize;
    let block_runs = BLOCK / FAST_RUN as usize;
    let nblocks = runs.div_ceil(block_runs);
    let totals: Vec<Complex64> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let sums: Vec<Complex64> = (b * block_runs..((b + 1) * block_runs).min(runs))
                .map(|r| {
                    let lo = 1 + r as u64 * FAST_RUN;
                    let hi = (lo + FAST_RUN).min(n + 1);
                    match eng.difference_phases(lo) {
                        Some(ph) => {
                            let mut z: Vec<Complex64> = ph.iter().map(|&p| e(p)).collect();
                            let d = z.len() - 1;
                            let mut acc = Complex64::new(0.0, 0.0);
                            for _ in lo..hi {
                                acc += z[0];
                                for k in 0..d {
                                    let next = z[k + 1];
                                    z[k] *= next;
                                }
                            }
                            acc
                        }
                        None => (lo..hi).map(|k| e(eng.phase(k))).sum(),
                    }
                })
                .collect();
            crate::summation::pairwise_sum_c(&sums)
        })
        .collect();
    Ok(crate::summation::pairwise_sum_c(&totals))
}

/// Same sum via the forward-difference phase recurrence.
pub fn weyl_sum_recurrence(x: &TorusPoint, a: Option<&WeightSeq>, n: u64) -> Result<Complex64> {
    if n == 0 {
        return domain("N must be >= 1");
    }
    check_weights(a, n)?;
    let eng = PhaseEngine::new(x.coords());
    eng.check_range(n)?;
    let nblocks = (n as usize).div_ceil(BLOCK);
    let totals: Vec<Complex64> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let lo = 1 + (b * BLOCK) as u64;
            let hi = (lo + BLOCK as u64).min(n + 1);
            let mut st = eng.stepper(lo);
            let buf: Vec<Complex64> = (lo..hi)
                .map(|k| {
                    let w = match a {
                        Some(w) if !w.is_unit() => w.get(k as usize),
                        _ => Complex64::new(1.0, 0.0),
                    };
                    w * e(st.next_phase())
                })
                .collect();
            crate::summation::pairwise_sum_c(&buf)
        })
        .collect();
    Ok(crate::summation::pairwise_sum_c(&totals))
}

/// G(x1, x2; N), the d = 2 unit-weight case.
pub fn gauss_sum(x1: f64, x2: f64, n: u64) -> Result<Complex64> {
    weyl_sum(&TorusPoint::new(vec![x1, x2])?, None, n)
}

/// Table of e(r/p) for r in [0,p).
pub fn roots_of_unity(p: u64) -> Vec<Complex64> {
    (0..p)
        .map(|r| {
            let t = r as f64 / p as f64;
            e(if t >= 0.5 { t - 1.0 } else { t })
        })
        .collect()
}

/// u_1 n + ... + u_d n^d mod p, by Horner.
#[inline]
pub fn poly_mod(u: &[u64], n: u64, p: u64) -> u64 {
    let n = (n % p) as u128;
    let p128 = p as u128;
    let mut acc: u128 = 0;
    for &c in u.iter().rev() {
        acc = (acc + c as u128) * n % p128;
    }
    acc as u64
}

/// T_{d,p}(u) = sum_{n=1}^p e_p(u_1 n + ... + u_d n^d).
pub fn rational_complete_sum(pt: &PrimePoint) -> Complex64 {
    let roots = roots_of_unity(pt.p);
    complete_sum_with(&roots, &pt.u, pt.p)
}

pub fn complete_sum_with(roots: &[Complex64], u: &[u64], p: u64) -> Complex64 {
    let terms: Vec<Complex64> = (1..=p).map(|n| roots[poly_mod(u, n, p) as usize]).collect();
    crate::summation::pairwise_sum_c(&terms)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IncompleteScanReport {
    pub p: u64,
    pub d: usize,
    /// max |sum_{n<=M} e_p(...)| / (sqrt(p) log p) over u and M <= p.
    pub max_prefix_ratio: f64,
    pub argmax_u: Vec<u64>,
    pub argmax_m: u64,
    /// d = 2 only: max over all windows of |sum| / sqrt(p).
    pub max_window_ratio: Option<f64>,
    pub samples: u64,
    pub exhaustive: bool,
}

fn index_to_u(mut idx: u64, p: u64, d: usize) -> Vec<u64> {
    let mut u = vec![0; d];
    for c in u.iter_mut() {
        *c = idx % p;
        idx /= p;
    }
    u
}

/// Largest prefix modulus for one u, with the prefix length attaining it.
fn max_prefix(roots: &[Complex64], u: &[u64], p: u64) -> (f64, u64) {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut best = (0.0, 0);
    for n in 1..=p {
        acc += roots[poly_mod(u, n, p) as usize];
        let m = acc.norm();
        if m > best.0 {
            best = (m, n);
        }
    }
    best
}

/// Largest modulus over every window [m1, m2] of 1..p for one u.
pub fn max_window(roots: &[Complex64], u: &[u64], p: u64) -> f64 {
    let mut pref = vec![Complex64::new(0.0, 0.0); p as usize + 1];
    for n in 1..=p {
        pref[n as usize] = pref[n as usize - 1] + roots[poly_mod(u, n, p) as usize];
    }
    let mut best = 0.0f64;
    for i in 0..pref.len() {
        for j in i + 1..pref.len() {
            best = best.max((pref[j] - pref[i]).norm());
        }
    }
    best
}

/// Scans incomplete sums over u in Z_d (u not on the line (u_1, 0, ..., 0)).
/// Exhaustive when p^d <= max(samples, p^2) for d = 2, otherwise `samples`
/// seeded draws. For d = 2 the window maximum over all u equals the prefix
/// maximum over all u, because shifting a window by m maps (a, b) to
/// (a + 2bm, b) up to a unimodular factor.
pub fn incomplete_ratio_scan(d: usize, p: u64, samples: u64, seed: u64) -> Result<IncompleteScanReport> {
    if p < 3 || !is_prime(p) {
        return domain(format!("p={p} must be an odd prime"));
    }
    if d < 2 {
        return domain("Z_1 is empty: every u lies on the degenerate line");
    }
    let roots = roots_of_unity(p);
    let total = (p as u128).pow(d as u32);
    let exhaustive = d == 2 || total <= samples as u128;
    let candidates: Vec<Vec<u64>> = if exhaustive {
        (0..total as u64).map(|i| index_to_u(i, p, d)).filter(|u| u[1..].iter().any(|&c| c != 0)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = Vec::with_capacity(samples as usize);
        while (v.len() as u64) < samples {
            let u: Vec<u64> = (0..d).map(|_| rng.gen_range(0..p)).collect();
            if u[1..].iter().any(|&c| c != 0) {
                v.push(u);
            }
        }
        v
    };
    let best = candidates
        .par_iter()
        .enumerate()
        .map(|(i, u)| {
            let (m, at) = max_prefix(&roots, u, p);
            (m, i, at)
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX, 0),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    let sp = (p as f64).sqrt();
    Ok(IncompleteScanReport {
        p,
        d,
        max_prefix_ratio: best.0 / (sp * (p as f64).ln()),
        argmax_u: candidates[best.1].clone(),
        argmax_m: best.2,
        max_window_ratio: if d == 2 { Some(best.0 / sp) } else { None },
        samples: candidates.len() as u64,
        exhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: &[f64], n: u64) -> Complex64 {
        (1..=n)
            .map(|k| {
                let ph: f64 = x.iter().enumerate().map(|(j, c)| c * (k as f64).powi(j as i32 + 1)).sum();
                e(ph)
            })
            .sum()
    }

    #[test]
    fn trivial_examples() {
        let s = weyl_sum(&TorusPoint::zero(2), None, 7).unwrap();
        assert_eq!(s, Complex64::new(7.0, 0.0));
        let s = weyl_sum(&TorusPoint::new(vec![0.5]).unwrap(), None, 2).unwrap();
        assert!(s.norm() < 1e-15);
        assert!(weyl_sum(&TorusPoint::zero(1), None, 0).is_err());
    }

    #[test]
    fn shifted_gauss_modulus() {
        let x = TorusPoint::new(vec![0.0, 1.0 / 5.0]).unwrap();
        let s = weyl_sum_range(&x, None, 0, 5).unwrap();
        assert!((s.norm() - 5f64.sqrt()).abs() < 1e-12);
        let g = gauss_sum(0.0, 2.0 / 13.0, 13).unwrap();
        assert!((g.norm() - 13f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn agrees_with_naive_for_small_n() {
        let x = [0.1234, 0.5678, 0.9012];
        let a = weyl_sum(&TorusPoint::new(x.to_vec()).unwrap(), None, 50).unwrap();
        assert!((a - naive(&x, 50)).norm() < 1e-9);
    }

    #[test]
    fn gauss_is_weyl_specialisation() {
        let g = gauss_sum(0.3, 0.7, 1000).unwrap();
        let w = weyl_sum(&TorusPoint::new(vec![0.3, 0.7]).unwrap(), None, 1000).unwrap();
        assert_eq!(g, w);
        let g1 = gauss_sum(1.3, 0.7, 1000).unwrap();
        assert!((g - g1).norm() < 1e-9);
    }

    #[test]
    fn complete_sums() {
        let pt = PrimePoint::new(11, vec![0, 0]).unwrap();
        assert!((rational_complete_sum(&pt) - Complex64::new(11.0, 0.0)).norm() < 1e-12);
        let pt = PrimePoint::new(11, vec![3, 1]).unwrap();
        assert!((rational_complete_sum(&pt).norm() - 11f64.sqrt()).abs() < 1e-9);
        let pt = PrimePoint::new(7, vec![0, 0, 1]).unwrap();
        let direct: Complex64 = (1..=7u64).map(|n| e((n * n * n % 7) as f64 / 7.0)).sum();
        assert!((rational_complete_sum(&pt) - direct).norm() < 1e-12);
    }

    #[test]
    fn window_identity_for_quadratics() {
        let p = 31;
        let roots = roots_of_unity(p);
        let mut win = 0.0f64;
        let mut pre = 0.0f64;
        for a in 0..p {
            for b in 1..p {
                win = win.max(max_window(&roots, &[a, b], p));
                pre = pre.max(max_prefix(&roots, &[a, b], p).0);
            }
        }
        assert!((win - pre).abs() < 1e-9);
    }

    #[test]
    fn near_matches_reduced() {
        let x = [-0.0123, 0.0004, -2e-7];
        let t = TorusPoint::new(x.to_vec()).unwrap();
        let a = weyl_sum_near(&x, 300).unwrap();
        let b = weyl_sum(&t, None, 300).unwrap();
        assert!((a - b).norm() < 1e-9);
        assert!(weyl_sum_near(&[1.0], 3).is_err());
    }

    #[test]
    fn fast_matches_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let d = rng.gen_range(1..=4);
            let x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() - 0.5).collect();
            let n = rng.gen_range(1..20_000u64);
            let a = weyl_sum_fast(&x, n).unwrap();
            let b = weyl_sum_near(&x, n).unwrap();
            assert!((a - b).norm() < 1e-9 * n as f64, "{x:?} {n}");
        }
        let tiny = [1e-30, 0.25];
        let a = weyl_sum_fast(&tiny, 5000).unwrap();
        assert!((a - weyl_sum_near(&tiny, 5000).unwrap()).norm() < 1e-9);
    }

    #[test]
    fn scan_rejects_degenerate() {
        assert!(incomplete_ratio_scan(1, 11, 10, 0).is_err());
        assert!(incomplete_ratio_scan(2, 15, 10, 0).is_err());
        let r = incomplete_ratio_scan(2, 13, 0, 0).unwrap();
        assert_eq!(r.samples, 13 * 12);
        assert!(r.argmax_u[1] != 0);
    }
}
