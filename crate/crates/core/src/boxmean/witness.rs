//! The origin major arc and the free Schrodinger probability demo.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, TAU};

use crate::error::{domain, LabError, Result};
use crate::phase::PhaseEngine;
use crate::weyl::{e, weyl_sum_near};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorArcReport {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub c: f64,
    pub samples: usize,
    pub seed: u64,
    /// Largest |x_1 n + ... + x_d n^d| over samples and n <= N.
    pub max_abs_phase: f64,
    /// Smallest Re S / N over the samples.
    pub min_re_ratio: f64,
    pub all_pass: bool,
    /// (2c)^d N^{-s(d)}.
    pub volume: f64,
    pub delta: Option<f64>,
    /// Exact volume of the arc inside [-delta, delta]^d.
    pub volume_in_cube: Option<f64>,
    /// delta^k prod_{j>k} N^{-j} with N^-(k+1) < delta <= N^-k.
    pub volume_model: Option<f64>,
    pub k: Option<usize>,
}

/// Samples x in prod_j [-c N^-j, c N^-j] and checks that every phase stays
/// within 1/8 and that Re S_d(x; N) >= N cos(pi/4). A violation is a hard
/// failure since the bound is unconditional.
pub fn majorarc_witness(
    d: usize,
    n: u64,
    c: f64,
    samples: usize,
    seed: u64,
    delta: Option<f64>,
) -> Result<MajorArcReport> {
    if d == 0 || n == 0 {
        return domain("need d, N >= 1");
    }
    if !(c > 0.0 && c < 1.0 / (8.0 * d as f64)) {
        return domain(format!("c={c} must lie in (0, 1/(8d))"));
    }
    let nf = n as f64;
    let radii: Vec<f64> = (1..=d as i32).map(|j| c * nf.powi(-j)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Vec<f64>> = vec![vec![0.0; d]];
    for _ in 1..samples.max(1) {
        points.push(radii.iter().map(|r| rng.gen_range(-r..=*r)).collect());
    }
    let results: Vec<Result<(f64, f64)>> = points
        .par_iter()
        .map(|x| {
            let mut worst: f64 = 0.0;
            for k in 1..=n {
                let kf = k as f64;
                let mut acc = 0.0;
                for xj in x.iter().rev() {
                    acc = (acc + xj) * kf;
                }
                worst = worst.max(acc.abs());
            }
            let s = weyl_sum_near(x, n)?;
            Ok((worst, s.re / nf))
        })
        .collect();
    let mut max_abs_phase: f64 = 0.0;
    let mut min_re_ratio = f64::INFINITY;
    for r in results {
        let (p, re) = r?;
        max_abs_phase = max_abs_phase.max(p);
        min_re_ratio = min_re_ratio.min(re);
    }
    let all_pass = max_abs_phase <= 0.125 && min_re_ratio >= FRAC_PI_4.cos() - 1e-12;
    if !all_pass {
        return Err(LabError::HardIdentity(format!(
            "major arc bound failed: max phase {max_abs_phase}, min Re S/N {min_re_ratio}"
        )));
    }
    let volume: f64 = radii.iter().map(|r| 2.0 * r).product();
    let (mut volume_in_cube, mut volume_model, mut k_out) = (None, None, None);
    if let Some(dl) = delta {
        if !(dl > 0.0 && dl <= 1.0) {
            return domain(format!("delta={dl} outside (0,1]"));
        }
        volume_in_cube = Some(radii.iter().map(|r| 2.0 * r.min(dl)).product());
        let kappa = -dl.ln() / nf.ln();
        let k = (kappa.floor().max(0.0) as usize).min(d);
        let tail: f64 = (k as i32 + 1..=d as i32).map(|j| nf.powi(-j)).product();
        volume_model = Some(dl.powi(k as i32) * tail);
        k_out = Some(k);
    }
    Ok(MajorArcReport {
        d,
        n,
        c,
        samples: points.len(),
        seed,
        max_abs_phase,
        min_re_ratio,
        all_pass,
        volume,
        delta,
        volume_in_cube,
        volume_model,
        k: k_out,
    })
}

/// (2c)^d N^{-s(d)} in closed form, for checking.
pub fn arc_volume(d: usize, n: u64, c: f64) -> f64 {
    (2.0 * c).powi(d as i32) * (n as f64).powi(-((d * (d + 1) / 2) as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchrodingerReport {
    pub x0: f64,
    pub t0: f64,
    pub delta: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub t_samples: usize,
    pub rho_min: f64,
    pub t_at_min: f64,
    pub rho_max: f64,
    pub t_at_max: f64,
    /// rho_min / (delta N^{5/4}), the empirical constant of the upper bound.
    pub min_over_upper: f64,
    /// rho_max / delta, the empirical constant of the lower bound.
    pub max_over_delta: f64,
}

/// rho(t) = integral over [x0, x0 + delta] of |sum_{n<=N} e(xn + tn^2)|^2 dx.
///
/// Expanding the square gives sum_k C_k int e(kx) dx with C_k the
/// autocorrelation of c_n = e(t n^2), so the x-integral is exact.
pub fn schrodinger_rho(x0: f64, t: f64, delta: f64, n: u64) -> f64 {
    let eng = PhaseEngine::new(&[0.0, t - t.floor()]);
    let c: Vec<Complex64> = (1..=n).map(|k| e(eng.phase(k))).collect();
    let nn = c.len();
    let mut total = delta * nn as f64;
    for k in 1..nn {
        let mut ck = Complex64::new(0.0, 0.0);
        for i in 0..nn - k {
            ck += c[i + k] * c[i].conj();
        }
        // C_{-k} = conj(C_k) and I_{-k} = conj(I_k): pair them.
        let kf = k as f64;
        let ik = (e((kf * (x0 + delta)).fract()) - e((kf * x0).fract()))
            / Complex64::new(0.0, TAU * kf);
        total += 2.0 * (ck * ik).re;
    }
    total
}

pub fn schrodinger_scan(
    x0: f64,
    t0: f64,
    delta: f64,
    n: u64,
    t_samples: usize,
) -> Result<SchrodingerReport> {
    if !(delta > 0.0 && delta <= 1.0) {
        return domain(format!("delta={delta} outside (0,1]"));
    }
    if t_samples < 2 {
        return domain("need at least 2 t samples");
    }
    if n == 0 || n > 1 << 20 {
        return domain("N must lie in [1, 2^20]");
    }
    let ts: Vec<f64> = (0..t_samples)
        .map(|i| t0 + delta * i as f64 / (t_samples - 1) as f64)
        .collect();
    let rho: Vec<f64> = ts
        .par_iter()
        .map(|&t| schrodinger_rho(x0, t, delta, n))
        .collect();
    let (mut imin, mut imax) = (0, 0);
    for i in 1..rho.len() {
        if rho[i] < rho[imin] {
            imin = i;
        }
        if rho[i] > rho[imax] {
            imax = i;
        }
    }
    let nf = n as f64;
    Ok(SchrodingerReport {
        x0,
        t0,
        delta,
        n,
        t_samples,
        rho_min: rho[imin],
        t_at_min: ts[imin],
        rho_max: rho[imax],
        t_at_max: ts[imax],
        min_over_upper: rho[imin] / (delta * nf.powf(1.25)),
        max_over_delta: rho[imax] / delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_passes_and_volume() {
        let r = majorarc_witness(3, 2000, 1.0 / 25.0, 200, 1, Some(1e-5)).unwrap();
        assert!(r.all_pass && r.max_abs_phase <= 0.125);
        assert!((r.volume - arc_volume(3, 2000, 1.0 / 25.0)).abs() <= 1e-12 * r.volume);
        // 1e-5 = N^-1.51..: k = 1, the first side is clipped to 2 delta
        assert_eq!(r.k, Some(1));
        let c = 1.0 / 25.0;
        let n = 2000f64;
        let want = 2e-5 * (2.0 * c / (n * n)) * (2.0 * c / (n * n * n));
        assert!((r.volume_in_cube.unwrap() - want).abs() <= 1e-12 * want);
        let origin = majorarc_witness(2, 50, 0.05, 1, 0, None).unwrap();
        assert!((origin.min_re_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn arc_rejects_wide_constant() {
        assert!(majorarc_witness(2, 100, 1.0 / 16.0, 5, 0, None).is_err());
    }

    #[test]
    fn rho_full_period_is_parseval() {
        for t in [0.0, 0.123, 0.77] {
            let v = schrodinger_rho(0.0, t, 1.0, 37);
            assert!((v - 37.0).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn rho_matches_midpoint_quadrature() {
        let (x0, t, delta, n) = (0.31, 0.052, 0.07, 40u64);
        let m = 20_000;
        let h = delta / m as f64;
        let mut q = 0.0;
        for i in 0..m {
            let x = x0 + (i as f64 + 0.5) * h;
            let s: Complex64 = (1..=n).map(|k| e(x * k as f64 + t * (k * k) as f64)).sum();
            q += s.norm_sqr() * h;
        }
        let v = schrodinger_rho(x0, t, delta, n);
        assert!((v - q).abs() < 1e-6 * q.max(1.0), "{v} vs {q}");
    }

    #[test]
    fn scan_reports() {
        let r = schrodinger_scan(0.0, 0.0, 1.0, 64, 4).unwrap();
        assert!((r.rho_min - 64.0).abs() < 1e-8 && (r.rho_max - 64.0).abs() < 1e-8);
        let n = 256u64;
        let delta = (n as f64).powf(-0.375);
        let r = schrodinger_scan(0.1, 0.2, delta, n, 64).unwrap();
        assert!(r.rho_min <= r.rho_max && r.min_over_upper > 0.0);
        let r = schrodinger_scan(0.1, 0.2, 4.0 / n as f64, n, 64).unwrap();
        assert!(r.max_over_delta > 0.0);
        assert!(schrodinger_scan(0.0, 0.0, 0.5, 10, 1).is_err());
    }
}
