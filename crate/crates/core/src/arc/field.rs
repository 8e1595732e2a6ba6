//! Complete sums T_{d,p}(u) over F_p, monomial curves in boxes and the
//! continuity of Gauss sums near rationals with prime denominator.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::ArcConstants;
use crate::error::{domain, Result};
use crate::primes::{is_prime, pow_mod};
use crate::weyl::{poly_mod, roots_of_unity, weyl_sum_fast};

/// T(u_1, tail) for every u_1 in F_p at once: the sequence
/// e_p(u_2 n^2 + ... + u_d n^d) transformed over n.
pub fn complete_sums_line(
    fft: &dyn rustfft::Fft<f64>,
    roots: &[Complex64],
    tail: &[u64],
    p: u64,
) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = (0..p)
        .map(|n| {
            let mut acc = 0u64;
            let mut pw = n % p;
            let np = pw;
            for &u in tail {
                pw = pw * np % p;
                acc = (acc + u * pw) % p;
            }
            roots[acc as usize]
        })
        .collect();
    // rustfft's inverse transform is sum_n x_n e(+kn/p), unnormalised
    fft.process(&mut buf);
    buf
}

/// Box in F_p^d: {k_j + 1, ..., k_j + L} mod p on every axis.
fn in_box(u: &[u64], corner: &[u64], l: u64, p: u64) -> bool {
    u.iter()
        .zip(corner)
        .all(|(&v, &k)| (v + 2 * p - k - 1) % p < l)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldScanReport {
    pub d: usize,
    pub p: u64,
    pub gamma: f64,
    pub total: u64,
    /// #{u in F_p^d : |T(u)| >= gamma sqrt(p)}.
    pub count: u64,
    pub density: f64,
    /// The same count restricted to u not of the form (u_1, 0, ..., 0).
    pub count_nondegenerate: u64,
    pub sub_box_corner: Option<Vec<u64>>,
    pub sub_box_side: Option<u64>,
    pub sub_box_count: Option<u64>,
    pub sub_box_density: Option<f64>,
    pub max_ratio: f64,
}

fn scan_guard(d: usize, p: u64) -> Result<()> {
    let ok = match d {
        1 => p <= 1 << 20,
        2 => p <= 2000,
        3 => p <= 150,
        _ => (p as f64).powi(d as i32) <= 150f64.powi(3),
    };
    if !ok || !is_prime(p) {
        return domain(format!("prime field scan out of scale or p not prime (d={d}, p={p})"));
    }
    Ok(())
}

/// Exhaustive census of |T_{d,p}(u)| >= gamma sqrt(p), optionally also
/// inside the box with the given corner and side.
pub fn prime_field_scan(
    d: usize,
    p: u64,
    gamma: f64,
    sub_box: Option<(Vec<u64>, u64)>,
) -> Result<FieldScanReport> {
    if d == 0 || !(gamma >= 0.0) {
        return domain("need d >= 1 and gamma >= 0");
    }
    scan_guard(d, p)?;
    if let Some((c, l)) = &sub_box {
        if c.len() != d || *l == 0 || *l > p {
            return domain("sub-box needs a d-dimensional corner and 1 <= L <= p");
        }
    }
    let roots = roots_of_unity(p);
    let fft = FftPlanner::new().plan_fft_inverse(p as usize);
    let thresh = gamma * (p as f64).sqrt() * (1.0 - 1e-9);
    let lines = p.pow(d as u32 - 1);
    let per_line: Vec<(u64, u64, u64, f64)> = (0..lines)
        .into_par_iter()
        .map(|idx| {
            let mut tail = Vec::with_capacity(d - 1);
            let mut r = idx;
            for _ in 1..d {
                tail.push(r % p);
                r /= p;
            }
            let degenerate_line = tail.iter().all(|&t| t == 0);
            let sums = complete_sums_line(fft.as_ref(), &roots, &tail, p);
            let (mut c, mut nd, mut sb, mut mx) = (0u64, 0u64, 0u64, 0f64);
            let mut u = vec![0u64; d];
            u[1..].copy_from_slice(&tail);
            for (u1, s) in sums.iter().enumerate() {
                let m = s.norm();
                mx = mx.max(m / (p as f64).sqrt());
                if m >= thresh {
                    c += 1;
                    if !degenerate_line {
                        nd += 1;
                    }
                    if let Some((corner, l)) = &sub_box {
                        u[0] = u1 as u64;
                        if in_box(&u, corner, *l, p) {
                            sb += 1;
                        }
                    }
                }
            }
            (c, nd, sb, mx)
        })
        .collect();
    let (mut count, mut nondeg, mut sbc, mut mx) = (0u64, 0u64, 0u64, 0f64);
    for (c, nd, sb, m) in per_line {
        count += c;
        nondeg += nd;
        sbc += sb;
        mx = mx.max(m);
    }
    let total = p.pow(d as u32);
    let (corner, side) = match &sub_box {
        Some((c, l)) => (Some(c.clone()), Some(*l)),
        None => (None, None),
    };
    Ok(FieldScanReport {
        d,
        p,
        gamma,
        total,
        count,
        density: count as f64 / total as f64,
        count_nondegenerate: nondeg,
        sub_box_corner: corner,
        sub_box_side: side,
        sub_box_count: sub_box.as_ref().map(|_| sbc),
        sub_box_density: side.map(|l| sbc as f64 / (l as f64).powi(d as i32)),
        max_ratio: mx,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialReport {
    pub p: u64,
    pub k: usize,
    pub a: Vec<u64>,
    #[serde(rename = "L")]
    pub l: u64,
    pub corner: Vec<u64>,
    pub count: u64,
    /// L^k p^(1-k) / 2.
    pub bound: f64,
    /// Side from which the bound is claimed: C p^(1-1/(2k)) log p (k >= 2).
    pub side_threshold: f64,
    pub applies: bool,
    pub meets_bound: bool,
}

/// #{lambda in F_p^* : (a_1 lambda, ..., a_k lambda^k) in the box}, exactly.
pub fn monomial_curve_density(
    p: u64,
    a: &[u64],
    l: u64,
    corner: &[u64],
    big_c: f64,
) -> Result<MonomialReport> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    let k = a.len();
    if k == 0 || corner.len() != k {
        return domain("need k >= 1 coefficients and a k-dimensional corner");
    }
    if a.iter().any(|&ai| ai % p == 0) {
        return domain("coefficients must be nonzero mod p");
    }
    if l == 0 || l > p {
        return domain(format!("need 1 <= L <= p, got L={l}"));
    }
    let corner: Vec<u64> = corner.iter().map(|c| c % p).collect();
    let count = (1..p)
        .into_par_iter()
        .filter(|&lam| {
            let u: Vec<u64> = a
                .iter()
                .enumerate()
                .map(|(i, &ai)| (ai % p) * pow_mod(lam, i as u64 + 1, p) % p)
                .collect();
            in_box(&u, &corner, l, p)
        })
        .count() as u64;
    let pf = p as f64;
    let bound = 0.5 * (l as f64).powi(k as i32) * pf.powi(1 - k as i32);
    let side_threshold = if k == 1 {
        1.0
    } else {
        big_c * pf.powf(1.0 - 1.0 / (2.0 * k as f64)) * pf.ln()
    };
    let applies = l as f64 >= side_threshold || l == p;
    Ok(MonomialReport {
        p,
        k,
        a: a.to_vec(),
        l,
        corner,
        count,
        bound,
        side_threshold,
        applies,
        meets_bound: count as f64 >= bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussContinuityReport {
    pub p: u64,
    pub a: u64,
    pub b: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub c: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    pub samples: usize,
    /// |G(a/p, b/p; N)| sqrt(p) / N.
    pub ratio_at_rational: f64,
    /// min over samples of |G(x; N)| sqrt(p) / N.
    pub min_ratio: f64,
    /// max over samples of |G(x) - G(a/p, b/p)| divided by
    /// (N log p / sqrt p) sum_j |x_j - u_j/p| N^j.
    pub max_continuity_ratio: f64,
}

fn centred(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// Samples |x_1 - a/p| <= c/N, |x_2 - b/p| <= c/N^2 and records how small
/// the Gauss sum gets relative to N/sqrt(p), together with the continuity
/// ratio against the rational point.
pub fn gauss_continuity_check(
    p: u64,
    a: u64,
    b: u64,
    n: u64,
    samples: usize,
    seed: u64,
    k: &ArcConstants,
) -> Result<GaussContinuityReport> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    if b.is_multiple_of(p) {
        return domain("gcd(b, p) must be 1");
    }
    if (n as f64) < k.big_c * p as f64 {
        return domain(format!("need N >= C p (N={n}, C={}, p={p})", k.big_c));
    }
    let nf = n as f64;
    let pf = p as f64;
    let u = [centred((a % p) as f64 / pf), centred((b % p) as f64 / pf)];
    // the rational sum exactly, by periodicity
    let roots = roots_of_unity(p);
    let coeffs = [a % p, b % p];
    let period: Complex64 = (1..=p).map(|m| roots[poly_mod(&coeffs, m, p) as usize]).sum();
    let rest: Complex64 = (1..=n % p).map(|m| roots[poly_mod(&coeffs, m, p) as usize]).sum();
    let g0 = period * (n / p) as f64 + rest;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<[f64; 2]> = (0..samples)
        .map(|_| {
            [
                u[0] + rng.gen_range(-1.0..=1.0) * k.c / nf,
                u[1] + rng.gen_range(-1.0..=1.0) * k.c / (nf * nf),
            ]
        })
        .collect();
    let scale = nf * pf.ln() / pf.sqrt();
    let vals: Vec<Result<(f64, f64)>> = pts
        .par_iter()
        .map(|x| {
            let g = weyl_sum_fast(x, n)?;
            let dist = (x[0] - u[0]).abs() * nf + (x[1] - u[1]).abs() * nf * nf;
            let cont = if dist > 0.0 {
                (g - g0).norm() / (scale * dist)
            } else {
                0.0
            };
            Ok((g.norm() * pf.sqrt() / nf, cont))
        })
        .collect();
    let (mut min_ratio, mut max_cont) = (f64::INFINITY, 0f64);
    for v in vals {
        let (r, c) = v?;
        min_ratio = min_ratio.min(r);
        max_cont = max_cont.max(c);
    }
    Ok(GaussContinuityReport {
        p,
        a,
        b,
        n,
        c: k.c,
        big_c: k.big_c,
        samples,
        ratio_at_rational: g0.norm() * pf.sqrt() / nf,
        min_ratio,
        max_continuity_ratio: max_cont,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::complete_sum_with;

    #[test]
    fn fft_lines_match_direct() {
        let p = 13;
        let roots = roots_of_unity(p);
        let fft = FftPlanner::new().plan_fft_inverse(p as usize);
        for tail in [vec![0u64, 0], vec![3, 0], vec![5, 7]] {
            let line = complete_sums_line(fft.as_ref(), &roots, &tail, p);
            for u1 in 0..p {
                let mut u = vec![u1];
                u.extend(&tail);
                let want = complete_sum_with(&roots, &u, p);
                assert!((line[u1 as usize] - want).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn quadratic_census() {
        for p in [3u64, 5, 101] {
            let r = prime_field_scan(2, p, 1.0, None).unwrap();
            // every b != 0 has |T| = sqrt p; on b = 0 only u = 0 survives
            assert_eq!(r.count, p * p - p + 1);
            assert_eq!(r.count_nondegenerate, p * p - p);
        }
        let all = prime_field_scan(2, 7, 0.0, None).unwrap();
        assert_eq!(all.density, 1.0);
        assert!(prime_field_scan(2, 2003, 1.0, None).is_err());
    }

    #[test]
    fn cubic_scan_with_box() {
        let p = 53u64;
        let l = (p as f64).powf(0.8).floor() as u64;
        let r = prime_field_scan(3, p, 0.5, Some((vec![3, 10, 40], l))).unwrap();
        assert!(r.density > 0.1);
        assert!(r.sub_box_density.unwrap() > 0.0);
    }

    #[test]
    fn monomial_counts() {
        let p = 101;
        for a in [1u64, 7, 50] {
            for corner in [0u64, 17, 90] {
                let c = monomial_curve_density(p, &[a], 20, &[corner], 4.0).unwrap().count;
                assert!(c == 19 || c == 20);
            }
        }
        let full = monomial_curve_density(p, &[3, 5], p, &[4, 9], 4.0).unwrap();
        assert_eq!(full.count, p - 1);
        // unit boxes partition F_p^2, so the counts add up to p - 1
        let q = 31u64;
        let mut total = 0;
        for k1 in 0..q {
            for k2 in 0..q {
                total += monomial_curve_density(q, &[2, 3], 1, &[k1, k2], 4.0).unwrap().count;
            }
        }
        assert_eq!(total, q - 1);
        assert!(monomial_curve_density(p, &[0, 1], 10, &[0, 0], 4.0).is_err());
    }

    #[test]
    fn gauss_rational_point() {
        let k = ArcConstants::default();
        let p = 101;
        let r = gauss_continuity_check(p, 7, 13, 50 * p, 0, 1, &k).unwrap();
        assert!((r.ratio_at_rational - 1.0).abs() < 1e-9);
        let r = gauss_continuity_check(p, 7, 13, 50 * p, 300, 2, &k).unwrap();
        assert!(r.min_ratio > 0.2, "{}", r.min_ratio);
        let zero = ArcConstants { c: 1e-300, ..k };
        let r = gauss_continuity_check(p, 7, 13, 50 * p, 5, 2, &zero).unwrap();
        assert!((r.min_ratio - 1.0).abs() < 1e-6);
        assert!(gauss_continuity_check(p, 7, 0, 50 * p, 5, 2, &k).is_err());
        assert!(gauss_continuity_check(p, 7, 1, 2 * p, 5, 2, &k).is_err());
    }
}
