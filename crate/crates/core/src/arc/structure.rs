//! Exhaustive search for the rational approximation that a large Weyl sum
//! forces on its argument.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{nearest_fraction, ArcConstants};
use crate::error::{domain, Result};
use crate::exponent::big_d;
use crate::torus::TorusPoint;

/// Cap on q = q_2 ... q_d in the factored search.
const FACTORED_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalApprox {
    pub q: u64,
    /// q_2..q_d for d >= 3; [q] for d = 2.
    pub moduli: Vec<u64>,
    pub numerators: Vec<u64>,
    pub errors: Vec<f64>,
    pub envelope: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "A")]
    pub a: f64,
    /// Whether A lies in the range where the structure is guaranteed.
    pub guaranteed: bool,
    /// Search bound on q (d = 2) or on prod q_i^(1/i) (d >= 3).
    pub search_bound: f64,
    pub witness: Option<RationalApprox>,
    /// The factored search hit the cap on q before finishing.
    pub truncated: bool,
    pub constants: ArcConstants,
}

/// Smallest-q rational approximation of x within the envelope, if any.
///
/// d = 2: q <= K (N/A)^2 N^eps with |x_j - a_j/q| <= K (N/A)^2 q^-1 N^-j N^eps.
/// d >= 3: q = q_2 ... q_d with q_2 cube-free, q_i i-th power-full and
/// (i+1)-th power-free for 3 <= i < d, q_d d-th power-full, pairwise
/// coprime, prod q_i^(1/i) <= K N^(1+eps) / A, gcd(q, b) = 1 and
/// |x_j - b_j/q| <= K (N/A)^d N^-j N^eps prod q_i^(-d/i).
/// K is the `envelope` constant.
pub fn detect_rational_structure(
    x: &TorusPoint,
    n: u64,
    a: f64,
    k: &ArcConstants,
) -> Result<StructureReport> {
    let d = x.dim();
    if d < 2 {
        return domain("structure detection needs d >= 2");
    }
    if n < 2 || !(a > 0.0) {
        return domain("need N >= 2 and A > 0");
    }
    let nf = n as f64;
    let fudge = nf.powf(k.eps);
    if d == 2 {
        let r = nf / a;
        let qmax = k.envelope * r * r * fudge;
        let guaranteed = a > nf.sqrt();
        let qcap = qmax.floor().min(1e9) as u64;
        let mut witness = None;
        for q in 1..=qcap {
            if let Some(w) = test_modulus(x, q, vec![q], |j| {
                k.envelope * r * r / q as f64 * nf.powi(-(j as i32)) * fudge
            }) {
                witness = Some(w);
                break;
            }
        }
        return Ok(StructureReport {
            d,
            n,
            a,
            guaranteed,
            search_bound: qmax,
            witness,
            truncated: qmax > 1e9,
            constants: *k,
        });
    }

    let guaranteed = match big_d(d as i64) {
        Ok(dd) => a > nf.powf(1.0 - 1.0 / dd as f64),
        Err(_) => false,
    };
    let bound = k.envelope * nf.powf(1.0 + k.eps) / a;
    let classes: Vec<Vec<u64>> = (2..=d).map(|i| class_members(i, d, bound)).collect();
    let mut combos: Vec<(u64, Vec<u64>)> = Vec::new();
    let mut truncated = false;
    let mut cur = Vec::with_capacity(d - 1);
    enumerate(&classes, 0, 1, 1.0, bound, &mut cur, &mut combos, &mut truncated);
    combos.sort();
    let r = nf / a;
    let mut witness = None;
    for (q, moduli) in combos {
        let shrink: f64 = moduli
            .iter()
            .enumerate()
            .map(|(t, &qi)| (qi as f64).powf(-(d as f64) / (t + 2) as f64))
            .product();
        let w = test_modulus(x, q, moduli, |j| {
            k.envelope * r.powi(d as i32) * nf.powi(-(j as i32)) * fudge * shrink
        });
        if let Some(w) = w {
            let g = w.numerators.iter().fold(q, |g, &b| g.gcd(&b));
            if g == 1 {
                witness = Some(w);
                break;
            }
        }
    }
    Ok(StructureReport {
        d,
        n,
        a,
        guaranteed,
        search_bound: bound,
        witness,
        truncated,
        constants: *k,
    })
}

fn test_modulus<F: Fn(usize) -> f64>(
    x: &TorusPoint,
    q: u64,
    moduli: Vec<u64>,
    env: F,
) -> Option<RationalApprox> {
    let mut numerators = Vec::new();
    let mut errors = Vec::new();
    let mut envelope = Vec::new();
    for (j, &c) in x.coords().iter().enumerate() {
        let (num, err) = nearest_fraction(c, q);
        let e = env(j + 1);
        if err > e {
            return None;
        }
        numerators.push(num);
        errors.push(err);
        envelope.push(e);
    }
    Some(RationalApprox {
        q,
        moduli,
        numerators,
        errors,
        envelope,
    })
}

/// Members of the class for q_i with q_i^(1/i) <= bound.
fn class_members(i: usize, d: usize, bound: f64) -> Vec<u64> {
    let lim = bound.powi(i as i32).min(FACTORED_CAP as f64) as usize;
    // smallest prime factor sieve
    let mut spf = vec![0u32; lim + 1];
    for p in 2..=lim {
        if spf[p] == 0 {
            for m in (p..=lim).step_by(p) {
                if spf[m] == 0 {
                    spf[m] = p as u32;
                }
            }
        }
    }
    let exponents = |mut q: usize| {
        let mut out = Vec::new();
        while q > 1 {
            let p = spf[q] as usize;
            let mut e = 0u32;
            while q.is_multiple_of(p) {
                q /= p;
                e += 1;
            }
            out.push(e);
        }
        out
    };
    (1..=lim as u64)
        .filter(|&q| {
            let f = exponents(q as usize);
            let ok_min = |m: u32| f.iter().all(|&e| e >= m);
            let ok_max = |m: u32| f.iter().all(|&e| e <= m);
            if i == 2 {
                ok_max(2)
            } else if i < d {
                ok_min(i as u32) && ok_max(i as u32)
            } else {
                ok_min(d as u32)
            }
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    classes: &[Vec<u64>],
    idx: usize,
    q: u64,
    size: f64,
    bound: f64,
    cur: &mut Vec<u64>,
    out: &mut Vec<(u64, Vec<u64>)>,
    truncated: &mut bool,
) {
    if idx == classes.len() {
        out.push((q, cur.clone()));
        return;
    }
    let i = (idx + 2) as f64;
    for &qi in &classes[idx] {
        let s = size * (qi as f64).powf(1.0 / i);
        if s > bound * (1.0 + 1e-12) {
            break;
        }
        if qi > 1 && cur.iter().any(|&c| c.gcd(&qi) != 1) {
            continue;
        }
        let Some(nq) = q.checked_mul(qi).filter(|&v| v <= FACTORED_CAP) else {
            *truncated = true;
            break;
        };
        cur.push(qi);
        enumerate(classes, idx + 1, nq, s, bound, cur, out, truncated);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::weyl_sum_fast;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k() -> ArcConstants {
        ArcConstants::default()
    }

    #[test]
    fn exact_rationals() {
        let x = TorusPoint::new(vec![2.0 / 7.0, 3.0 / 7.0]).unwrap();
        let r = detect_rational_structure(&x, 10_000, 10_000f64.powf(0.8), &k()).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.q, 7);
        assert_eq!(w.numerators, vec![2, 3]);
        assert!(w.errors.iter().all(|&e| e < 1e-15));
    }

    #[test]
    fn perturbed_third() {
        let n = 10_000u64;
        let a = (n as f64).powf(0.8);
        let x = TorusPoint::new(vec![1.0 / 3.0 + 1e-9, 2.0 / 3.0]).unwrap();
        let g = weyl_sum_fast(&[1.0 / 3.0 + 1e-9, 2.0 / 3.0 - 1.0], n).unwrap();
        assert!(g.norm() >= a);
        let r = detect_rational_structure(&x, n, a, &k()).unwrap();
        assert!(r.guaranteed);
        assert_eq!(r.witness.unwrap().q, 3);
    }

    #[test]
    fn random_points_have_no_structure_and_small_sums() {
        let n = 10_000u64;
        let a = (n as f64).powf(0.8);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let c: Vec<f64> = vec![rng.gen(), rng.gen()];
            let x = TorusPoint::new(c.clone()).unwrap();
            let r = detect_rational_structure(&x, n, a, &k()).unwrap();
            let g = weyl_sum_fast(&c, n).unwrap().norm();
            if r.witness.is_none() {
                assert!(g < a);
            }
        }
    }

    #[test]
    fn classes() {
        assert_eq!(class_members(2, 3, 3.0), vec![1, 2, 3, 4, 5, 6, 7, 9]);
        // 3 <= i < d: every exponent exactly 3
        assert_eq!(class_members(3, 4, 3.0), vec![1, 8, 27]);
        assert_eq!(class_members(3, 3, 3.0), vec![1, 8, 16, 27]);
        assert_eq!(class_members(3, 3, 4.0).last(), Some(&64));
    }

    #[test]
    fn cubic_structure() {
        // x = b / (q2 q3) with q2 = 5, q3 = 8
        let q = 40.0;
        let x = TorusPoint::new(vec![3.0 / q, 7.0 / q, 11.0 / q]).unwrap();
        let r = detect_rational_structure(&x, 4096, 4096f64.powf(0.9), &k()).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.q, 40);
        assert_eq!(w.moduli, vec![5, 8]);
    }
}
