//! The slices H_j of the window lattice and their sizes.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HjSpec {
    pub j: usize,
    pub s: u32,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub delta: f64,
}

/// floor(1/delta). A reciprocal within 1e-9 (relative) of an integer snaps
/// to it, so that delta = 0.2 gives 5 and not 4.
pub fn window_of_delta(delta: f64) -> Result<u64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return domain(format!("delta={delta} outside (0,1]"));
    }
    let v = 1.0 / delta;
    if v >= 1.8e19 {
        return domain(format!("delta={delta} too small for a 64-bit window"));
    }
    let r = v.round();
    Ok(if (v - r).abs() <= 1e-9 * v { r as u64 } else { v.floor() as u64 })
}

/// max{k <= d : N^k < 1/delta}, i.e. delta in [N^-(k+1), N^-k).
pub fn scale_k(delta: f64, n: u64, d: usize) -> Result<usize> {
    let w = window_of_delta(delta)?;
    let v = 1.0 / delta;
    let snapped = (v - w as f64).abs() <= 1e-9 * v;
    let mut k = 0;
    while k < d {
        let p = (n as f64).powi(k as i32 + 1);
        let below = if snapped { p < w as f64 } else { p < v };
        if !below {
            break;
        }
        k += 1;
    }
    Ok(k)
}

fn check(spec: &HjSpec) -> Result<()> {
    if spec.d == 0 || spec.j == 0 || spec.j > spec.d {
        return domain(format!("need 1 <= j <= d (j={} d={})", spec.j, spec.d));
    }
    if spec.s == 0 || spec.n == 0 {
        return domain("need s, N >= 1");
    }
    Ok(())
}

/// min(W, 2sN^i) for i = 1..d.
fn caps(spec: &HjSpec) -> Result<Vec<u128>> {
    let w = window_of_delta(spec.delta)? as u128;
    let mut pw: u128 = 1;
    Ok((0..spec.d)
        .map(|_| {
            pw = pw.saturating_mul(spec.n as u128);
            w.min(pw.saturating_mul(2 * spec.s as u128))
        })
        .collect())
}

/// #H_j = (c_j - 1) prod_{i > j} c_i with c_i = 2 min(W, 2sN^i) + 1.
pub fn hj_count(spec: &HjSpec) -> Result<u128> {
    check(spec)?;
    let m = caps(spec)?;
    let mut out = 2 * m[spec.j - 1];
    for &mi in &m[spec.j..] {
        out = out.saturating_mul(2 * mi + 1);
    }
    Ok(out)
}

/// Order-of-magnitude model for #H_j (constants dropped).
pub fn hj_asymptotic(spec: &HjSpec) -> Result<f64> {
    check(spec)?;
    let k = scale_k(spec.delta, spec.n, spec.d)?;
    let (j, d) = (spec.j as i32, spec.d as i32);
    let inv = 1.0 / spec.delta;
    let nf = spec.n as f64;
    Ok(if (k as i32) < j {
        inv.powi(d - j + 1)
    } else if (k as i32) < d {
        let k = k as i32;
        inv.powi(d - k) * nf.powi((k * (k + 1) - j * (j - 1)) / 2)
    } else {
        nf.powi((d * (d + 1) - j * (j - 1)) / 2)
    })
}

/// Every h in H_j: zeros before slot j, h_j != 0, |h_i| <= min(W, 2sN^i).
pub fn hj_members(spec: &HjSpec) -> Result<Vec<Vec<i128>>> {
    check(spec)?;
    let count = hj_count(spec)?;
    if count > 50_000_000 {
        return domain(format!("H_j has {count} members, too many to list"));
    }
    let m: Vec<i128> = caps(spec)?.into_iter().map(|v| v as i128).collect();
    let j0 = spec.j - 1;
    let mut out = Vec::with_capacity(count as usize);
    let mut h = vec![0i128; spec.d];
    for i in j0..spec.d {
        h[i] = -m[i];
    }
    if m[j0] == 0 {
        return Ok(out);
    }
    loop {
        if h[j0] != 0 {
            out.push(h.clone());
        }
        let mut a = spec.d;
        loop {
            if a == j0 {
                return Ok(out);
            }
            a -= 1;
            if h[a] < m[a] {
                h[a] += 1;
                for b in a + 1..spec.d {
                    h[b] = -m[b];
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(j: usize, s: u32, d: usize, n: u64, delta: f64) -> HjSpec {
        HjSpec { j, s, d, n, delta }
    }

    #[test]
    fn windows() {
        assert_eq!(window_of_delta(0.2).unwrap(), 5);
        assert_eq!(window_of_delta(0.1).unwrap(), 10);
        assert_eq!(window_of_delta(0.3).unwrap(), 3);
        assert_eq!(window_of_delta(1.0).unwrap(), 1);
        assert!(window_of_delta(0.0).is_err());
        assert!(window_of_delta(1.5).is_err());
    }

    #[test]
    fn sizes() {
        assert_eq!(hj_count(&spec(1, 2, 2, 10, 0.1)).unwrap(), 420);
        assert_eq!(hj_count(&spec(2, 2, 2, 10, 0.1)).unwrap(), 20);
        assert_eq!(hj_asymptotic(&spec(2, 2, 2, 10, 0.1)).unwrap(), 10.0);
        assert_eq!(hj_members(&spec(1, 2, 2, 10, 0.1)).unwrap().len(), 420);
        assert_eq!(hj_members(&spec(2, 2, 2, 10, 0.1)).unwrap().len(), 20);
    }

    #[test]
    fn monotone_in_j() {
        let v: Vec<u128> = (1..=3).map(|j| hj_count(&spec(j, 2, 3, 8, 0.05)).unwrap()).collect();
        assert!(v[0] >= v[1] && v[1] >= v[2]);
    }

    #[test]
    fn members_by_brute_force() {
        let sp = spec(1, 1, 2, 3, 0.2);
        let w = 5i128;
        let mut expect = Vec::new();
        for a in -w..=w {
            for b in -w..=w {
                if a != 0 && a.abs() <= 6 && b.abs() <= 18 {
                    expect.push(vec![a, b]);
                }
            }
        }
        assert_eq!(hj_members(&sp).unwrap(), expect);
    }

    #[test]
    fn scale() {
        assert_eq!(scale_k(0.1, 10, 2).unwrap(), 0);
        assert_eq!(scale_k(0.05, 10, 2).unwrap(), 1);
        assert_eq!(scale_k(1e-4, 10, 3).unwrap(), 3);
    }
}
