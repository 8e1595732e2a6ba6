//! Explicit witness sets inside a box on which |S| is provably of size
//! N p^(-1/2): small cells around rationals u/p with a large complete sum.
//! Their exact volume times the smallest sampled |S|^{2s} bounds the box
//! mean value from below, modulo sampling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::field::complete_sums_line;
use super::ArcConstants;
use crate::error::{domain, LabError, Result};
use crate::exponent::{nu, nu_argmax};
use crate::primes::is_prime;
use crate::torus::TorusPoint;
use crate::weyl::{roots_of_unity, weyl_sum_fast};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub s: f64,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub delta: f64,
    pub xi: Vec<f64>,
    pub p: u64,
    /// "large-prime" or "small-prime".
    pub regime: String,
    pub k: Option<i64>,
    pub nu: Option<f64>,
    pub constants: ArcConstants,
    /// Cell half-widths per axis.
    pub radii: Vec<f64>,
    /// Number of disjoint cells fully inside the box.
    pub cells: u64,
    pub volume: f64,
    pub sampled: usize,
    pub min_abs_s: f64,
    /// min sampled |S| sqrt(p) / N.
    pub min_ratio: f64,
    /// volume * min |S|^{2s}.
    pub bound: f64,
    /// Predicted growth of the bound, without constants.
    pub predicted: f64,
}

/// Residues b in [0, p) whose cell [b/p - r, b/p + r] lies in [xi, xi + delta]
/// on the circle.
fn admissible(p: u64, r: f64, xi: f64, delta: f64) -> Vec<u64> {
    (0..p)
        .filter(|&b| {
            let t = b as f64 / p as f64 - xi;
            let t = t - t.floor();
            t - r >= 0.0 && t + r <= delta
        })
        .collect()
}

fn centred(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

fn pick_prime(
    range: (u64, u64),
    prefer_large: bool,
    ok: impl Fn(u64) -> bool,
    what: &str,
) -> Result<u64> {
    let (lo, hi) = range;
    let found = if prefer_large {
        (lo.max(2)..=hi).rev().find(|&p| is_prime(p) && ok(p))
    } else {
        (lo.max(2)..=hi).find(|&p| is_prime(p) && ok(p))
    };
    found.ok_or_else(|| LabError::NoAdmissiblePrime(format!("{what} (range [{lo}, {hi}])")))
}

/// Minimum of |S| over random points of random cells.
fn sample_min<F>(count: usize, samples: usize, seed: u64, point: F, n: u64) -> Result<f64>
where
    F: Fn(&mut ChaCha8Rng) -> Vec<f64>,
{
    if count == 0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec<f64>> = (0..samples.max(1)).map(|_| point(&mut rng)).collect();
    let vals: Vec<Result<f64>> = pts
        .par_iter()
        .map(|x| Ok(weyl_sum_fast(x, n)?.norm()))
        .collect();
    let mut m = f64::INFINITY;
    for v in vals {
        m = m.min(v?);
    }
    Ok(m)
}

#[allow(clippy::too_many_arguments)]
pub fn lower_bound_witness(
    s: f64,
    n: u64,
    delta: f64,
    xi: &TorusPoint,
    k: Option<i64>,
    samples: usize,
    seed: u64,
    consts: &ArcConstants,
) -> Result<WitnessReport> {
    let d = xi.dim();
    if d < 2 {
        return domain("witness construction needs d >= 2");
    }
    if !(s > 0.0) || n < 2 {
        return domain("need s > 0 and N >= 2");
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return domain(format!("delta={delta} outside (0,1]"));
    }
    if d == 2 {
        quadratic(s, n, delta, xi, samples, seed, consts)
    } else {
        higher(s, d, n, delta, xi, k, samples, seed, consts)
    }
}

fn quadratic(
    s: f64,
    n: u64,
    delta: f64,
    xi: &TorusPoint,
    samples: usize,
    seed: u64,
    kc: &ArcConstants,
) -> Result<WitnessReport> {
    let nf = n as f64;
    let top = (nf / kc.big_c).floor() as u64;
    let (p, regime) = if s <= 2.0 {
        let lo = (nf / (2.0 * kc.big_c)).ceil() as u64;
        let p = pick_prime((lo, top), true, |_| true, "no prime in [N/(2C), N/C]")?;
        (p, "large-prime")
    } else {
        let lo = (1.0 / delta).ceil() as u64;
        let hi = ((2.0 / delta).floor() as u64).min(top);
        let p = pick_prime((lo, hi), false, |_| true, "no prime in [1/delta, 2/delta] with N >= C p")?;
        (p, "small-prime")
    };
    let radii = vec![kc.c / nf, kc.c / (nf * nf)];
    let b1 = admissible(p, radii[0], xi.coords()[0], delta);
    let b2: Vec<u64> = admissible(p, radii[1], xi.coords()[1], delta)
        .into_iter()
        .filter(|&b| b != 0)
        .collect();
    let cells = (b1.len() * b2.len()) as u64;
    let volume = cells as f64 * 4.0 * radii[0] * radii[1];
    let pf = p as f64;
    let min_abs = sample_min(
        cells as usize,
        samples,
        seed,
        |rng| {
            let u1 = b1[rng.gen_range(0..b1.len())] as f64 / pf;
            let u2 = b2[rng.gen_range(0..b2.len())] as f64 / pf;
            vec![
                centred(u1 + rng.gen_range(-1.0..=1.0) * radii[0]),
                centred(u2 + rng.gen_range(-1.0..=1.0) * radii[1]),
            ]
        },
        n,
    )?;
    let predicted = delta * delta * nf.powf(s - 1.0) * (delta * nf).powf(s - 2.0).max(1.0);
    Ok(report(
        s, 2, n, delta, xi, p, regime, None, None, kc, radii, cells, volume, samples, min_abs,
        predicted,
    ))
}

#[allow(clippy::too_many_arguments)]
fn higher(
    s: f64,
    d: usize,
    n: u64,
    delta: f64,
    xi: &TorusPoint,
    k: Option<i64>,
    samples: usize,
    seed: u64,
    kc: &ArcConstants,
) -> Result<WitnessReport> {
    let k = match k {
        Some(k) => k,
        None => nu_argmax(d as i64)?,
    };
    if k < 1 || k >= d as i64 {
        return domain(format!("need 1 <= k < d, got k={k}"));
    }
    let nu_v = nu(d as i64, k)?.to_f64();
    let nf = n as f64;
    let top = (nf / kc.big_c).floor() as u64;
    let cond = |p: u64| {
        let pf = p as f64;
        delta >= 2.0 * kc.big_gamma * pf.powf(-nu_v) * pf.ln()
    };
    let prefer_large = s <= d as f64;
    let p = pick_prime(
        (3, top),
        prefer_large,
        cond,
        "no prime with delta >= 2 Gamma p^-nu log p and N >= C p",
    )?;
    let pf = p as f64;
    let lp = pf.ln();
    let radii: Vec<f64> = (1..=d as i32).map(|j| kc.c / (nf.powi(j) * lp)).collect();
    let axes: Vec<Vec<u64>> = (0..d)
        .map(|j| admissible(p, radii[j], xi.coords()[j], delta))
        .collect();
    let lines: u128 = axes[1..].iter().map(|a| a.len() as u128).product();
    let work = lines * p as u128;
    if work > 500_000_000 {
        return Err(LabError::Budget {
            what: "witness line sums".into(),
            needed: work,
            budget: 500_000_000,
        });
    }
    let roots = roots_of_unity(p);
    let fft = FftPlanner::new().plan_fft_inverse(p as usize);
    let thresh = kc.gamma * pf.sqrt();
    let in_first: Vec<bool> = {
        let mut v = vec![false; p as usize];
        for &u in &axes[0] {
            v[u as usize] = true;
        }
        v
    };
    let good: Vec<Vec<u64>> = (0..lines as usize)
        .into_par_iter()
        .flat_map_iter(|idx| {
            let mut r = idx;
            let tail: Vec<u64> = axes[1..]
                .iter()
                .map(|a| {
                    let v = a[r % a.len()];
                    r /= a.len();
                    v
                })
                .collect();
            let degenerate = tail.iter().all(|&t| t == 0);
            let sums: Vec<Complex64> = complete_sums_line(fft.as_ref(), &roots, &tail, p);
            let mut out = Vec::new();
            if !degenerate {
                for (u1, t) in sums.iter().enumerate() {
                    if in_first[u1] && t.norm() >= thresh {
                        let mut u = vec![u1 as u64];
                        u.extend(&tail);
                        out.push(u);
                    }
                }
            }
            out.into_iter()
        })
        .collect();
    let cells = good.len() as u64;
    let cell_vol: f64 = radii.iter().map(|r| 2.0 * r).product();
    let volume = cells as f64 * cell_vol;
    let min_abs = sample_min(
        good.len(),
        samples,
        seed,
        |rng| {
            let u = &good[rng.gen_range(0..good.len())];
            u.iter()
                .zip(&radii)
                .map(|(&v, r)| centred(v as f64 / pf + rng.gen_range(-1.0..=1.0) * r))
                .collect()
        },
        n,
    )?;
    let df = d as f64;
    let sd = df * (df + 1.0) / 2.0;
    let predicted = delta.powi(d as i32)
        * nf.powf(df + s - sd)
        * (delta.powf(1.0 / nu_v) * nf).powf(s - df).max(1.0);
    let regime = if prefer_large { "large-prime" } else { "small-prime" };
    Ok(report(
        s,
        d,
        n,
        delta,
        xi,
        p,
        regime,
        Some(k),
        Some(nu_v),
        kc,
        radii,
        cells,
        volume,
        samples,
        min_abs,
        predicted,
    ))
}

#[allow(clippy::too_many_arguments)]
fn report(
    s: f64,
    d: usize,
    n: u64,
    delta: f64,
    xi: &TorusPoint,
    p: u64,
    regime: &str,
    k: Option<i64>,
    nu_v: Option<f64>,
    kc: &ArcConstants,
    radii: Vec<f64>,
    cells: u64,
    volume: f64,
    samples: usize,
    min_abs: f64,
    predicted: f64,
) -> WitnessReport {
    let bound = volume * min_abs.powf(2.0 * s);
    WitnessReport {
        s,
        d,
        n,
        delta,
        xi: xi.coords().to_vec(),
        p,
        regime: regime.to_string(),
        k,
        nu: nu_v,
        constants: *kc,
        radii,
        cells,
        volume,
        sampled: if cells > 0 { samples.max(1) } else { 0 },
        min_abs_s: min_abs,
        min_ratio: min_abs * (p as f64).sqrt() / n as f64,
        bound,
        predicted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxmean::{integrate_box, BoxSpec, QuadOptions, Scheme};

    #[test]
    fn full_torus_below_mean_value() {
        let kc = ArcConstants::default();
        let w = lower_bound_witness(2.0, 32, 1.0, &TorusPoint::zero(2), None, 200, 1, &kc).unwrap();
        assert!(w.cells > 0 && w.bound > 0.0);
        let full = integrate_box(
            2.0,
            None,
            &BoxSpec::origin(2, 1.0).unwrap(),
            32,
            &QuadOptions::with_mode(Scheme::ExactTorus, 1e-6),
        )
        .unwrap();
        assert!(w.bound <= full.value);
    }

    #[test]
    fn below_box_quadrature() {
        let kc = ArcConstants::default();
        let xi = TorusPoint::new(vec![0.3, 0.55]).unwrap();
        let w = lower_bound_witness(1.0, 40, 0.5, &xi, None, 200, 2, &kc).unwrap();
        let q = integrate_box(
            1.0,
            None,
            &BoxSpec::new(xi, 0.5).unwrap(),
            40,
            &QuadOptions::with_mode(Scheme::MidpointGrid, 1e-2),
        )
        .unwrap();
        assert!(w.bound <= q.value * 1.02, "{} vs {}", w.bound, q.value);
    }

    #[test]
    fn small_prime_regime_and_errors() {
        let kc = ArcConstants::default();
        let xi = TorusPoint::new(vec![0.1, 0.2]).unwrap();
        let w = lower_bound_witness(3.0, 400, 0.1, &xi, None, 50, 3, &kc).unwrap();
        assert_eq!(w.regime, "small-prime");
        assert!((10..=20).contains(&w.p));
        let e = lower_bound_witness(3.0, 40, 0.01, &xi, None, 50, 3, &kc);
        assert!(matches!(e, Err(LabError::NoAdmissiblePrime(_))));
    }

    #[test]
    fn cubic_construction() {
        let kc = ArcConstants {
            big_gamma: 0.05,
            ..Default::default()
        };
        let xi = TorusPoint::new(vec![0.2, 0.4, 0.6]).unwrap();
        let w = lower_bound_witness(2.0, 729, 0.5, &xi, Some(1), 100, 4, &kc).unwrap();
        assert!(w.cells > 0 && w.bound > 0.0, "{w:?}");
        assert!(w.p <= 729 / 4);
    }
}
