//! Measure of {x in box : |S_d(x; N)| >= A} and the envelopes it obeys for
//! large A.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxmean::BoxSpec;
use crate::error::{domain, LabError, Result};
use crate::exponent::big_d;
use crate::torus::TorusPoint;
use crate::weyl::weyl_sum_fast;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    Grid,
    MonteCarlo,
}

impl Sampler {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(Sampler::Grid),
            "monte-carlo" | "mc" => Ok(Sampler::MonteCarlo),
            _ => Err(LabError::Unknown(format!("sampler '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSetEstimate {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "box")]
    pub bx: BoxSpec,
    pub sampler: Sampler,
    pub measure_estimate: f64,
    pub sample_count: u64,
    pub hits: u64,
    /// 1.96 sigma binomial half-width, scaled by delta^d (0 for the grid).
    pub confidence_halfwidth: f64,
}

/// Signed representative in [-1/2, 1/2) so the fast evaluator sees |x| < 1.
fn centred(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

fn sample_points(bx: &BoxSpec, sampler: Sampler, n_samples: u64, seed: u64) -> Vec<Vec<f64>> {
    let d = bx.dim();
    let xi = bx.xi.coords();
    match sampler {
        Sampler::MonteCarlo => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n_samples)
                .map(|_| {
                    (0..d)
                        .map(|j| centred(xi[j] + bx.delta * rng.gen::<f64>()))
                        .collect()
                })
                .collect()
        }
        Sampler::Grid => {
            let m = (n_samples as f64).powf(1.0 / d as f64).ceil().max(1.0) as u64;
            let total = m.pow(d as u32);
            (0..total)
                .map(|mut idx| {
                    (0..d)
                        .map(|j| {
                            let c = idx % m;
                            idx /= m;
                            centred(xi[j] + bx.delta * (c as f64 + 0.5) / m as f64)
                        })
                        .collect()
                })
                .collect()
        }
    }
}

/// Fraction of sampled x in the box with |S_d(x; N)| >= A, times delta^d.
pub fn level_set_measure(
    bx: &BoxSpec,
    a: f64,
    n: u64,
    sampler: Sampler,
    n_samples: u64,
    seed: u64,
) -> Result<LevelSetEstimate> {
    if n_samples < 1000 {
        return domain("level set estimation needs at least 1000 samples");
    }
    if n == 0 || !(a >= 0.0) {
        return domain("need N >= 1 and A >= 0");
    }
    let pts = sample_points(bx, sampler, n_samples, seed);
    let flags: Vec<Result<bool>> = pts
        .par_iter()
        .map(|x| Ok(a == 0.0 || weyl_sum_fast(x, n)?.norm() >= a))
        .collect();
    let mut hits = 0u64;
    for f in flags {
        hits += f? as u64;
    }
    let total = pts.len() as u64;
    let vol = bx.delta.powi(bx.dim() as i32);
    let frac = hits as f64 / total as f64;
    let half = match sampler {
        Sampler::Grid => 0.0,
        Sampler::MonteCarlo => 1.96 * (frac * (1.0 - frac) / total as f64).sqrt() * vol,
    };
    Ok(LevelSetEstimate {
        d: bx.dim(),
        n,
        a,
        bx: bx.clone(),
        sampler,
        measure_estimate: frac * vol,
        sample_count: total,
        hits,
        confidence_halfwidth: half,
    })
}

/// delta^2 N^3 A^-6 for d = 2, N^(d^2+1-s(d)) A^(-d^2-1) delta^d for d >= 3.
pub fn levelset_envelope(d: usize, n: u64, a: f64, delta: f64) -> f64 {
    let nf = n as f64;
    let df = d as f64;
    if d == 2 {
        delta * delta * nf.powi(3) * a.powi(-6)
    } else {
        let sd = df * (df + 1.0) / 2.0;
        nf.powf(df * df + 1.0 - sd) * a.powf(-(df * df) - 1.0) * delta.powi(d as i32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelsetRow {
    pub xi: Vec<f64>,
    pub measure: f64,
    pub halfwidth: f64,
    pub hits: u64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelsetBoundReport {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "A")]
    pub a: f64,
    pub delta: f64,
    pub envelope: f64,
    pub slack_exponent: f64,
    pub rows: Vec<LevelsetRow>,
    /// max measured / envelope.
    pub max_ratio: f64,
    /// max_ratio <= N^slack_exponent.
    pub within_slack: bool,
}

/// Compares measured level-set volumes in boxes at random corners with the
/// large-A envelope. Reported, never asserted: the envelope carries N^o(1).
#[allow(clippy::too_many_arguments)]
pub fn check_levelset_bounds(
    d: usize,
    n: u64,
    a: f64,
    delta: f64,
    xi_samples: usize,
    mc_samples: u64,
    slack_exponent: f64,
    seed: u64,
) -> Result<LevelsetBoundReport> {
    if d < 2 {
        return domain("level set bounds need d >= 2");
    }
    let nf = n as f64;
    let (lo_a, lo_delta) = if d == 2 {
        (nf.sqrt(), a / nf)
    } else {
        (nf.powf(1.0 - 1.0 / big_d(d as i64)? as f64), (a / nf).powf(1.0 / d as f64))
    };
    if !(a > lo_a && a <= nf) {
        return domain(format!("A={a} outside the large-value range ({lo_a}, N]"));
    }
    if delta < lo_delta * (1.0 - 1e-12) || delta > 1.0 {
        return domain(format!("delta={delta} below the required {lo_delta}"));
    }
    let envelope = levelset_envelope(d, n, a, delta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(xi_samples);
    for i in 0..xi_samples {
        let xi: Vec<f64> = (0..d).map(|_| rng.gen()).collect();
        let bx = BoxSpec::new(TorusPoint::new(xi.clone())?, delta)?;
        let est = level_set_measure(&bx, a, n, Sampler::MonteCarlo, mc_samples, seed ^ (i as u64 + 1))?;
        rows.push(LevelsetRow {
            xi,
            measure: est.measure_estimate,
            halfwidth: est.confidence_halfwidth,
            hits: est.hits,
            ratio: est.measure_estimate / envelope,
        });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(LevelsetBoundReport {
        d,
        n,
        a,
        delta,
        envelope,
        slack_exponent,
        max_ratio,
        within_slack: max_ratio <= nf.powf(slack_exponent),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_thresholds() {
        let bx = BoxSpec::new(TorusPoint::new(vec![0.2, 0.7]).unwrap(), 0.3).unwrap();
        let all = level_set_measure(&bx, 0.0, 50, Sampler::MonteCarlo, 1000, 1).unwrap();
        assert!((all.measure_estimate - 0.09).abs() < 1e-15);
        let none = level_set_measure(&bx, 50.5, 50, Sampler::Grid, 1000, 1).unwrap();
        assert_eq!(none.measure_estimate, 0.0);
        assert!(level_set_measure(&bx, 1.0, 50, Sampler::Grid, 10, 1).is_err());
    }

    #[test]
    fn monotone_in_a() {
        let bx = BoxSpec::origin(2, 1.0).unwrap();
        let mut last = f64::INFINITY;
        for a in [0.0, 2.0, 5.0, 10.0, 20.0] {
            let e = level_set_measure(&bx, a, 64, Sampler::MonteCarlo, 4000, 9).unwrap();
            assert!(e.measure_estimate <= last);
            last = e.measure_estimate;
        }
    }

    #[test]
    fn positive_proportion_at_sqrt_n() {
        let bx = BoxSpec::origin(2, 1.0).unwrap();
        let a = 0.5 * 256f64.sqrt();
        let e1 = level_set_measure(&bx, a, 256, Sampler::MonteCarlo, 4000, 3).unwrap();
        let e2 = level_set_measure(&bx, a, 256, Sampler::MonteCarlo, 8000, 4).unwrap();
        assert!(e1.measure_estimate > 0.3);
        assert!((e1.measure_estimate - e2.measure_estimate).abs() < 3.0 * e1.confidence_halfwidth);
    }

    #[test]
    fn near_top_threshold_is_empty() {
        let n = 512;
        let a = 0.99 * n as f64;
        let r = check_levelset_bounds(2, n, a, 1.0, 2, 2000, 0.1, 1).unwrap();
        assert!(check_levelset_bounds(2, n, a, 0.5, 1, 1000, 0.1, 1).is_err());
        assert!(r.within_slack);
        assert!(r.rows.iter().all(|row| row.measure <= r.envelope));
        assert!(check_levelset_bounds(2, n, 10.0, 0.5, 1, 1000, 0.1, 1).is_err());
    }
}
