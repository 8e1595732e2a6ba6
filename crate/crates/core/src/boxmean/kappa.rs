//! Growth exponents of box mean values along a ladder of N.

use serde::{Deserialize, Serialize};

use super::{integrate_box, sup_inf_search, BoxSpec, Objective, QuadOptions};
use crate::count::{count_j, CountOptions};
use crate::error::{domain, LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaVariant {
    Origin,
    Sup,
    Inf,
}

impl KappaVariant {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "origin" => Ok(KappaVariant::Origin),
            "sup" => Ok(KappaVariant::Sup),
            "inf" => Ok(KappaVariant::Inf),
            _ => Err(LabError::Unknown(format!("kappa variant '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaFit {
    pub s: f64,
    pub d: usize,
    pub tau: f64,
    pub variant: KappaVariant,
    #[serde(rename = "N_list")]
    pub n_list: Vec<u64>,
    pub values: Vec<f64>,
    /// Least-squares slope of log I against log N.
    pub slope: f64,
    pub intercept: f64,
    /// Largest |log I - fit| over the ladder.
    pub residual: f64,
    /// True when every value came from exact counting.
    pub exact: bool,
}

/// Least-squares line through (x, y); returns (slope, intercept, max residual).
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let res = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).abs())
        .fold(0.0, f64::max);
    (slope, intercept, res)
}

fn check_ladder(n_list: &[u64]) -> Result<()> {
    if n_list.len() < 4 {
        return domain("N ladder needs at least 4 entries");
    }
    for w in n_list.windows(2) {
        if (w[1] as f64) < 1.2 * w[0] as f64 {
            return domain(format!(
                "N ladder must grow by a factor >= 1.2 per step ({} -> {})",
                w[0], w[1]
            ));
        }
    }
    if n_list[0] < 1 {
        return domain("N must be >= 1");
    }
    Ok(())
}

/// Fits kappa from I(N^-tau; N) over the ladder. The origin variant at
/// tau = 0 with integer s is exact counting; everything else is quadrature,
/// with sup/inf going through the heuristic box search.
#[allow(clippy::too_many_arguments)]
pub fn empirical_kappa(
    s: f64,
    d: usize,
    tau: f64,
    n_list: &[u64],
    variant: KappaVariant,
    quad: &QuadOptions,
    search_budget: usize,
    count: &CountOptions,
) -> Result<KappaFit> {
    check_ladder(n_list)?;
    if !(tau >= 0.0 && tau.is_finite()) {
        return domain(format!("tau={tau} must be >= 0"));
    }
    if d == 0 {
        return domain("d must be >= 1");
    }
    let exact = variant == KappaVariant::Origin && tau == 0.0 && s == s.trunc() && s >= 1.0;
    let mut values = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let delta = (n as f64).powf(-tau);
        let v = if exact {
            count_j(s as u32, d, n, count)?.count as f64
        } else {
            match variant {
                KappaVariant::Origin => {
                    integrate_box(s, None, &BoxSpec::origin(d, delta)?, n, quad)?.value
                }
                KappaVariant::Sup => {
                    sup_inf_search(s, d, n, delta, Objective::Sup, search_budget, quad)?
                        .estimate
                        .value
                }
                KappaVariant::Inf => {
                    sup_inf_search(s, d, n, delta, Objective::Inf, search_budget, quad)?
                        .estimate
                        .value
                }
            }
        };
        if !(v > 0.0) {
            return domain(format!("non-positive mean value at N={n}"));
        }
        values.push(v);
    }
    let lx: Vec<f64> = n_list.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (slope, intercept, residual) = fit_line(&lx, &ly);
    Ok(KappaFit {
        s,
        d,
        tau,
        variant,
        n_list: n_list.to_vec(),
        values,
        slope,
        intercept,
        residual,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(s: f64, d: usize, tau: f64, ns: &[u64]) -> KappaFit {
        empirical_kappa(
            s,
            d,
            tau,
            ns,
            KappaVariant::Origin,
            &QuadOptions::default(),
            64,
            &CountOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn parseval_slope() {
        let f = run(1.0, 1, 0.0, &[16, 32, 64, 128]);
        assert!(f.exact);
        assert!((f.slope - 1.0).abs() < 1e-9);
        assert!(f.residual < 1e-9);
    }

    #[test]
    fn quadratic_slope() {
        let f = run(2.0, 2, 0.0, &[64, 128, 256, 512]);
        assert!((f.slope - 2.0).abs() < 0.15, "{}", f.slope);
    }

    #[test]
    fn ladder_checks() {
        let q = QuadOptions::default();
        let c = CountOptions::default();
        let o = KappaVariant::Origin;
        assert!(empirical_kappa(1.0, 1, 0.0, &[4, 8, 16], o, &q, 8, &c).is_err());
        assert!(empirical_kappa(1.0, 1, 0.0, &[4, 8, 8, 16], o, &q, 8, &c).is_err());
        assert!(empirical_kappa(1.0, 1, -1.0, &[4, 8, 16, 32], o, &q, 8, &c).is_err());
    }

    #[test]
    fn line_fit() {
        let (a, b, r) = fit_line(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((a - 2.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12 && r < 1e-12);
    }
}
