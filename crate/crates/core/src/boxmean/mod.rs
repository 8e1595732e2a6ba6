//! Local mean values of |S|^{2s} over boxes xi + [0, delta]^d.

mod grid;
mod kappa;
mod search;
mod witness;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, LabError, Result};
use crate::phase::PhaseEngine;
use crate::summation::{par_sum, BLOCK};
use crate::torus::{TorusPoint, WeightSeq};
use crate::weyl::e;

pub use kappa::{empirical_kappa, fit_line, KappaFit, KappaVariant};
pub use search::{sup_inf_search, Objective, SearchReport};
pub use witness::{
    arc_volume, majorarc_witness, schrodinger_rho, schrodinger_scan, MajorArcReport, SchrodingerReport,
};

/// The box xi + [0, delta]^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub xi: TorusPoint,
    pub delta: f64,
}

impl BoxSpec {
    pub fn new(xi: TorusPoint, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return domain(format!("delta={delta} outside (0,1]"));
        }
        Ok(BoxSpec { xi, delta })
    }

    /// Corner at the origin.
    pub fn origin(d: usize, delta: f64) -> Result<Self> {
        BoxSpec::new(TorusPoint::zero(d), delta)
    }

    pub fn dim(&self) -> usize {
        self.xi.dim()
    }

    pub fn is_full_torus(&self) -> bool {
        self.delta == 1.0 && self.xi.coords().iter().all(|&c| c == 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    ExactTorus,
    MidpointGrid,
    Qmc,
}

impl Scheme {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exact-torus" | "exact" => Ok(Scheme::ExactTorus),
            "midpoint-grid" | "midpoint" | "grid" => Ok(Scheme::MidpointGrid),
            "qmc" => Ok(Scheme::Qmc),
            _ => Err(LabError::Unknown(format!("quadrature mode '{s}'"))),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Scheme::ExactTorus => "exact-torus",
            Scheme::MidpointGrid => "midpoint-grid",
            Scheme::Qmc => "qmc",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanValueEstimate {
    pub value: f64,
    /// Rounding-level bound in exact-torus mode, a Lipschitz bound when
    /// `rigorous`, otherwise the observed refinement difference.
    pub error_bound: f64,
    pub scheme: Scheme,
    /// Per-axis node counts, or a single sample count for qmc.
    pub resolution: Vec<u64>,
    pub rigorous: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    pub mode: Scheme,
    /// Relative tolerance.
    pub tol: f64,
    /// Cap on node count times N, the number of inner-loop terms.
    pub work_budget: u128,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            mode: Scheme::MidpointGrid,
            tol: 1e-2,
            work_budget: 1 << 31,
        }
    }
}

impl QuadOptions {
    pub fn with_mode(mode: Scheme, tol: f64) -> Self {
        QuadOptions {
            mode,
            tol,
            ..Default::default()
        }
    }
}

fn weights(a: Option<&WeightSeq>, n: u64) -> Result<Vec<Complex64>> {
    match a {
        None => Ok(vec![Complex64::new(1.0, 0.0); n as usize]),
        Some(w) if (w.len() as u64) < n => {
            domain(format!("weights have {} entries, need {n}", w.len()))
        }
        Some(w) => Ok(w.values()[..n as usize].to_vec()),
    }
}

fn power(s: f64) -> impl Fn(f64) -> f64 + Sync + Copy {
    let integer = s == s.trunc() && s <= 64.0;
    move |v: f64| if integer { v.powi(s as i32) } else { v.powf(s) }
}

fn work(counts: &[u64], n: u64) -> u128 {
    counts.iter().map(|&c| c as u128).product::<u128>() * n as u128
}

/// I_{s,d}(delta, xi; a, N) = integral over the box of |S_d(x; a, N)|^{2s}.
pub fn integrate_box(
    s: f64,
    a: Option<&WeightSeq>,
    bx: &BoxSpec,
    n: u64,
    opts: &QuadOptions,
) -> Result<MeanValueEstimate> {
    if !(s > 0.0 && s.is_finite()) {
        return domain(format!("s={s} must be positive"));
    }
    if !(opts.tol > 0.0) {
        return domain("tolerance must be positive");
    }
    if n == 0 {
        return domain("N must be >= 1");
    }
    let d = bx.dim();
    if d as f64 * (n as f64).log2() > 120.0 {
        return domain(format!("N^d too large for exact phases (N={n}, d={d})"));
    }
    let a = weights(a, n)?;
    match opts.mode {
        Scheme::ExactTorus => exact_torus(s, d, &a, bx, opts),
        Scheme::MidpointGrid => midpoint(s, d, &a, bx, opts),
        Scheme::Qmc => qmc(s, d, &a, bx, opts),
    }
}

fn exact_torus(
    s: f64,
    d: usize,
    a: &[Complex64],
    bx: &BoxSpec,
    opts: &QuadOptions,
) -> Result<MeanValueEstimate> {
    if !bx.is_full_torus() {
        return domain("exact-torus mode needs delta = 1 and xi = 0");
    }
    if s != s.trunc() {
        return domain(format!("exact-torus mode needs integer s, got {s}"));
    }
    let n = a.len() as u64;
    // M_j = 2 s N^j + 1 exceeds the largest frequency of |S|^{2s} on axis j.
    let mut counts = Vec::with_capacity(d);
    for j in 1..=d as u32 {
        let m = (n as u128)
            .checked_pow(j)
            .and_then(|p| p.checked_mul(2 * s as u128))
            .map(|p| p + 1)
            .filter(|&m| m < u64::MAX as u128);
        match m {
            Some(m) => counts.push(m as u64),
            None => return Err(LabError::Overflow("exact-torus node count".into())),
        }
    }
    let needed = work(&counts, n);
    if needed > opts.work_budget {
        return Err(LabError::Budget {
            what: "exact-torus grid".into(),
            needed,
            budget: opts.work_budget,
        });
    }
    let tables: Vec<_> = counts
        .iter()
        .enumerate()
        .map(|(j, &m)| grid::torus_axis(m, j + 1, n))
        .collect();
    let nodes: f64 = counts.iter().map(|&c| c as f64).product();
    let value = grid::grid_sum(&tables, a, power(s)) / nodes;
    let l1: f64 = a.iter().map(|v| v.norm()).sum();
    let eps = f64::EPSILON * 4.0 * s * (d as f64 + (nodes * n as f64).log2());
    Ok(MeanValueEstimate {
        value,
        error_bound: l1.powf(2.0 * s) * eps,
        scheme: Scheme::ExactTorus,
        resolution: counts,
        rigorous: true,
    })
}

fn midpoint_value(s: f64, a: &[Complex64], bx: &BoxSpec, counts: &[u64]) -> f64 {
    let n = a.len() as u64;
    let tables: Vec<_> = counts
        .iter()
        .enumerate()
        .map(|(j, &m)| grid::midpoint_axis(bx.xi.coords()[j], bx.delta, m as usize, j + 1, n))
        .collect();
    let cell: f64 = counts.iter().map(|&c| bx.delta / c as f64).product();
    grid::grid_sum(&tables, a, power(s)) * cell
}

/// Midpoint rule. The per-axis counts first follow the oscillation scale of
/// the integrand. If the Lipschitz counts for the requested accuracy fit in
/// the budget they are used instead and the result is rigorous; otherwise
/// the grid is refined by doubling until a halving comparison meets the
/// tolerance.
fn midpoint(
    s: f64,
    d: usize,
    a: &[Complex64],
    bx: &BoxSpec,
    opts: &QuadOptions,
) -> Result<MeanValueEstimate> {
    let n = a.len() as u64;
    let delta = bx.delta;
    let ppc = (std::f64::consts::TAU / (24.0 * opts.tol).sqrt()).max(8.0);
    let mut counts: Vec<u64> = (1..=d as i32)
        .map(|j| {
            let k = s * ((n as f64).powi(j) - 1.0);
            let m = (ppc * k * delta).ceil().max(4.0) as u64;
            m + m % 2
        })
        .collect();
    let needed = work(&counts, n);
    if needed > opts.work_budget {
        return Err(LabError::Budget {
            what: "midpoint grid".into(),
            needed,
            budget: opts.work_budget,
        });
    }
    let fine = midpoint_value(s, a, bx, &counts);

    // Lipschitz constants of |S|^{2s} along each axis.
    let l1: f64 = a.iter().map(|v| v.norm()).sum();
    let lip: Vec<f64> = (1..=d as i32)
        .map(|j| {
            let m: f64 = a
                .iter()
                .enumerate()
                .map(|(i, v)| v.norm() * ((i + 1) as f64).powi(j))
                .sum();
            2.0 * s * l1.powf(2.0 * s - 1.0) * std::f64::consts::TAU * m
        })
        .collect();
    let target = opts.tol * fine;
    if target > 0.0 {
        let vol = delta.powi(d as i32);
        let rig: Vec<u64> = lip
            .iter()
            .map(|l| (d as f64 * l * delta * vol / (4.0 * target)).ceil().max(1.0))
            .map(|m| if m > 1e18 { u64::MAX } else { m as u64 })
            .collect();
        if rig.iter().all(|&m| m < u64::MAX) && work(&rig, n) <= opts.work_budget {
            let counts: Vec<u64> = rig.iter().zip(&counts).map(|(r, c)| *r.max(c)).collect();
            let value = midpoint_value(s, a, bx, &counts);
            let bound: f64 = lip
                .iter()
                .zip(&counts)
                .map(|(l, &m)| vol * l * delta / (4.0 * m as f64))
                .sum();
            return Ok(MeanValueEstimate {
                value,
                error_bound: bound,
                scheme: Scheme::MidpointGrid,
                resolution: counts,
                rigorous: true,
            });
        }
    }

    let mut value = fine;
    let half: Vec<u64> = counts.iter().map(|&m| m / 2).collect();
    let mut err = (fine - midpoint_value(s, a, bx, &half)).abs() / 3.0;
    for _ in 0..6 {
        if err <= opts.tol * value {
            break;
        }
        let next: Vec<u64> = counts.iter().map(|&m| 2 * m).collect();
        if work(&next, n) > opts.work_budget {
            break;
        }
        let v = midpoint_value(s, a, bx, &next);
        err = (v - value).abs() / 3.0;
        value = v;
        counts = next;
    }
    Ok(MeanValueEstimate {
        value,
        error_bound: err,
        scheme: Scheme::MidpointGrid,
        resolution: counts,
        rigorous: false,
    })
}

/// Additive-recurrence (R_d) sequence: alpha_j = phi^-j with phi^{d+1} = phi + 1.
fn kronecker_alpha(d: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    (1..=d as i32).map(|j| phi.powi(-j).fract()).collect()
}

fn qmc(
    s: f64,
    d: usize,
    a: &[Complex64],
    bx: &BoxSpec,
    opts: &QuadOptions,
) -> Result<MeanValueEstimate> {
    let n = a.len() as u64;
    let alpha = kronecker_alpha(d);
    let f = power(s);
    let xi = bx.xi.coords().to_vec();
    let delta = bx.delta;
    let unit = a.iter().all(|v| *v == Complex64::new(1.0, 0.0));
    let eval = |k: usize| -> f64 {
        let x: Vec<f64> = (0..d)
            .map(|j| {
                let u = (0.5 + k as f64 * alpha[j]).fract();
                let c = xi[j] + delta * u;
                c - c.floor()
            })
            .collect();
        let eng = PhaseEngine::new(&x);
        let sum: Complex64 = if unit {
            (1..=n).map(|i| e(eng.phase(i))).sum()
        } else {
            (1..=n).map(|i| a[i as usize - 1] * e(eng.phase(i))).sum()
        };
        f(sum.norm_sqr())
    };
    let mut samples = BLOCK as u64 * 4;
    if samples as u128 * n as u128 > opts.work_budget {
        return Err(LabError::Budget {
            what: "qmc samples".into(),
            needed: samples as u128 * n as u128,
            budget: opts.work_budget,
        });
    }
    let vol = delta.powi(d as i32);
    let mut total = par_sum(samples as usize, eval);
    let mut value = total / samples as f64 * vol;
    let mut err = f64::INFINITY;
    loop {
        let next = samples * 2;
        if next as u128 * n as u128 > opts.work_budget {
            break;
        }
        let lo = samples as usize;
        let extra = par_sum(samples as usize, |i| eval(lo + i));
        total += extra;
        let v = total / next as f64 * vol;
        err = (v - value).abs();
        value = v;
        samples = next;
        if err <= opts.tol * value {
            break;
        }
    }
    Ok(MeanValueEstimate {
        value,
        error_bound: err,
        scheme: Scheme::Qmc,
        resolution: vec![samples],
        rigorous: false,
    })
}

/// The twisted weights a_n e(xi . (n, ..., n^d)), which move the box corner
/// from xi to the origin.
pub fn shifted_to_origin(a: Option<&WeightSeq>, xi: &TorusPoint, n: u64) -> Result<WeightSeq> {
    let a = weights(a, n)?;
    let eng = PhaseEngine::new(xi.coords());
    eng.check_range(n)?;
    Ok(WeightSeq::new(
        a.iter()
            .enumerate()
            .map(|(i, v)| v * e(eng.phase(i as u64 + 1)))
            .collect(),
    ))
}

/// Both sides of I^{(0)}(delta; a, N) <= delta^d times the box count, for
/// weights bounded by 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BridgeReport {
    pub s: u32,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub delta: f64,
    pub integral: MeanValueEstimate,
    pub box_count: u128,
    pub rhs: f64,
    pub holds: bool,
}

pub fn box_count_bridge(
    s: u32,
    d: usize,
    delta: f64,
    n: u64,
    a: Option<&WeightSeq>,
    quad: &QuadOptions,
    count: &crate::count::CountOptions,
) -> Result<BridgeReport> {
    if let Some(w) = a {
        if w.linf() > 1.0 {
            return domain("weights must satisfy |a_n| <= 1");
        }
    }
    let integral = integrate_box(s as f64, a, &BoxSpec::origin(d, delta)?, n, quad)?;
    let box_count = crate::count::count_j_box(s, d, delta, n, count)?.count;
    let rhs = delta.powi(d as i32) * box_count as f64;
    let holds = integral.value - integral.error_bound <= rhs;
    Ok(BridgeReport {
        s,
        d,
        n,
        delta,
        integral,
        box_count,
        rhs,
        holds,
    })
}
