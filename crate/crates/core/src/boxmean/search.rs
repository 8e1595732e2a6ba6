//! Heuristic search for the box corner maximising or minimising the mean
//! value. Nothing here is a global guarantee.

use serde::{Deserialize, Serialize};

use super::{integrate_box, BoxSpec, MeanValueEstimate, QuadOptions, Scheme};
use crate::error::{domain, LabError, Result};
use crate::torus::TorusPoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    Sup,
    Inf,
}

impl Objective {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sup" => Ok(Objective::Sup),
            "inf" => Ok(Objective::Inf),
            _ => Err(LabError::Unknown(format!("objective '{s}'"))),
        }
    }

    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Objective::Sup => a > b,
            Objective::Inf => a < b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub objective: Objective,
    pub best: BoxSpec,
    pub estimate: MeanValueEstimate,
    pub evaluations: usize,
    pub budget_exhausted: bool,
    /// Always true: the search has no global guarantee.
    pub heuristic: bool,
}

struct Evaluator {
    s: f64,
    n: u64,
    delta: f64,
    quad: QuadOptions,
    used: usize,
    budget: usize,
}

impl Evaluator {
    fn eval(&mut self, xi: &[f64]) -> Result<Option<f64>> {
        if self.used >= self.budget {
            return Ok(None);
        }
        self.used += 1;
        let b = BoxSpec::new(TorusPoint::new(xi.to_vec())?, self.delta)?;
        Ok(Some(integrate_box(self.s, None, &b, self.n, &self.quad)?.value))
    }
}

/// Multistart on the lattice of step delta/2 (thinned to half the budget),
/// then coordinate descent with a halving step from the best three starts.
pub fn sup_inf_search(
    s: f64,
    d: usize,
    n: u64,
    delta: f64,
    objective: Objective,
    budget: usize,
    quad: &QuadOptions,
) -> Result<SearchReport> {
    if budget == 0 {
        return domain("search budget must be >= 1 evaluation");
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return domain(format!("delta={delta} outside (0,1]"));
    }
    let cheap = QuadOptions {
        mode: if quad.mode == Scheme::ExactTorus {
            Scheme::MidpointGrid
        } else {
            quad.mode
        },
        tol: quad.tol.max(0.05),
        ..*quad
    };
    let mut ev = Evaluator {
        s,
        n,
        delta,
        quad: cheap,
        used: 0,
        budget,
    };

    let per_axis = ((2.0 / delta).ceil() as u64).max(1);
    let total = (per_axis as f64).powi(d as i32);
    let starts_cap = (budget / 2).max(1) as f64;
    let stride = (total / starts_cap).ceil().max(1.0) as u64;
    let mut scored: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut idx: u64 = 0;
    while (idx as f64) < total {
        let mut rem = idx;
        let xi: Vec<f64> = (0..d)
            .map(|_| {
                let c = rem % per_axis;
                rem /= per_axis;
                (c as f64 * delta / 2.0).fract()
            })
            .collect();
        match ev.eval(&xi)? {
            Some(v) => scored.push((v, xi)),
            None => break,
        }
        idx += stride;
    }
    scored.sort_by(|a, b| {
        let o = a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal);
        if objective == Objective::Sup {
            o.reverse()
        } else {
            o
        }
    });

    let (mut best_v, mut best_xi) = scored[0].clone();
    for (v0, x0) in scored.into_iter().take(3) {
        let (mut v, mut x) = (v0, x0);
        let mut step = delta / 4.0;
        'descent: while step >= delta / 64.0 {
            let mut moved = false;
            for j in 0..d {
                for sign in [1.0, -1.0] {
                    let mut y = x.clone();
                    let c = y[j] + sign * step;
                    y[j] = c - c.floor();
                    match ev.eval(&y)? {
                        Some(w) if objective.better(w, v) => {
                            v = w;
                            x = y;
                            moved = true;
                        }
                        Some(_) => {}
                        None => break 'descent,
                    }
                }
            }
            if !moved {
                step /= 2.0;
            }
        }
        if objective.better(v, best_v) {
            best_v = v;
            best_xi = x;
        }
    }

    let exhausted = ev.used >= budget;
    let best = BoxSpec::new(TorusPoint::new(best_xi)?, delta)?;
    let fine = QuadOptions {
        mode: cheap.mode,
        ..*quad
    };
    let estimate = integrate_box(s, None, &best, n, &fine)?;
    Ok(SearchReport {
        objective,
        best,
        estimate,
        evaluations: ev.used + 1,
        budget_exhausted: exhausted,
        heuristic: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sup_dominates_probes_and_inf() {
        let q = QuadOptions::default();
        let sup = sup_inf_search(2.0, 2, 8, 0.3, Objective::Sup, 200, &q).unwrap();
        let inf = sup_inf_search(2.0, 2, 8, 0.3, Objective::Inf, 200, &q).unwrap();
        assert!(sup.heuristic);
        assert!(sup.estimate.value >= inf.estimate.value);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let probe = QuadOptions { tol: 1e-2, ..q };
        for _ in 0..100 {
            let xi = TorusPoint::new(vec![rng.gen(), rng.gen()]).unwrap();
            let v = integrate_box(2.0, None, &BoxSpec::new(xi, 0.3).unwrap(), 8, &probe).unwrap();
            assert!(sup.estimate.value >= v.value * (1.0 - 0.02), "{} < {}", sup.estimate.value, v.value);
        }
    }

    #[test]
    fn budget_flag() {
        let r = sup_inf_search(1.0, 1, 4, 0.1, Objective::Sup, 3, &QuadOptions::default()).unwrap();
        assert!(r.budget_exhausted);
        assert!(sup_inf_search(1.0, 1, 4, 0.1, Objective::Sup, 0, &QuadOptions::default()).is_err());
    }

    #[test]
    fn large_box_sup_near_origin_value() {
        let q = QuadOptions::default();
        let r = sup_inf_search(2.0, 2, 16, 0.99, Objective::Sup, 60, &q).unwrap();
        let origin = integrate_box(2.0, None, &BoxSpec::origin(2, 0.99).unwrap(), 16, &q).unwrap();
        let rel = (r.estimate.value - origin.value).abs() / origin.value;
        assert!(rel <= 0.05, "sup {} origin {}", r.estimate.value, origin.value);
    }
}
