//! One function per subcommand. Each validates its flags, calls into the
//! library and returns the payload, an optional table and a summary line.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use serde::Serialize;
use serde_json::json;
use weylbox::acceptance::{self, Outcome, Suite};
use weylbox::arc::{
    check_levelset_bounds, detect_rational_structure, gauss_continuity_check, level_set_measure,
    lower_bound_witness, monomial_curve_density, prime_field_scan, ArcConstants, Sampler,
};
use weylbox::boxmean::{
    empirical_kappa, integrate_box, sup_inf_search, BoxSpec, KappaVariant, Objective, QuadOptions,
    Scheme,
};
use weylbox::cache::{CacheKey, CountCache};
use weylbox::count::{count_j, count_j_box, count_j_inhom, CountOptions, DEFAULT_MEM_BUDGET};
use weylbox::curve::curves_to_csv;
use weylbox::weyl::weyl_sum_fast;
use weylbox::{
    bound_curve, figure_polylines, BoundParams, Figure, LabError, RationalValue, Source, TorusPoint,
};

use crate::output::{f, join, to_value, Csv, Output};
use crate::{Cli, Command};

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    bail!(LabError::Domain(msg.into()))
}

fn count_opts(cli: &Cli) -> CountOptions {
    CountOptions {
        mem_budget: cli.global.mem_budget.unwrap_or(DEFAULT_MEM_BUDGET),
    }
}

fn constants(cli: &Cli) -> Result<ArcConstants> {
    let mut k = ArcConstants::default();
    for kv in &cli.global.consts {
        let Some((name, val)) = kv.split_once('=') else {
            return usage(format!("--const expects name=value, got '{kv}'"));
        };
        let v: f64 = match val.trim().parse() {
            Ok(v) => v,
            Err(_) => return usage(format!("--const {name}: '{val}' is not a number")),
        };
        k.set(name.trim(), v)?;
    }
    Ok(k)
}

/// The xi argument, or the origin in dimension d.
fn corner(xi: &[f64], d: usize) -> Result<TorusPoint> {
    if xi.is_empty() {
        return Ok(TorusPoint::zero(d));
    }
    if xi.len() != d {
        return usage(format!("--xi has {} coordinates, expected d={d}", xi.len()));
    }
    Ok(TorusPoint::new(xi.to_vec())?)
}

fn centred(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

pub fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Count(a) => count(cli, a),
        Command::Integrate(a) => integrate(a),
        Command::Kappa(a) => kappa(cli, a),
        Command::Bounds(a) => bounds(a),
        Command::Plotdata(a) => plotdata(a),
        Command::Levelset(a) => levelset(cli, a),
        Command::Structure(a) => structure(cli, a),
        Command::Witness(a) => witness(cli, a),
        Command::Fieldscan(a) => fieldscan(cli, a),
        Command::Verify(a) => verify(a),
    }
}

#[derive(Args, Serialize, Debug)]
pub struct CountArgs {
    #[arg(long)]
    pub s: u32,
    #[arg(long)]
    pub d: usize,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u64,
    /// Right-hand side h_1..h_d of the inhomogeneous system
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "delta")]
    pub h: Vec<i128>,
    /// Box side; counts deviations within 1/delta
    #[arg(long)]
    pub delta: Option<f64>,
    /// Directory of the persistent count cache
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Recompute even on a cache hit and check the two agree
    #[arg(long)]
    pub recompute: bool,
}

fn count(cli: &Cli, a: &CountArgs) -> Result<Output> {
    let opts = count_opts(cli);
    let (key, label) = if !a.h.is_empty() {
        (
            CacheKey::inhomogeneous(a.s, a.d, a.n, &a.h),
            format!("J_{{{},{}}}(h=[{}]; {})", a.s, a.d, join(&a.h, ","), a.n),
        )
    } else if let Some(delta) = a.delta {
        (
            CacheKey::boxed(a.s, a.d, a.n, delta),
            format!("box count s={} d={} delta={} N={}", a.s, a.d, delta, a.n),
        )
    } else {
        (
            CacheKey::homogeneous(a.s, a.d, a.n),
            format!("J_{{{},{}}}({})", a.s, a.d, a.n),
        )
    };
    let compute = || -> weylbox::Result<u128> {
        let r = if !a.h.is_empty() {
            count_j_inhom(a.s, a.d, &a.h, a.n, &opts)?
        } else if let Some(delta) = a.delta {
            count_j_box(a.s, a.d, delta, a.n, &opts)?
        } else {
            count_j(a.s, a.d, a.n, &opts)?
        };
        Ok(r.count)
    };
    let (value, cached) = match &a.cache {
        Some(dir) => {
            let mut c = CountCache::open(dir)?;
            let (v, hit) = c.get_or_compute(key.clone(), compute)?;
            if hit && a.recompute {
                c.insert(key.clone(), compute()?)?;
            }
            (v, hit)
        }
        None => (compute()?, false),
    };
    let mut csv = Csv::new(&["s", "d", "N", "kind", "h_or_delta", "count"]);
    csv.row(vec![
        a.s.to_string(),
        a.d.to_string(),
        a.n.to_string(),
        key.kind.clone(),
        key.arg.clone(),
        value.to_string(),
    ]);
    Ok(Output {
        payload: json!({
            "s": a.s, "d": a.d, "N": a.n, "kind": key.kind, "h_or_delta": key.arg,
            "count": value, "cached": cached,
        }),
        csv: Some(csv),
        summary: format!("{label} = {value}{}", if cached { " (cached)" } else { "" }),
    })
}

#[derive(Args, Serialize, Debug)]
pub struct QuadArgs {
    /// exact-torus, midpoint-grid or qmc
    #[arg(long, default_value = "midpoint-grid")]
    pub mode: String,
    /// Relative tolerance
    #[arg(long, default_value_t = 1e-2)]
    pub tol: f64,
    /// Cap on nodes times N
    #[arg(long = "work-budget")]
    pub work_budget: Option<u128>,
}

impl QuadArgs {
    fn options(&self) -> Result<QuadOptions> {
        let mut q = QuadOptions::with_mode(Scheme::parse(&self.mode)?, self.tol);
        if let Some(w) = self.work_budget {
            q.work_budget = w;
        }
        Ok(q)
    }
}

#[derive(Args, Serialize, Debug)]
pub struct IntegrateArgs {
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub d: usize,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u64,
    #[arg(long)]
    pub delta: f64,
    /// Box corner (defaults to the origin)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub xi: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
    /// Search the box position instead: sup or inf
    #[arg(long)]
    pub search: Option<String>,
    /// Box evaluations allowed for --search
    #[arg(long = "search-budget", default_value_t = 200)]
    pub search_budget: usize,
}

fn integrate(a: &IntegrateArgs) -> Result<Output> {
    let quad = a.quad.options()?;
    if let Some(obj) = &a.search {
        let r = sup_inf_search(a.s, a.d, a.n, a.delta, Objective::parse(obj)?, a.search_budget, &quad)?;
        let mut csv = Csv::new(&["objective", "xi", "value", "error_bound", "evaluations"]);
        csv.row(vec![
            obj.clone(),
            join(r.best.xi.coords(), ";"),
            f(r.estimate.value),
            f(r.estimate.error_bound),
            r.evaluations.to_string(),
        ]);
        return Ok(Output {
            summary: format!(
                "{obj} over boxes of side {} = {} at xi = [{}] ({} evaluations)",
                a.delta,
                f(r.estimate.value),
                join(r.best.xi.coords(), ", "),
                r.evaluations
            ),
            payload: to_value(&r)?,
            csv: Some(csv),
        });
    }
    let bx = BoxSpec::new(corner(&a.xi, a.d)?, a.delta)?;
    let est = integrate_box(a.s, None, &bx, a.n, &quad)?;
    let mut csv = Csv::new(&["s", "d", "N", "delta", "xi", "mode", "value", "error_bound", "rigorous"]);
    csv.row(vec![
        f(a.s),
        a.d.to_string(),
        a.n.to_string(),
        f(a.delta),
        join(bx.xi.coords(), ";"),
        est.scheme.id().to_string(),
        f(est.value),
        f(est.error_bound),
        est.rigorous.to_string(),
    ]);
    Ok(Output {
        summary: format!(
            "I = {} +- {} ({}, resolution {:?})",
            f(est.value),
            f(est.error_bound),
            est.scheme.id(),
            est.resolution
        ),
        payload: json!({"box": bx, "s": a.s, "N": a.n, "estimate": est}),
        csv: Some(csv),
    })
}

#[derive(Args, Serialize, Debug)]
pub struct KappaArgs {
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long = "N-ladder", value_delimiter = ',', required = true)]
    #[serde(rename = "N-ladder")]
    pub n_ladder: Vec<u64>,
    /// origin, sup or inf
    #[arg(long, default_value = "origin")]
    pub variant: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
    #[arg(long = "search-budget", default_value_t = 100)]
    pub search_budget: usize,
}

fn kappa(cli: &Cli, a: &KappaArgs) -> Result<Output> {
    let fit = empirical_kappa(
        a.s,
        a.d,
        a.tau,
        &a.n_ladder,
        KappaVariant::parse(&a.variant)?,
        &a.quad.options()?,
        a.search_budget,
        &count_opts(cli),
    )?;
    let mut csv = Csv::new(&["N", "value", "log_N", "log_value"]);
    for (n, v) in fit.n_list.iter().zip(&fit.values) {
        csv.row(vec![n.to_string(), f(*v), f((*n as f64).ln()), f(v.ln())]);
    }
    Ok(Output {
        summary: format!(
            "kappa_{{{},{}}}({}) ~ {:.4} (max residual {:.3}, {})",
            a.s,
            a.d,
            a.tau,
            fit.slope,
            fit.residual,
            if fit.exact { "exact counts" } else { "quadrature" }
        ),
        payload: to_value(&fit)?,
        csv: Some(csv),
    })
}

#[derive(Args, Serialize, Debug)]
pub struct BoundsArgs {
    /// Bound source identifier or alias (e.g. cor3.6, D-L, trivial)
    #[arg(long)]
    pub source: String,
    /// Moment parameter, integer or rational such as 5/2
    #[arg(long)]
    pub s: String,
    #[arg(long)]
    pub d: i64,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub k: Option<i64>,
}

fn rational(name: &str, v: &str) -> Result<RationalValue> {
    match v.parse() {
        Ok(r) => Ok(r),
        Err(_) => usage(format!("--{name}: '{v}' is not a rational number")),
    }
}

fn bounds(a: &BoundsArgs) -> Result<Output> {
    let params = BoundParams {
        alpha: a.alpha.as_deref().map(|v| rational("alpha", v)).transpose()?,
        k: a.k,
    };
    let curve = bound_curve(Source::parse(&a.source)?, rational("s", &a.s)?, a.d, params)?;
    let text = curves_to_csv(std::slice::from_ref(&curve));
    let csv = parse_csv(&text);
    let desc = curve.describe();
    Ok(Output {
        summary: if desc.is_empty() {
            format!("{}: no claim at these parameters", curve.label)
        } else {
            format!("{}: {}", curve.label, desc.join("; "))
        },
        payload: to_value(&curve)?,
        csv: Some(csv),
    })
}

/// Re-reads a rendered table so that it goes through the common writer.
fn parse_csv(text: &str) -> Csv {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap_or("").split(',').map(String::from).collect();
    let rows = lines.map(split_csv).collect();
    Csv { header, rows }
}

fn split_csv(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            ('"', _) => quoted = !quoted,
            (',', false) => out.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    out.push(cur);
    out
}

#[derive(Args, Serialize, Debug)]
pub struct PlotArgs {
    /// 3.1, 3.2 or 3.3
    #[arg(long)]
    pub figure: String,
}

fn plotdata(a: &PlotArgs) -> Result<Output> {
    let fig = Figure::parse(&a.figure)?;
    let curves = figure_polylines(fig)?;
    let labels: Vec<&str> = curves.iter().map(|c| c.label.as_str()).collect();
    Ok(Output {
        summary: format!("figure {}: {}", fig.id(), labels.join(" | ")),
        csv: Some(parse_csv(&curves_to_csv(&curves))),
        payload: json!({"figure": fig.id(), "curves": curves}),
    })
}

#[derive(Args, Serialize, Debug)]
pub struct LevelsetArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u64,
    /// Threshold on |S|
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub xi: Vec<f64>,
    /// grid or monte-carlo
    #[arg(long, default_value = "monte-carlo")]
    pub sampler: String,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Compare boxes at random corners with the large-value envelope
    #[arg(long)]
    pub check: bool,
    #[arg(long = "xi-samples", default_value_t = 8)]
    pub xi_samples: usize,
    /// Allowed excess N^slack over the envelope
    #[arg(long, default_value_t = 0.15)]
    pub slack: f64,
}

fn levelset(cli: &Cli, a: &LevelsetArgs) -> Result<Output> {
    if a.check {
        let r = check_levelset_bounds(a.d, a.n, a.a, a.delta, a.xi_samples, a.samples, a.slack, cli.global.seed)?;
        let mut csv = Csv::new(&["xi", "measure", "halfwidth", "hits", "ratio"]);
        for row in &r.rows {
            csv.row(vec![join(&row.xi, ";"), f(row.measure), f(row.halfwidth), row.hits.to_string(), f(row.ratio)]);
        }
        return Ok(Output {
            summary: format!(
                "max measure/envelope = {} ({} N^{})",
                f(r.max_ratio),
                if r.within_slack { "within" } else { "exceeds" },
                a.slack
            ),
            payload: to_value(&r)?,
            csv: Some(csv),
        });
    }
    let bx = BoxSpec::new(corner(&a.xi, a.d)?, a.delta)?;
    let est = level_set_measure(&bx, a.a, a.n, Sampler::parse(&a.sampler)?, a.samples, cli.global.seed)?;
    let mut csv = Csv::new(&["d", "N", "A", "delta", "xi", "measure", "halfwidth", "samples", "hits"]);
    csv.row(vec![
        a.d.to_string(),
        a.n.to_string(),
        f(a.a),
        f(a.delta),
        join(bx.xi.coords(), ";"),
        f(est.measure_estimate),
        f(est.confidence_halfwidth),
        est.sample_count.to_string(),
        est.hits.to_string(),
    ]);
    Ok(Output {
        summary: format!(
            "measure {{|S| >= {}}} in box ~ {} +- {}",
            a.a,
            f(est.measure_estimate),
            f(est.confidence_halfwidth)
        ),
        payload: to_value(&est)?,
        csv: Some(csv),
    })
}

#[derive(Args, Serialize, Debug)]
pub struct StructureArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u64,
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a: f64,
    /// The point x_1..x_d
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub x: Vec<f64>,
}

fn structure(cli: &Cli, a: &StructureArgs) -> Result<Output> {
    let x = TorusPoint::new(a.x.clone())?;
    let g: Vec<f64> = x.coords().iter().map(|&v| centred(v)).collect();
    let measured = weyl_sum_fast(&g, a.n)?.norm();
    let r = detect_rational_structure(&x, a.n, a.a, &constants(cli)?)?;
    let mut csv = Csv::new(&["q", "moduli", "numerators", "errors", "envelope"]);
    let summary = match &r.witness {
        Some(w) => {
            csv.row(vec![
                w.q.to_string(),
                join(&w.moduli, ";"),
                join(&w.numerators, ";"),
                join(&w.errors.iter().map(|&e| f(e)).collect::<Vec<_>>(), ";"),
                join(&w.envelope.iter().map(|&e| f(e)).collect::<Vec<_>>(), ";"),
            ]);
            format!("|S| = {measured:.3}; q = {} with numerators [{}]", w.q, join(&w.numerators, ", "))
        }
        None => format!(
            "|S| = {measured:.3}; no rational structure within the envelope{}",
            if r.truncated { " (search truncated)" } else { "" }
        ),
    };
    Ok(Output {
        payload: json!({"measured_abs_s": measured, "report": r}),
        csv: Some(csv),
        summary,
    })
}

#[derive(Args, Serialize, Debug)]
pub struct WitnessArgs {
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub d: usize,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub xi: Vec<f64>,
    /// Index k of the exponent nu(d, k) for d >= 3 (default: the maximiser)
    #[arg(long)]
    pub k: Option<i64>,
    /// Points sampled for the smallest |S|
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

fn witness(cli: &Cli, a: &WitnessArgs) -> Result<Output> {
    let xi = corner(&a.xi, a.d)?;
    let w = lower_bound_witness(a.s, a.n, a.delta, &xi, a.k, a.samples, cli.global.seed, &constants(cli)?)?;
    let mut csv = Csv::new(&["s", "d", "N", "delta", "p", "cells", "volume", "min_abs_s", "bound", "predicted"]);
    csv.row(vec![
        f(a.s),
        a.d.to_string(),
        a.n.to_string(),
        f(a.delta),
        w.p.to_string(),
        w.cells.to_string(),
        f(w.volume),
        f(w.min_abs_s),
        f(w.bound),
        f(w.predicted),
    ]);
    Ok(Output {
        summary: format!(
            "p = {} ({}), {} cells, lower bound {} (predicted scale {})",
            w.p,
            w.regime,
            w.cells,
            f(w.bound),
            f(w.predicted)
        ),
        payload: to_value(&w)?,
        csv: Some(csv),
    })
}

#[derive(Args, Serialize, Debug)]
pub struct FieldscanArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub p: u64,
    /// Threshold |T| >= gamma sqrt(p) (defaults to the gamma constant)
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Corner of a sub-box of F_p^d (or of F_p^k with --curve)
    #[arg(long, value_delimiter = ',')]
    pub corner: Vec<u64>,
    /// Side L of the sub-box
    #[arg(long)]
    pub side: Option<u64>,
    /// Count the monomial curve (a_1 t, ..., a_k t^k) in the box instead
    #[arg(long, value_delimiter = ',')]
    pub curve: Vec<u64>,
    /// Sample the quadratic sum near (a/p, b/p) at this N instead
    #[arg(long = "gauss-at", value_delimiter = ',')]
    pub gauss_at: Vec<u64>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

fn fieldscan(cli: &Cli, a: &FieldscanArgs) -> Result<Output> {
    let k = constants(cli)?;
    if !a.gauss_at.is_empty() {
        if a.gauss_at.len() != 2 {
            return usage("--gauss-at expects a,b");
        }
        let Some(n) = a.n else {
            return usage("--gauss-at needs --N");
        };
        let r = gauss_continuity_check(a.p, a.gauss_at[0], a.gauss_at[1], n, a.samples, cli.global.seed, &k)?;
        let mut csv = Csv::new(&["p", "a", "b", "N", "ratio_at_rational", "min_ratio", "max_continuity_ratio"]);
        csv.row(vec![
            a.p.to_string(),
            r.a.to_string(),
            r.b.to_string(),
            n.to_string(),
            f(r.ratio_at_rational),
            f(r.min_ratio),
            f(r.max_continuity_ratio),
        ]);
        return Ok(Output {
            summary: format!(
                "|G| sqrt(p)/N: {:.4} at the rational point, {:.4} minimum nearby",
                r.ratio_at_rational, r.min_ratio
            ),
            payload: to_value(&r)?,
            csv: Some(csv),
        });
    }
    if !a.curve.is_empty() {
        let Some(l) = a.side else {
            return usage("--curve needs --side");
        };
        let r = monomial_curve_density(a.p, &a.curve, l, &a.corner, k.big_c)?;
        let mut csv = Csv::new(&["p", "k", "L", "corner", "count", "bound", "applies"]);
        csv.row(vec![
            a.p.to_string(),
            r.k.to_string(),
            l.to_string(),
            join(&r.corner, ";"),
            r.count.to_string(),
            f(r.bound),
            r.applies.to_string(),
        ]);
        return Ok(Output {
            summary: format!("{} curve points in the box (bound {})", r.count, f(r.bound)),
            payload: to_value(&r)?,
            csv: Some(csv),
        });
    }
    let sub = match (a.corner.is_empty(), a.side) {
        (true, None) => None,
        (false, Some(l)) => Some((a.corner.clone(), l)),
        _ => return usage("--corner and --side go together"),
    };
    let r = prime_field_scan(a.d, a.p, a.gamma.unwrap_or(k.gamma), sub)?;
    let mut csv = Csv::new(&["d", "p", "gamma", "count", "count_nondegenerate", "density", "sub_box_count"]);
    csv.row(vec![
        a.d.to_string(),
        a.p.to_string(),
        f(r.gamma),
        r.count.to_string(),
        r.count_nondegenerate.to_string(),
        f(r.density),
        r.sub_box_count.map(|c| c.to_string()).unwrap_or_default(),
    ]);
    Ok(Output {
        summary: format!(
            "{} of {} points have |T| >= {} sqrt(p) (density {:.4})",
            r.count, r.total, r.gamma, r.density
        ),
        payload: to_value(&r)?,
        csv: Some(csv),
    })
}

#[derive(Args, Serialize, Debug)]
pub struct VerifyArgs {
    /// fast or full
    #[arg(long, default_value = "fast")]
    pub suite: String,
    /// Run only these criteria
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u32>,
}

fn verify(a: &VerifyArgs) -> Result<Output> {
    let suite = Suite::parse(&a.suite)?;
    let ids: Vec<u32> = if a.only.is_empty() {
        acceptance::list()
            .into_iter()
            .filter(|c| suite == Suite::Full || c.3)
            .map(|c| c.0)
            .collect()
    } else {
        a.only.clone()
    };
    let mut outcomes = Vec::new();
    for id in ids {
        let o = acceptance::run(id)?;
        eprintln!("{}", acceptance::format_line(&o));
        outcomes.push(o);
    }
    let mut csv = Csv::new(&["id", "name", "passed", "hard", "runtime_secs", "summary"]);
    for o in &outcomes {
        csv.row(vec![
            o.id.to_string(),
            o.name.clone(),
            o.passed.to_string(),
            o.hard.to_string(),
            f(o.runtime_secs),
            o.summary.clone(),
        ]);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    Ok(Output {
        summary: format!("{passed}/{} criteria passed", outcomes.len()),
        payload: json!({"suite": suite, "outcomes": outcomes, "all_passed": passed == outcomes.len()}),
        csv: Some(csv),
    })
}

/// Hard failures become exit code 2 once the report is written.
pub fn verify_status(out: &Output) -> Result<()> {
    let outcomes: Vec<Outcome> = serde_json::from_value(out.payload["outcomes"].clone())?;
    let hard: Vec<u32> = outcomes.iter().filter(|o| o.hard && !o.passed).map(|o| o.id).collect();
    if !hard.is_empty() {
        bail!(LabError::HardIdentity(format!("criteria {hard:?} failed")));
    }
    Ok(())
}
