//! Piecewise-linear exponent curves in tau with exact rational breakpoints.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::rational::RationalValue;

/// kappa = slope * tau + intercept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Line {
    pub slope: RationalValue,
    pub intercept: RationalValue,
}

impl Line {
    pub fn new(slope: RationalValue, intercept: RationalValue) -> Self {
        Line { slope, intercept }
    }

    pub fn at(&self, tau: RationalValue) -> RationalValue {
        self.slope * tau + self.intercept
    }

    /// Abscissa where two non-parallel lines meet.
    pub fn crossing(&self, other: &Line) -> Option<RationalValue> {
        if self.slope == other.slope {
            return None;
        }
        Some((other.intercept - self.intercept) / (self.slope - other.slope))
    }
}

/// A min/max expression tree over lines.
#[derive(Clone, Debug)]
pub enum Expr {
    Lin(Line),
    Max(Vec<Expr>),
    Min(Vec<Expr>),
}

impl Expr {
    pub fn lin(slope: RationalValue, intercept: RationalValue) -> Self {
        Expr::Lin(Line::new(slope, intercept))
    }

    pub fn constant(c: RationalValue) -> Self {
        Expr::lin(RationalValue::zero(), c)
    }

    /// Adds a line to every leaf. Max/min commute with translation.
    pub fn shift(self, by: Line) -> Self {
        match self {
            Expr::Lin(l) => Expr::Lin(Line::new(l.slope + by.slope, l.intercept + by.intercept)),
            Expr::Max(v) => Expr::Max(v.into_iter().map(|e| e.shift(by)).collect()),
            Expr::Min(v) => Expr::Min(v.into_iter().map(|e| e.shift(by)).collect()),
        }
    }

    fn leaves(&self, out: &mut Vec<Line>) {
        match self {
            Expr::Lin(l) => out.push(*l),
            Expr::Max(v) | Expr::Min(v) => v.iter().for_each(|e| e.leaves(out)),
        }
    }

    /// The leaf line that realises the expression at tau.
    pub fn active(&self, tau: RationalValue) -> Line {
        match self {
            Expr::Lin(l) => *l,
            Expr::Max(v) => v
                .iter()
                .map(|e| e.active(tau))
                .reduce(|a, b| if b.at(tau) > a.at(tau) { b } else { a })
                .expect("empty max"),
            Expr::Min(v) => v
                .iter()
                .map(|e| e.active(tau))
                .reduce(|a, b| if b.at(tau) < a.at(tau) { b } else { a })
                .expect("empty min"),
        }
    }

    pub fn eval(&self, tau: RationalValue) -> RationalValue {
        self.active(tau).at(tau)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub tau_lo: RationalValue,
    pub tau_hi: RationalValue,
    pub slope: RationalValue,
    pub intercept: RationalValue,
}

impl Segment {
    pub fn line(&self) -> Line {
        Line::new(self.slope, self.intercept)
    }

    pub fn at(&self, tau: RationalValue) -> RationalValue {
        self.line().at(tau)
    }
}

/// Range of tau on which a source makes a claim; `hi = None` is unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validity {
    pub lo: RationalValue,
    pub hi: Option<RationalValue>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Upper bound on the origin mean value over weights.
    Upper,
    /// Upper bound on the supremum over box placement.
    UpperSup,
    /// Lower bound on the infimum over box placement.
    LowerInf,
}

impl BoundKind {
    pub fn is_lower(&self) -> bool {
        matches!(self, BoundKind::LowerInf)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub label: String,
    pub source: String,
    pub s: RationalValue,
    pub d: i64,
    pub kind: BoundKind,
    pub conjecture: bool,
    pub conditional: bool,
    pub segments: Vec<Segment>,
    /// `None` when (s,d) lies outside the source's hypotheses.
    pub validity: Option<Validity>,
}

/// Splits each piece at all pairwise leaf crossings and merges equal neighbours.
pub fn linearize(pieces: &[(RationalValue, RationalValue, Expr)]) -> Vec<Segment> {
    let mut segs: Vec<Segment> = Vec::new();
    for (lo, hi, expr) in pieces {
        if lo >= hi {
            continue;
        }
        let mut lines = Vec::new();
        expr.leaves(&mut lines);
        let mut cuts = vec![*lo, *hi];
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                if let Some(t) = lines[i].crossing(&lines[j]) {
                    if t > *lo && t < *hi {
                        cuts.push(t);
                    }
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        for w in cuts.windows(2) {
            let mid = (w[0] + w[1]) / RationalValue::int(2);
            let l = expr.active(mid);
            segs.push(Segment {
                tau_lo: w[0],
                tau_hi: w[1],
                slope: l.slope,
                intercept: l.intercept,
            });
        }
    }
    merge(segs)
}

fn merge(segs: Vec<Segment>) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::with_capacity(segs.len());
    for s in segs {
        if let Some(last) = out.last_mut() {
            if last.tau_hi == s.tau_lo && last.line() == s.line() {
                last.tau_hi = s.tau_hi;
                continue;
            }
        }
        out.push(s);
    }
    out
}

impl BoundCurve {
    /// kappa at tau, or `None` outside the covered range. At a shared
    /// breakpoint the left segment wins (they agree on continuous curves).
    pub fn eval(&self, tau: RationalValue) -> Option<RationalValue> {
        self.segments
            .iter()
            .find(|s| s.tau_lo <= tau && tau <= s.tau_hi)
            .map(|s| s.at(tau))
    }

    pub fn eval_f64(&self, tau: f64) -> Option<f64> {
        self.segments
            .iter()
            .find(|s| s.tau_lo.to_f64() <= tau && tau <= s.tau_hi.to_f64())
            .map(|s| s.slope.to_f64() * tau + s.intercept.to_f64())
    }

    pub fn is_empty(&self) -> bool {
        self.validity.is_none()
    }

    /// Contiguity and continuity across interior breakpoints.
    pub fn check_continuity(&self) -> Result<()> {
        for w in self.segments.windows(2) {
            if w[0].tau_hi != w[1].tau_lo {
                return Err(LabError::HardIdentity(format!(
                    "{}: gap between {} and {}",
                    self.label, w[0].tau_hi, w[1].tau_lo
                )));
            }
            let t = w[0].tau_hi;
            if w[0].at(t) != w[1].at(t) {
                return Err(LabError::HardIdentity(format!(
                    "{}: jump at tau={} ({} vs {})",
                    self.label,
                    t,
                    w[0].at(t),
                    w[1].at(t)
                )));
            }
        }
        Ok(())
    }

    /// Breakpoints (tau, kappa), including both ends.
    pub fn breakpoints(&self) -> Vec<(RationalValue, RationalValue)> {
        let mut pts = Vec::new();
        for (i, s) in self.segments.iter().enumerate() {
            let joined = i > 0
                && self.segments[i - 1].tau_hi == s.tau_lo
                && self.segments[i - 1].at(s.tau_lo) == s.at(s.tau_lo);
            if !joined {
                pts.push((s.tau_lo, s.at(s.tau_lo)));
            }
            pts.push((s.tau_hi, s.at(s.tau_hi)));
        }
        pts
    }

    /// Human-readable segment list, e.g. `2-2x on [0,1/2]`.
    pub fn describe(&self) -> Vec<String> {
        self.segments.iter().map(describe_segment).collect()
    }
}

pub fn describe_segment(s: &Segment) -> String {
    let b = s.intercept;
    let m = s.slope;
    let body = if m.is_zero() {
        format!("{b}")
    } else {
        let mag = m.abs();
        let coef = if mag == RationalValue::one() {
            String::new()
        } else if mag.is_integer() {
            format!("{mag}")
        } else {
            format!("({mag})")
        };
        let sign = if m < RationalValue::zero() { "-" } else { "+" };
        if b.is_zero() {
            format!("{}{coef}x", if sign == "-" { "-" } else { "" })
        } else {
            format!("{b}{sign}{coef}x")
        }
    };
    format!("{body} on [{},{}]", s.tau_lo, s.tau_hi)
}

pub const CSV_HEADER: &str = "label,tau,kappa,tau_exact,kappa_exact";

/// One CSV row per breakpoint.
pub fn curves_to_csv(curves: &[BoundCurve]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in curves {
        for (t, k) in c.breakpoints() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_quote(&c.label),
                crate::fmt_f64(t.to_f64()),
                crate::fmt_f64(k.to_f64()),
                t,
                k
            ));
        }
    }
    out
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn r(n: i128) -> RationalValue {
        RationalValue::int(n)
    }

    #[test]
    fn max_of_two_lines_splits_at_crossing() {
        let e = Expr::Max(vec![Expr::lin(r(-1), r(2)), Expr::constant(r(1))]);
        let segs = linearize(&[(r(0), r(3), e)]);
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].tau_hi, r(1));
        assert_eq!(segs[1].slope, r(0));
    }

    #[test]
    fn merges_identical_neighbours() {
        let segs = linearize(&[
            (r(0), r(1), Expr::lin(r(-1), r(2))),
            (r(1), r(2), Expr::lin(r(-1), r(2))),
        ]);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].tau_hi, r(2));
    }

    #[test]
    fn continuity_detects_jump() {
        let segs = linearize(&[
            (r(0), r(1), Expr::lin(r(-1), r(2))),
            (r(1), r(2), Expr::constant(r(5))),
        ]);
        let c = BoundCurve {
            label: "x".into(),
            source: "x".into(),
            s: r(1),
            d: 1,
            kind: BoundKind::Upper,
            conjecture: false,
            conditional: false,
            segments: segs,
            validity: Some(Validity { lo: r(0), hi: Some(r(2)) }),
        };
        assert!(c.check_continuity().is_err());
        assert_eq!(c.breakpoints().len(), 4);
    }

    #[test]
    fn describe_forms() {
        let s = Segment { tau_lo: r(0), tau_hi: q(1, 2), slope: r(-2), intercept: r(2) };
        assert_eq!(describe_segment(&s), "2-2x on [0,1/2]");
        let s = Segment { tau_lo: r(2), tau_hi: r(3), slope: q(-5, 2), intercept: q(9, 2) };
        assert_eq!(describe_segment(&s), "9/2-(5/2)x on [2,3]");
        let s = Segment { tau_lo: r(0), tau_hi: r(1), slope: r(0), intercept: r(1) };
        assert_eq!(describe_segment(&s), "1 on [0,1]");
    }
}
