//! Bound and conjecture evaluators as exponent curves kappa(tau), delta = N^-tau.
//!
//! Constants and N^o(1) factors are dropped throughout.

use serde::{Deserialize, Serialize};

use crate::curve::{linearize, BoundCurve, BoundKind, Expr, Line, Validity};
use crate::error::{domain, LabError, Result};
use crate::exponent::{alpha_0_exact, big_d, eta, nu, nu_argmax, rho, sd, sigma_d_exact, theta};
use crate::rational::{q, RationalValue};

type R = RationalValue;

fn r(n: i128) -> R {
    R::int(n)
}

/// Every bound source the engine knows, with its accepted aliases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Trivial,
    Holder,
    Wooley,
    DemeterLangowski,
    AlphaFamily,
    AlphaOptimal,
    SmallSWeights,
    LargeSWeights,
    RoughLargeS,
    FirstTermLargeS,
    ConditionalWeights,
    SmallDegreeTable,
    ShiftsQuadratic,
    ShiftsHigher,
    LowerQuadratic,
    LowerQuadraticWide,
    LowerHigher,
}

impl Source {
    pub const ALL: [Source; 17] = [
        Source::Trivial,
        Source::Holder,
        Source::Wooley,
        Source::DemeterLangowski,
        Source::AlphaFamily,
        Source::AlphaOptimal,
        Source::SmallSWeights,
        Source::LargeSWeights,
        Source::RoughLargeS,
        Source::FirstTermLargeS,
        Source::ConditionalWeights,
        Source::SmallDegreeTable,
        Source::ShiftsQuadratic,
        Source::ShiftsHigher,
        Source::LowerQuadratic,
        Source::LowerQuadraticWide,
        Source::LowerHigher,
    ];

    pub fn id(&self) -> &'static str {
        self.aliases()[0]
    }

    /// First entry is the canonical id; the rest are accepted on input.
    pub fn aliases(&self) -> &'static [&'static str] {
        match self {
            Source::Trivial => &["trivial", "eq2.3"],
            Source::Holder => &["holder", "hoelder", "eq2.4"],
            Source::Wooley => &["wooley", "conj2.1", "w"],
            Source::DemeterLangowski => &["demeter-langowski", "conj2.3", "dl", "d-l"],
            Source::AlphaFamily => &["alpha-family", "conj2.4"],
            Source::AlphaOptimal => &["alpha-optimal", "conj2.5"],
            Source::SmallSWeights => &["small-s-weights", "thm3.1"],
            Source::LargeSWeights => &["large-s-weights", "thm3.2"],
            Source::RoughLargeS => &["rough-large-s", "cor3.3"],
            Source::FirstTermLargeS => &["first-term-large-s", "cor3.4"],
            Source::ConditionalWeights => &["conditional-weights", "thm3.5"],
            Source::SmallDegreeTable => &["small-degree-table", "cor3.6"],
            Source::ShiftsQuadratic => &["shifts-quadratic", "thm3.7"],
            Source::ShiftsHigher => &["shifts-higher", "thm3.8"],
            Source::LowerQuadratic => &["lower-quadratic", "thm3.9", "thm3.9a"],
            Source::LowerQuadraticWide => &["lower-quadratic-wide", "thm3.9b"],
            Source::LowerHigher => &["lower-higher", "thm3.10"],
        }
    }

    pub fn parse(name: &str) -> Result<Source> {
        let key = name.trim().to_ascii_lowercase();
        Source::ALL
            .iter()
            .find(|s| s.aliases().contains(&key.as_str()))
            .copied()
            .ok_or_else(|| LabError::Unknown(format!("bound source {name:?}")))
    }

    pub fn kind(&self) -> BoundKind {
        match self {
            Source::Wooley | Source::ShiftsQuadratic | Source::ShiftsHigher => BoundKind::UpperSup,
            Source::LowerQuadratic | Source::LowerQuadraticWide | Source::LowerHigher => {
                BoundKind::LowerInf
            }
            _ => BoundKind::Upper,
        }
    }

    pub fn is_conjecture(&self) -> bool {
        matches!(
            self,
            Source::Wooley | Source::DemeterLangowski | Source::AlphaFamily | Source::AlphaOptimal
        )
    }
}

/// Parameters beyond (s,d) that some sources need.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub alpha: Option<R>,
    pub k: Option<i64>,
}

struct Builder {
    source: Source,
    s: R,
    d: i64,
}

impl Builder {
    fn empty(&self) -> BoundCurve {
        self.finish(Vec::new(), None)
    }

    /// Pieces cover [lo, hi]; an unbounded claim is drawn up to tau = d+1.
    fn finish(&self, pieces: Vec<(R, R, Expr)>, validity: Option<Validity>) -> BoundCurve {
        let segments = match validity {
            Some(_) => linearize(&pieces),
            None => Vec::new(),
        };
        BoundCurve {
            label: format!("{} s={} d={}", self.source.id(), self.s, self.d),
            source: self.source.id().to_string(),
            s: self.s,
            d: self.d,
            kind: self.source.kind(),
            conjecture: self.source.is_conjecture(),
            conditional: self.source == Source::ConditionalWeights,
            segments,
            validity,
        }
    }

    fn horizon(&self) -> R {
        r(self.d as i128 + 1)
    }

    fn single(&self, hi: Option<R>, e: Expr) -> BoundCurve {
        let end = hi.unwrap_or_else(|| self.horizon());
        self.finish(
            vec![(r(0), end, e)],
            Some(Validity { lo: r(0), hi }),
        )
    }
}

fn is_int(s: R) -> bool {
    s.is_integer()
}

/// The exponent curve of one bound source at (s,d).
pub fn bound_curve(source: Source, s: R, d: i64, params: BoundParams) -> Result<BoundCurve> {
    if d < 1 {
        return domain(format!("degree must be >= 1, got {d}"));
    }
    if s < r(0) {
        return domain(format!("s must be >= 0, got {s}"));
    }
    let b = Builder { source, s, d };
    let di = d as i128;
    let sdd = r(sd(d));
    let half = q(1, 2);
    Ok(match source {
        Source::Trivial => b.single(None, Expr::lin(r(-di), r(2) * s)),
        Source::Holder => {
            if s > sdd {
                return Ok(b.empty());
            }
            let slope = -(r(di) - r(2) * s / r(di + 1));
            b.single(None, Expr::lin(slope, s))
        }
        Source::Wooley => {
            let e = Expr::Max(vec![Expr::lin(r(-di), s), Expr::constant(r(2) * s - sdd)]);
            if s >= q(di * (di + 1), 4) + r(1) {
                b.single(None, e)
            } else {
                let hi = q(di + 1, 4) - q(1, di);
                if hi <= r(0) {
                    return Ok(b.empty());
                }
                b.single(Some(hi), e)
            }
        }
        Source::DemeterLangowski => {
            let lift = (s - q(rho(d), 2)).max(r(0));
            b.single(None, Expr::lin(-q(di + 1, 2), s + lift))
        }
        Source::AlphaFamily => {
            let alpha = params
                .alpha
                .ok_or_else(|| LabError::Domain("this source needs alpha".into()))?;
            let sig = sigma_d_exact(d, alpha)?;
            let lift = (s - sig).max(r(0));
            b.single(Some(r(di)), Expr::lin(-(r(di) - alpha), s + lift))
        }
        Source::AlphaOptimal => {
            if s > sdd {
                return Ok(b.empty());
            }
            let a0 = alpha_0_exact(d, s)?;
            b.single(Some(r(di)), Expr::lin(-(r(di) - a0), s))
        }
        Source::SmallSWeights => {
            if s <= r(0) || s > sdd / r(2) || d < 2 {
                return Ok(b.empty());
            }
            let mut pieces = vec![
                (r(0), q(1, 2 * di - 1), Expr::lin(-(r(di) - half), s)),
                (q(1, 2 * di - 1), q(1, di), Expr::constant(s - half)),
                (q(1, di), r(1), Expr::lin(-q(di, 2), s)),
            ];
            for k in 1..di {
                pieces.push((r(k), r(k + 1), Expr::lin(-q(di + k, 2), s + q(k * (k + 1), 4))));
            }
            b.finish(pieces, Some(Validity { lo: r(0), hi: Some(r(di)) }))
        }
        Source::LargeSWeights => {
            if !(is_int(s) && s > sdd / r(2) && s < sdd) {
                return Ok(b.empty());
            }
            b.single(Some(r(1)), large_s_expr(s, d)?)
        }
        Source::RoughLargeS => {
            if !(is_int(s) && s > sdd / r(2) && s < sdd) {
                return Ok(b.empty());
            }
            b.single(Some(r(1)), Expr::lin(-q(di, 2), r(2) * s - sdd / r(2)))
        }
        Source::FirstTermLargeS => {
            if d < 2 || !(is_int(s) && s > sdd / r(2) && s < sdd) {
                return Ok(b.empty());
            }
            let hi = q(1, 2 * di - 2).min((sdd - s) * theta(d)?);
            b.single(Some(hi), Expr::lin(-r(di - 1), s))
        }
        Source::ConditionalWeights => {
            if d < 2 || s <= r(0) {
                return Ok(b.empty());
            }
            let s1 = sdd - r(1);
            if s <= (sdd / r(2)).min(s1) {
                let mut pieces = vec![
                    (r(0), q(1, di), Expr::lin(r(-di), s)),
                    (q(1, di), q(2, di), Expr::constant(s - r(1))),
                    (q(2, di), r(1), Expr::lin(-q(di, 2), s)),
                ];
                for k in 1..di {
                    pieces.push((r(k), r(k + 1), Expr::lin(-q(di + k, 2), s + q(k * (k + 1), 4))));
                }
                b.finish(pieces, Some(Validity { lo: r(0), hi: Some(r(di)) }))
            } else if s <= s1 {
                let mut pieces = Vec::new();
                for k in 0..di {
                    let sk = r(k * (k + 1) / 2);
                    let e = Expr::Max(vec![
                        Expr::lin(r(-di), s),
                        Expr::Min(vec![
                            Expr::lin(r(-k), s + sk - r(1)),
                            Expr::lin(-q(k + di, 2), r(2) * s - (sdd - sk) / r(2)),
                        ]),
                    ]);
                    pieces.push((r(k), r(k + 1), e));
                }
                b.finish(pieces, Some(Validity { lo: r(0), hi: Some(r(di)) }))
            } else {
                b.empty()
            }
        }
        Source::SmallDegreeTable => {
            let rows: Vec<(R, R, R, R)> = match (s.to_string().as_str(), d) {
                ("2", 2) => vec![
                    (r(0), q(1, 2), r(-2), r(2)),
                    (q(1, 2), r(1), r(0), r(1)),
                    (r(1), r(2), r(-1), r(2)),
                    (r(2), r(3), r(-2), r(4)),
                ],
                ("2", 3) => vec![
                    (r(0), q(1, 3), r(-3), r(2)),
                    (q(1, 3), q(2, 3), r(0), r(1)),
                    (q(2, 3), r(1), q(-3, 2), r(2)),
                    (r(1), q(3, 2), r(-2), q(5, 2)),
                    (q(3, 2), r(4), r(-3), r(4)),
                ],
                ("3", 3) => vec![
                    (r(0), q(1, 3), r(-3), r(3)),
                    (q(1, 3), q(2, 3), r(0), r(2)),
                    (q(2, 3), r(1), q(-3, 2), r(3)),
                    (r(1), r(2), r(-2), q(7, 2)),
                    (r(2), r(3), q(-5, 2), q(9, 2)),
                    (r(3), r(4), r(-3), r(6)),
                ],
                _ => return Ok(b.empty()),
            };
            let pieces = rows
                .into_iter()
                .map(|(lo, hi, m, c)| (lo, hi, Expr::lin(m, c)))
                .collect();
            b.finish(pieces, Some(Validity { lo: r(0), hi: None }))
        }
        Source::ShiftsQuadratic => {
            if d != 2 || s <= r(0) {
                return Ok(b.empty());
            }
            let t = q(3, 1) / (r(6) + r(2) * s);
            b.single(Some(t), Expr::lin(r(-2), r(2) * s * (r(1) - t)))
        }
        Source::ShiftsHigher => {
            if d < 3 {
                return Ok(b.empty());
            }
            let dd = r(big_d(d)? as i128);
            if s <= (sdd * dd - r(di * di) - r(1)) / r(2) {
                return Ok(b.empty());
            }
            let denom = r(2) * s + r(di * di + 1);
            let hi = r(di + 1) / (r(2) * denom);
            b.single(Some(hi), Expr::lin(r(-di), r(2) * s * (r(1) - sdd / denom)))
        }
        Source::LowerQuadratic => {
            if d != 2 || s <= r(0) {
                return Ok(b.empty());
            }
            let e = Expr::Max(vec![
                Expr::lin(r(-2), s - r(1)),
                Expr::lin(-s, r(2) * s - r(3)),
            ]);
            b.single(Some(r(1)), e)
        }
        Source::LowerQuadraticWide => {
            if d != 2 || s <= r(0) {
                return Ok(b.empty());
            }
            b.single(Some(half), Expr::lin(r(-2), q(3, 2) * (s - r(1))))
        }
        Source::LowerHigher => {
            if d < 2 || s <= r(0) {
                return Ok(b.empty());
            }
            let k = match params.k {
                Some(k) => k,
                None => nu_argmax(d)?,
            };
            let v = nu(d, k)?;
            let base = Line::new(r(-di), r(di) + s - sdd);
            let e = Expr::Max(vec![
                Expr::Lin(base),
                Expr::lin(r(-di) - (s - r(di)) / v, base.intercept + s - r(di)),
            ]);
            let mut c = b.single(Some(v), e);
            c.label = format!("{} k={k}", c.label);
            c
        }
    })
}

fn large_s_expr(s: R, d: i64) -> Result<Expr> {
    let di = d as i128;
    let sdd = r(sd(d));
    let mut branches = vec![Expr::lin(-r(di - 1), s)];
    for j in 1..di {
        let e = eta(s, d, j as i64)?;
        let first = Expr::lin(-r(j - 1), s + (-q(1, 2)).max(-e));
        let second = Expr::lin(-q(di + j - 1, 2), r(2) * s - sdd / r(2));
        branches.push(Expr::Min(vec![first, second]));
    }
    Ok(Expr::Max(branches))
}

/// Parse-and-evaluate convenience used by the CLI.
pub fn bound_curve_by_name(name: &str, s: R, d: i64, params: BoundParams) -> Result<BoundCurve> {
    bound_curve(Source::parse(name)?, s, d, params)
}

/// Figures comparing upper bounds and conjectures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    /// (s,d) = (2,2)
    F1,
    /// (s,d) = (3,3)
    F2,
    /// (s,d) = (2,3)
    F3,
}

impl Figure {
    pub fn parse(name: &str) -> Result<Figure> {
        match name.trim() {
            "3.1" | "fig3.1" => Ok(Figure::F1),
            "3.2" | "fig3.2" => Ok(Figure::F2),
            "3.3" | "fig3.3" => Ok(Figure::F3),
            other => Err(LabError::Unknown(format!("figure {other:?}"))),
        }
    }

    pub fn params(&self) -> (i128, i64) {
        match self {
            Figure::F1 => (2, 2),
            Figure::F2 => (3, 3),
            Figure::F3 => (2, 3),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Figure::F1 => "3.1",
            Figure::F2 => "3.2",
            Figure::F3 => "3.3",
        }
    }
}

/// The labelled polylines drawn in a figure. The conjectured curves stop
/// at the figure's drawing range, which the evaluator reproduces.
pub fn figure_polylines(fig: Figure) -> Result<Vec<BoundCurve>> {
    let (s, d) = fig.params();
    let sv = r(s);
    let tag = format!("{s},{d}");
    let mut out = Vec::new();
    let mut push = |src: Source, legend: String| -> Result<()> {
        let mut c = bound_curve(src, sv, d, BoundParams::default())?;
        c.label = legend;
        out.push(c);
        Ok(())
    };
    push(Source::AlphaOptimal, format!("Conj. 2.5, kappa^(0)_{{{tag}}}"))?;
    if fig != Figure::F1 {
        push(Source::Wooley, format!("Conj. 2.1 (W), kappa^#_{{{tag}}}"))?;
    }
    push(Source::DemeterLangowski, format!("D-L, kappa^(0)_{{{tag}}}"))?;
    push(Source::SmallDegreeTable, format!("Cor. 3.6, kappa^(0)_{{{tag}}}"))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(src: Source, s: i128, d: i64) -> BoundCurve {
        bound_curve(src, r(s), d, BoundParams::default()).unwrap()
    }

    #[test]
    fn aliases_resolve() {
        assert_eq!(Source::parse("cor3.6").unwrap(), Source::SmallDegreeTable);
        assert_eq!(Source::parse("D-L").unwrap(), Source::DemeterLangowski);
        assert!(Source::parse("thm9.9").is_err());
        for s in Source::ALL {
            assert_eq!(Source::parse(s.id()).unwrap(), s);
        }
    }

    #[test]
    fn table_equals_min_of_conditional_and_trivial() {
        for (s, d) in [(2, 2), (2, 3), (3, 3)] {
            let table = curve(Source::SmallDegreeTable, s, d);
            let cond = curve(Source::ConditionalWeights, s, d);
            let triv = curve(Source::Trivial, s, d);
            for i in 0..=(d as i128) * 60 {
                let t = q(i, 60);
                let expect = cond.eval(t).unwrap().min(triv.eval(t).unwrap());
                assert_eq!(table.eval(t).unwrap(), expect, "s={s} d={d} tau={t}");
            }
        }
    }

    #[test]
    fn every_nonempty_curve_is_continuous() {
        for src in Source::ALL {
            for d in 1..=6 {
                for sn in 0..=2 * sd(d) {
                    for half in [false, true] {
                        let s = if half { q(2 * sn + 1, 2) } else { r(sn) };
                        let p = BoundParams { alpha: Some(q(1, 2)), k: None };
                        let c = bound_curve(src, s, d, p).unwrap();
                        c.check_continuity().unwrap();
                        if c.validity.is_none() {
                            assert!(c.segments.is_empty());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ordering_at_origin_for_2_2() {
        for src in Source::ALL {
            let p = BoundParams { alpha: Some(r(1)), k: None };
            let c = bound_curve(src, r(2), 2, p).unwrap();
            let Some(k0) = c.eval(r(0)) else { continue };
            if c.kind.is_lower() {
                assert!(k0 <= r(2), "{}", c.label);
            } else {
                assert!(k0 >= r(2), "{}", c.label);
            }
        }
    }

    #[test]
    fn spot_values() {
        let c = curve(Source::ShiftsQuadratic, 1, 2);
        assert_eq!(c.eval(r(0)).unwrap(), q(5, 4));
        let c = curve(Source::AlphaOptimal, 2, 2);
        assert_eq!(c.describe(), vec!["2-x on [0,2]"]);
        let c = curve(Source::DemeterLangowski, 2, 3);
        assert_eq!(c.segments[0].slope, r(-2));
        assert_eq!(c.segments[0].intercept, r(2));
        assert!(curve(Source::SmallDegreeTable, 4, 4).is_empty());
        assert!(curve(Source::LargeSWeights, 1, 2).is_empty());
    }

    #[test]
    fn alpha_family_needs_alpha() {
        assert!(bound_curve(Source::AlphaFamily, r(2), 2, BoundParams::default()).is_err());
        let c = bound_curve(
            Source::AlphaFamily,
            r(2),
            2,
            BoundParams { alpha: Some(r(1)), k: None },
        )
        .unwrap();
        assert_eq!(c.describe(), vec!["2-x on [0,2]"]);
    }

    #[test]
    fn figures() {
        let f1 = figure_polylines(Figure::F1).unwrap();
        assert_eq!(f1.len(), 3);
        assert_eq!(
            f1[2].describe(),
            vec!["2-2x on [0,1/2]", "1 on [1/2,1]", "2-x on [1,2]", "4-2x on [2,3]"]
        );
        let f3 = figure_polylines(Figure::F3).unwrap();
        assert_eq!(f3[1].describe(), vec!["2-3x on [0,2/3]"]);
        assert!(Figure::parse("3.4").is_err());
    }
}
