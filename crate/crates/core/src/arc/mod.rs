//! Rational structure of large Weyl sums, level sets, complete sums over
//! prime fields and explicit lower-bound witness sets.

mod field;
mod levelset;
mod structure;
mod witness;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub use field::{
    complete_sums_line, gauss_continuity_check, monomial_curve_density, prime_field_scan,
    FieldScanReport, GaussContinuityReport, MonomialReport,
};
pub use levelset::{
    check_levelset_bounds, level_set_measure, levelset_envelope, LevelSetEstimate,
    LevelsetBoundReport, LevelsetRow, Sampler,
};
pub use structure::{detect_rational_structure, RationalApprox, StructureReport};
pub use witness::{lower_bound_witness, WitnessReport};

/// Absolute constants the arguments leave unspecified. Every report echoes
/// the values it used.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcConstants {
    /// Radius factor of the near-rational cells.
    pub c: f64,
    /// N >= C p.
    #[serde(rename = "C")]
    pub big_c: f64,
    /// Threshold |T| >= gamma sqrt(p).
    pub gamma: f64,
    /// Side condition delta >= 2 Gamma p^-nu log p.
    #[serde(rename = "Gamma")]
    pub big_gamma: f64,
    /// Multiplier on the structure search range and error envelopes.
    pub envelope: f64,
    /// Exponent of the N^eps allowance in the structure envelopes.
    pub eps: f64,
}

impl Default for ArcConstants {
    fn default() -> Self {
        ArcConstants {
            c: 0.125,
            big_c: 4.0,
            gamma: 0.5,
            big_gamma: 1.0,
            envelope: 4.0,
            eps: 0.01,
        }
    }
}

impl ArcConstants {
    /// Applies name=value overrides.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(LabError::Domain(format!("constant {name}={value} must be positive")));
        }
        match name {
            "c" => self.c = value,
            "C" => self.big_c = value,
            "gamma" => self.gamma = value,
            "Gamma" => self.big_gamma = value,
            "envelope" => self.envelope = value,
            "eps" => self.eps = value,
            _ => return Err(LabError::Unknown(format!("constant '{name}'"))),
        }
        Ok(())
    }
}

/// Distance from x to the nearest a/q on the circle, with that a in [0, q).
pub(crate) fn nearest_fraction(x: f64, q: u64) -> (u64, f64) {
    let t = x * q as f64;
    let a = t.round();
    let err = ((t - a) / q as f64).abs();
    let a = (a as i64).rem_euclid(q as i64) as u64;
    (a, err)
}
