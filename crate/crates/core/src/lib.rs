//! Computational laboratory for local mean values of Weyl sums.
//!
//! Exact counting of Vinogradov systems, box mean-value quadrature,
//! exponent curves, level-set and major-arc structure checks, and complete
//! exponential sums over prime fields.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod arc;
pub mod bounds;
pub mod cache;
pub mod boxmean;
pub mod count;
pub mod curve;
pub mod error;
pub mod exponent;
pub mod oracle;
pub mod phase;
pub mod primes;
pub mod rational;
pub mod summation;
pub mod torus;
pub mod weyl;

pub use bounds::{bound_curve, figure_polylines, BoundParams, Figure, Source};
pub use curve::{BoundCurve, BoundKind, Segment, Validity};
pub use error::{LabError, Result};
pub use rational::RationalValue;
pub use torus::{PrimePoint, TorusPoint, WeightSeq};
pub use num_complex::Complex64;

/// Round-trip exact float formatting (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() && x == x.trunc() && x.abs() < 1e17 {
        return format!("{}", x as i128);
    }
    format!("{:.16e}", x)
}
