//! Exact rational values used for exponents and curve breakpoints.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};

/// A reduced fraction with positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RationalValue(Ratio<i128>);

impl RationalValue {
    pub fn new(numer: i128, denom: i128) -> Self {
        assert!(denom != 0, "zero denominator");
        RationalValue(Ratio::new(numer, denom))
    }

    pub fn int(n: i128) -> Self {
        RationalValue(Ratio::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn floor(&self) -> i128 {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> i128 {
        self.0.ceil().to_integer()
    }

    pub fn abs(&self) -> Self {
        RationalValue(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        RationalValue(self.0.recip())
    }

    pub fn fract(&self) -> Self {
        *self - Self::int(self.floor())
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Best rational approximation with denominator at most `max_denom`
    /// (continued-fraction convergents and semiconvergents).
    pub fn approximate(x: f64, max_denom: i128) -> Result<Self> {
        if !x.is_finite() {
            return Err(LabError::Domain(format!("cannot approximate {x}")));
        }
        let neg = x < 0.0;
        let mut y = x.abs();
        let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
        loop {
            let a = y.floor();
            if a > 1e30 {
                break;
            }
            let a = a as i128;
            let q2 = a * q1 + q0;
            if q2 > max_denom {
                // semiconvergent check
                let t = (max_denom - q0) / q1.max(1);
                let (ps, qs) = (t * p1 + p0, t * q1 + q0);
                let cand = RationalValue::new(ps, qs.max(1));
                let conv = RationalValue::new(p1, q1.max(1));
                let best = if q1 == 0
                    || (cand.to_f64() - x.abs()).abs() < (conv.to_f64() - x.abs()).abs()
                {
                    cand
                } else {
                    conv
                };
                return Ok(if neg { -best } else { best });
            }
            let p2 = a * p1 + p0;
            p0 = p1;
            q0 = q1;
            p1 = p2;
            q1 = q2;
            let frac = y - y.floor();
            if frac < 1e-15 {
                break;
            }
            y = 1.0 / frac;
        }
        let r = RationalValue::new(p1, q1.max(1));
        Ok(if neg { -r } else { r })
    }
}

impl fmt::Debug for RationalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RationalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for RationalValue {
    type Err = LabError;

    /// Accepts `p`, `p/q`, or a decimal literal such as `2.5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || LabError::Domain(format!("not a rational number: {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: i128 = p.trim().parse().map_err(|_| bad())?;
            let q: i128 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            return Ok(RationalValue::new(p, q));
        }
        if let Ok(n) = s.parse::<i128>() {
            return Ok(RationalValue::int(n));
        }
        let (int_part, frac_part) = s.split_once('.').ok_or_else(bad)?;
        if frac_part.len() > 18 || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int_part.starts_with('-');
        let ip: i128 = if int_part.is_empty() || int_part == "-" {
            0
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let scale = 10i128.pow(frac_part.len() as u32);
        let fp: i128 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| bad())?
        };
        let mag = ip.abs() * scale + fp;
        Ok(RationalValue::new(if neg { -mag } else { mag }, scale))
    }
}

impl Serialize for RationalValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalValue {
            type Output = RationalValue;
            fn $m(self, rhs: RationalValue) -> RationalValue {
                RationalValue(self.0.$m(rhs.0))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for RationalValue {
    type Output = RationalValue;
    fn neg(self) -> RationalValue {
        RationalValue(-self.0)
    }
}

impl From<i128> for RationalValue {
    fn from(n: i128) -> Self {
        RationalValue::int(n)
    }
}

impl From<i64> for RationalValue {
    fn from(n: i64) -> Self {
        RationalValue::int(n as i128)
    }
}

impl From<u32> for RationalValue {
    fn from(n: u32) -> Self {
        RationalValue::int(n as i128)
    }
}

/// Shorthand constructor.
pub fn q(numer: i128, denom: i128) -> RationalValue {
    RationalValue::new(numer, denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!("5/2".parse::<RationalValue>().unwrap(), q(5, 2));
        assert_eq!("2.5".parse::<RationalValue>().unwrap(), q(5, 2));
        assert_eq!("-0.25".parse::<RationalValue>().unwrap(), q(-1, 4));
        assert_eq!("7".parse::<RationalValue>().unwrap(), q(7, 1));
        assert!("1/0".parse::<RationalValue>().is_err());
        assert!("abc".parse::<RationalValue>().is_err());
    }

    #[test]
    fn reduced_and_signed() {
        let r = q(6, -4);
        assert_eq!(r.numer(), -3);
        assert_eq!(r.denom(), 2);
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(r.floor(), -2);
        assert_eq!(r.fract(), q(1, 2));
    }

    #[test]
    fn approximates_simple_fractions() {
        assert_eq!(RationalValue::approximate(2.0 / 3.0, 1000).unwrap(), q(2, 3));
        assert_eq!(RationalValue::approximate(0.1, 1000).unwrap(), q(1, 10));
        assert_eq!(
            RationalValue::approximate(std::f64::consts::PI, 120).unwrap(),
            q(355, 113)
        );
    }
}
