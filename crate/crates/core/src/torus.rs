//! Points on the torus, weight sequences and prime-field points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::primes::is_prime;

/// x in [0,1)^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

/// Reduces to [0,1); the rounding edge case x - floor(x) == 1 maps to 0.
pub fn reduce_mod1(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return domain("torus point needs d >= 1");
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return domain("torus coordinates must be finite");
        }
        Ok(TorusPoint {
            coords: coords.into_iter().map(reduce_mod1).collect(),
        })
    }

    pub fn zero(d: usize) -> Self {
        TorusPoint {
            coords: vec![0.0; d],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// -x mod 1.
    pub fn negate(&self) -> Self {
        TorusPoint {
            coords: self.coords.iter().map(|c| reduce_mod1(-c)).collect(),
        }
    }
}

/// Weights a_1..a_N with cached norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSeq {
    values: Vec<Complex64>,
    l1: f64,
    l2_sq: f64,
    linf: f64,
    unit: bool,
}

impl WeightSeq {
    pub fn new(values: Vec<Complex64>) -> Self {
        let l1 = values.iter().map(|v| v.norm()).sum();
        let l2_sq = values.iter().map(|v| v.norm_sqr()).sum();
        let linf = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let unit = values.iter().all(|v| *v == Complex64::new(1.0, 0.0));
        WeightSeq {
            values,
            l1,
            l2_sq,
            linf,
            unit,
        }
    }

    /// The all-ones sequence of length n.
    pub fn ones(n: usize) -> Self {
        WeightSeq {
            values: vec![Complex64::new(1.0, 0.0); n],
            l1: n as f64,
            l2_sq: n as f64,
            linf: if n > 0 { 1.0 } else { 0.0 },
            unit: true,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// a_n for n >= 1.
    pub fn get(&self, n: usize) -> Complex64 {
        self.values[n - 1]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_unit(&self) -> bool {
        self.unit
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l2_sq(&self) -> f64 {
        self.l2_sq
    }

    pub fn linf(&self) -> f64 {
        self.linf
    }

    pub fn conj(&self) -> Self {
        WeightSeq::new(self.values.iter().map(|v| v.conj()).collect())
    }

    /// First n entries.
    pub fn truncated(&self, n: usize) -> Self {
        WeightSeq::new(self.values[..n.min(self.values.len())].to_vec())
    }
}

/// u in F_p^d with p prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePoint {
    pub p: u64,
    pub u: Vec<u64>,
}

impl PrimePoint {
    pub fn new(p: u64, u: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return domain(format!("{p} is not prime"));
        }
        if u.is_empty() {
            return domain("prime point needs d >= 1");
        }
        if let Some(bad) = u.iter().find(|&&x| x >= p) {
            return domain(format!("residue {bad} not in [0,{p})"));
        }
        Ok(PrimePoint { p, u })
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// Excludes the degenerate line u = (u_1, 0, ..., 0).
    pub fn in_z(&self) -> bool {
        self.u.iter().skip(1).any(|&x| x != 0)
    }

    pub fn as_torus(&self) -> TorusPoint {
        TorusPoint {
            coords: self.u.iter().map(|&x| x as f64 / self.p as f64).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction() {
        let x = TorusPoint::new(vec![1.25, -0.25, 3.0]).unwrap();
        assert_eq!(x.coords(), &[0.25, 0.75, 0.0]);
        assert_eq!(reduce_mod1(-1e-20), 0.0);
        assert!(TorusPoint::new(vec![]).is_err());
        assert!(TorusPoint::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn norms() {
        let w = WeightSeq::ones(9);
        assert_eq!(w.l1(), 9.0);
        assert_eq!(w.l2_sq(), 9.0);
        let w = WeightSeq::new(vec![Complex64::new(3.0, 4.0), Complex64::new(0.0, 1.0)]);
        assert_eq!(w.l1(), 6.0);
        assert_eq!(w.l2_sq(), 26.0);
        assert_eq!(w.linf(), 5.0);
        assert!(w.l2_sq() <= w.l1() * w.linf());
    }

    #[test]
    fn prime_points() {
        assert!(PrimePoint::new(9, vec![1]).is_err());
        assert!(PrimePoint::new(7, vec![7]).is_err());
        let p = PrimePoint::new(7, vec![3, 0]).unwrap();
        assert!(!p.in_z());
        assert!(PrimePoint::new(7, vec![0, 1]).unwrap().in_z());
    }
}
