//! Exact phase reduction for x_1 n + ... + x_d n^d mod 1.
//!
//! Every double in [2^-75, 1) is an integer multiple of 2^-128, so writing
//! x_j = M_j / 2^128 turns the phase into sum M_j n^j mod 2^128, which
//! wrapping u128 arithmetic computes exactly for every n. Coordinates below
//! 2^-75 keep their sub-2^-128 remainder as a separate float term.

use crate::error::{LabError, Result};

const TWO_128: f64 = 340_282_366_920_938_463_463_374_607_431_768_211_456.0;

#[derive(Clone, Debug)]
pub struct PhaseEngine {
    /// M_1..M_d, index 0 is the linear coefficient.
    fixed: Vec<u128>,
    /// x_j - M_j 2^-128 when nonzero.
    tail: Vec<f64>,
    has_tail: bool,
}

/// Splits x in [0,1) into M 2^-128 + rest with 0 <= rest < 2^-128.
fn split(x: f64) -> (u128, f64) {
    if x == 0.0 {
        return (0, 0.0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let (mant, e) = if exp == 0 {
        (bits & ((1 << 52) - 1), -1074)
    } else {
        ((bits & ((1 << 52) - 1)) | (1 << 52), exp - 1075)
    };
    // x = mant * 2^e
    let shift = e + 128;
    if shift >= 0 {
        ((mant as u128) << shift, 0.0)
    } else if shift <= -64 {
        (0, x)
    } else {
        let s = (-shift) as u32;
        let hi = (mant >> s) as u128;
        let lo = mant & ((1u64 << s) - 1);
        (hi, lo as f64 * 2f64.powi(e))
    }
}

/// Maps a u128 fixed-point phase to [-1/2, 1/2).
#[inline]
pub fn fixed_to_phase(v: u128) -> f64 {
    (v as i128) as f64 / TWO_128
}

impl PhaseEngine {
    /// Accepts signed coordinates with |x_j| < 1; a negative x_j is taken
    /// as -(|x_j|) mod 1 without rounding.
    pub fn new(x: &[f64]) -> Self {
        let (fixed, tail): (Vec<u128>, Vec<f64>) = x
            .iter()
            .map(|&c| {
                if c < 0.0 {
                    let (m, t) = split(-c);
                    (m.wrapping_neg(), -t)
                } else {
                    split(c)
                }
            })
            .unzip();
        let has_tail = tail.iter().any(|&t| t != 0.0);
        PhaseEngine {
            fixed,
            tail,
            has_tail,
        }
    }

    pub fn dim(&self) -> usize {
        self.fixed.len()
    }

    /// Fails only when a sub-2^-128 coordinate meets n^j beyond 2^100, where
    /// its float tail would no longer be reduced exactly.
    pub fn check_range(&self, n_max: u64) -> Result<()> {
        if !self.has_tail {
            return Ok(());
        }
        for (j, t) in self.tail.iter().enumerate() {
            if *t != 0.0 && (j as f64 + 1.0) * (n_max as f64).log2() > 100.0 {
                return Err(LabError::Overflow(format!(
                    "coordinate {} below 2^-75 with n^{} past 2^100",
                    j + 1,
                    j + 1
                )));
            }
        }
        Ok(())
    }

    /// sum M_j n^j mod 2^128 by Horner.
    #[inline]
    pub fn fixed_at(&self, n: u64) -> u128 {
        let n = n as u128;
        let mut acc: u128 = 0;
        for m in self.fixed.iter().rev() {
            acc = acc.wrapping_add(*m).wrapping_mul(n);
        }
        acc
    }

    /// Phase of n in [-1/2, 1/2).
    #[inline]
    pub fn phase(&self, n: u64) -> f64 {
        let p = fixed_to_phase(self.fixed_at(n));
        if !self.has_tail {
            return p;
        }
        let nf = n as f64;
        let mut pw = 1.0;
        let mut extra = 0.0;
        for t in &self.tail {
            pw *= nf;
            extra += t * pw;
        }
        let v = p + extra;
        v - v.round()
    }

    /// The forward differences Delta^k P(n0), k = 0..d, as phases in
    /// [-1/2, 1/2). None when a float tail is present.
    pub fn difference_phases(&self, n0: u64) -> Option<Vec<f64>> {
        if self.has_tail {
            return None;
        }
        let st = self.stepper(n0);
        Some(st.diffs.iter().map(|&v| fixed_to_phase(v)).collect())
    }

    /// Finite-difference stepper starting at n0, exact mod 2^128.
    pub fn stepper(&self, n0: u64) -> PhaseStepper<'_> {
        let d = self.fixed.len();
        let vals: Vec<u128> = (0..=d as u64).map(|i| self.fixed_at(n0 + i)).collect();
        let mut diffs = vals.clone();
        for k in 1..=d {
            for i in (k..=d).rev() {
                diffs[i] = diffs[i].wrapping_sub(diffs[i - 1]);
            }
        }
        PhaseStepper {
            engine: self,
            diffs,
            n: n0,
            since_sync: 0,
        }
    }
}

/// Walks n, n+1, ... updating the forward-difference table in place.
pub struct PhaseStepper<'a> {
    engine: &'a PhaseEngine,
    diffs: Vec<u128>,
    n: u64,
    since_sync: u32,
}

pub const RESYNC_EVERY: u32 = 1 << 16;

impl PhaseStepper<'_> {
    /// Phase at the current n, then advances.
    #[inline]
    pub fn next_phase(&mut self) -> f64 {
        let out = if self.engine.has_tail {
            self.engine.phase(self.n)
        } else {
            fixed_to_phase(self.diffs[0])
        };
        let d = self.diffs.len() - 1;
        for k in 0..d {
            self.diffs[k] = self.diffs[k].wrapping_add(self.diffs[k + 1]);
        }
        self.n += 1;
        self.since_sync += 1;
        if self.since_sync == RESYNC_EVERY {
            // integer differences do not drift; the check guards the table
            debug_assert_eq!(self.diffs[0], self.engine.fixed_at(self.n));
            self.since_sync = 0;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::{ToPrimitive, Zero};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exact fractional part of sum x_j n^j via big integers.
    fn big_phase(x: &[f64], n: u64) -> f64 {
        // x_j = mant_j 2^e_j exactly; bring everything over 2^1100
        let mut num = BigUint::zero();
        let modulus = BigUint::from(1u8) << 1100u32;
        for (j, &c) in x.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let bits = c.to_bits();
            let exp = ((bits >> 52) & 0x7ff) as i64;
            let (mant, e) = if exp == 0 {
                (bits & ((1 << 52) - 1), -1074)
            } else {
                ((bits & ((1 << 52) - 1)) | (1 << 52), exp - 1075)
            };
            let term = BigUint::from(mant) * BigUint::from(n).pow(j as u32 + 1);
            num += term << ((1100 + e) as u32);
        }
        let r = num % &modulus;
        let top = (r >> 1036u32).to_u64().unwrap() as f64 / 2f64.powi(64);
        if top >= 0.5 {
            top - 1.0
        } else {
            top
        }
    }

    #[test]
    fn split_roundtrip() {
        for &x in &[0.5, 0.1, 1e-30, 0.999_999_999_9, 2f64.powi(-75), 3e-300] {
            let (m, t) = split(x);
            let back = m as f64 / TWO_128 + t;
            assert!((back - x).abs() <= x * 1e-15, "x={x}");
        }
    }

    #[test]
    fn matches_bigint_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let d = rng.gen_range(1..=4);
            let x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
            let eng = PhaseEngine::new(&x);
            for _ in 0..5 {
                let n = rng.gen_range(1..=1u64 << 30);
                let a = eng.phase(n);
                let b = big_phase(&x, n);
                let diff = (a - b).abs().min(1.0 - (a - b).abs());
                assert!(diff < 1e-15, "x={x:?} n={n} {a} {b}");
            }
        }
    }

    #[test]
    fn tiny_coordinates() {
        let x = [1e-30, 3e-25];
        let eng = PhaseEngine::new(&x);
        for n in [1u64, 1000, 1 << 20] {
            let b = big_phase(&x, n);
            assert!((eng.phase(n) - b).abs() < 1e-15);
        }
        assert!(eng.check_range(1 << 20).is_ok());
        assert!(eng.check_range(1 << 60).is_err());
    }

    #[test]
    fn signed_coordinates() {
        let x = [-1e-9, -2.5e-14, 0.25];
        let neg = PhaseEngine::new(&x);
        let pos = PhaseEngine::new(&[1e-9, 2.5e-14, -0.25]);
        for n in [1u64, 17, 40_000, 1 << 22] {
            let a = neg.phase(n);
            let b = pos.phase(n);
            let s = a + b;
            assert!((s - s.round()).abs() < 1e-15, "n={n}");
            let cube = ((n as u128).pow(3) % 4) as f64 / 4.0;
            let direct = -1e-9 * n as f64 - 2.5e-14 * (n as f64).powi(2) + cube;
            let r = direct - direct.round();
            assert!((a - r).abs() < 1e-12, "n={n} {a} {r}");
        }
    }

    #[test]
    fn stepper_matches_direct() {
        let x = [0.123456789, 0.987654321, 0.3333333];
        let eng = PhaseEngine::new(&x);
        let mut st = eng.stepper(5);
        for n in 5..200_000u64 {
            assert_eq!(st.next_phase(), eng.phase(n));
        }
    }
}
