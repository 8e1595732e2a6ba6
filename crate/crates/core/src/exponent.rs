//! Closed-form exponents: s(d), sigma_d, alpha_0, eta, theta, nu, mu, D.

use crate::error::{domain, Result};
use crate::rational::{q, RationalValue};

/// s(d) = d(d+1)/2.
pub fn s_of_d(d: i64) -> Result<i64> {
    if d < 1 {
        return domain(format!("s(d) needs d >= 1, got {d}"));
    }
    Ok(d * (d + 1) / 2)
}

pub(crate) fn sd(d: i64) -> i128 {
    (d as i128) * (d as i128 + 1) / 2
}

fn check_alpha(d: i64, alpha: f64) -> Result<()> {
    if d < 1 {
        return domain(format!("degree must be >= 1, got {d}"));
    }
    if !(0.0..=d as f64).contains(&alpha) {
        return domain(format!("alpha={alpha} outside [0,{d}]"));
    }
    Ok(())
}

/// sigma_d(alpha) = (alpha(2d - alpha + 1) - {alpha}(1 - {alpha})) / 2.
pub fn sigma_d(d: i64, alpha: f64) -> Result<f64> {
    check_alpha(d, alpha)?;
    let m = alpha.floor();
    let u = alpha - m;
    // piecewise-linear form on [m, m+1]; avoids cancellation in the quadratic
    let df = d as f64;
    Ok(m * (2.0 * df + 1.0 - m) / 2.0 + u * (df - m))
}

/// The textbook quadratic form, kept to cross-check the linear form.
pub fn sigma_d_quadratic(d: i64, alpha: f64) -> Result<f64> {
    check_alpha(d, alpha)?;
    let fr = alpha - alpha.floor();
    Ok((alpha * (2.0 * d as f64 - alpha + 1.0) - fr * (1.0 - fr)) / 2.0)
}

/// Exact sigma_d at a rational alpha.
pub fn sigma_d_exact(d: i64, alpha: RationalValue) -> Result<RationalValue> {
    if d < 1 || alpha < RationalValue::zero() || alpha > RationalValue::int(d as i128) {
        return domain(format!("alpha={alpha} outside [0,{d}]"));
    }
    let m = alpha.floor();
    let u = alpha - RationalValue::int(m);
    let d = d as i128;
    Ok(q(m * (2 * d + 1 - m), 2) + u * RationalValue::int(d - m))
}

fn check_s_range(d: i64, s: f64) -> Result<()> {
    if d < 1 {
        return domain(format!("degree must be >= 1, got {d}"));
    }
    let top = sd(d) as f64;
    if !(s >= 0.0 && s <= top) {
        return domain(format!("s={s} outside [0, s(d)={top}]"));
    }
    Ok(())
}

/// The unique alpha in [0,d] with sigma_d(alpha) = s, by bisection.
pub fn alpha_0(d: i64, s: f64) -> Result<f64> {
    check_s_range(d, s)?;
    let (mut lo, mut hi) = (0.0f64, d as f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = sigma_d(d, mid)?;
        if (v - s).abs() <= 1e-13 {
            return Ok(mid);
        }
        if v < s {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Exact inverse of sigma_d for rational s, using linearity on unit intervals.
pub fn alpha_0_exact(d: i64, s: RationalValue) -> Result<RationalValue> {
    check_s_range(d, s.to_f64())?;
    let di = d as i128;
    for m in 0..di {
        let lo = q(m * (2 * di + 1 - m), 2);
        let hi = q((m + 1) * (2 * di - m), 2);
        if s >= lo && s <= hi {
            return Ok(RationalValue::int(m) + (s - lo) / RationalValue::int(di - m));
        }
    }
    domain(format!("s={s} not reached by sigma_{d}"))
}

/// The closed form d + 1/2 - sqrt(d(d+1) - 2s + nu), with nu = 1/4 - 2 omega
/// evaluated at a candidate alpha. Used only as an a-posteriori check.
pub fn alpha_0_closed_form(d: i64, s: f64, alpha: f64) -> f64 {
    let fr = alpha - alpha.floor();
    let omega = fr * (1.0 - fr) / 2.0;
    let nu = 0.25 - 2.0 * omega;
    let df = d as f64;
    df + 0.5 - (df * (df + 1.0) - 2.0 * s + nu).sqrt()
}

/// eta_{s,d}(l) = (s(d) - s)(d - l + 1)/(d + l + 1) for 1 <= l <= d-1.
pub fn eta(s: RationalValue, d: i64, ell: i64) -> Result<RationalValue> {
    if d < 2 || ell < 1 || ell > d - 1 {
        return domain(format!("ell={ell} outside [1,{}]", d - 1));
    }
    let (d, l) = (d as i128, ell as i128);
    Ok((RationalValue::int(sd(d as i64)) - s) * q(d - l + 1, d + l + 1))
}

/// f(x) = (d+1-x)/((d+x+1)(d-x)).
pub fn theta_f(d: i64, x: i64) -> Result<RationalValue> {
    let (d, x) = (d as i128, x as i128);
    if x == d {
        return domain("f has a pole at x = d");
    }
    Ok(q(d + 1 - x, (d + x + 1) * (d - x)))
}

/// theta(d) as the minimum of f at the two integers nearest d+1-sqrt(2(d+1)).
pub fn theta(d: i64) -> Result<RationalValue> {
    if d < 2 {
        return domain(format!("theta needs d >= 2, got {d}"));
    }
    let n = 2 * (d as u64 + 1);
    let fl = n.isqrt() as i64;
    let cl = if (fl as u64) * (fl as u64) == n { fl } else { fl + 1 };
    Ok(theta_f(d, d + 1 - fl)?.min(theta_f(d, d + 1 - cl)?))
}

/// Exhaustive min over l = 1..d-1 of f(l).
pub fn theta_scan(d: i64) -> Result<RationalValue> {
    if d < 2 {
        return domain(format!("theta needs d >= 2, got {d}"));
    }
    let mut best = theta_f(d, 1)?;
    for l in 2..d {
        best = best.min(theta_f(d, l)?);
    }
    Ok(best)
}

/// nu(d,k) = min{1/(2k), 1/(2d-k)}.
pub fn nu(d: i64, k: i64) -> Result<RationalValue> {
    if d < 1 || k < 1 || k > d {
        return domain(format!("nu needs 1 <= k <= d, got d={d} k={k}"));
    }
    let (d, k) = (d as i128, k as i128);
    Ok(q(1, 2 * k).min(q(1, 2 * d - k)))
}

/// Smallest k attaining max_k nu(d,k).
pub fn nu_argmax(d: i64) -> Result<i64> {
    if d < 2 {
        return domain(format!("mu needs d >= 2, got {d}"));
    }
    let mut best = (nu(d, 1)?, 1);
    for k in 2..=d {
        let v = nu(d, k)?;
        if v > best.0 {
            best = (v, k);
        }
    }
    Ok(best.1)
}

/// mu(d) = max_k nu(d,k).
pub fn mu(d: i64) -> Result<RationalValue> {
    nu(d, nu_argmax(d)?)
}

/// D = min{2^(d-1), 2d(d-1)}.
pub fn big_d(d: i64) -> Result<i64> {
    if !(3..=62).contains(&d) {
        return domain(format!("D needs 3 <= d <= 62, got {d}"));
    }
    Ok((1i64 << (d - 1)).min(2 * d * (d - 1)))
}

/// rho(d) = ceil(3d^2/4) - 1.
pub fn rho(d: i64) -> i128 {
    let n = 3 * (d as i128) * (d as i128);
    (n + 3) / 4 - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn s_of_d_values() {
        assert_eq!(s_of_d(2).unwrap(), 3);
        assert_eq!(s_of_d(3).unwrap(), 6);
        assert_eq!(s_of_d(10).unwrap(), 55);
        assert!(s_of_d(0).is_err());
    }

    #[test]
    fn sigma_anchors() {
        assert_eq!(sigma_d(2, 0.0).unwrap(), 0.0);
        assert_eq!(sigma_d(3, 3.0).unwrap(), 6.0);
        assert_eq!(sigma_d(2, 1.0).unwrap(), 2.0);
        assert!((sigma_d(4, 1.5).unwrap() - 5.5).abs() < 1e-12);
        assert!(sigma_d(2, 2.5).is_err());
        assert!(sigma_d(2, -0.1).is_err());
    }

    #[test]
    fn linear_and_quadratic_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=10 {
            for _ in 0..200 {
                let a = rng.gen_range(0.0..=d as f64);
                let x = sigma_d(d, a).unwrap();
                let y = sigma_d_quadratic(d, a).unwrap();
                assert!((x - y).abs() < 1e-11, "d={d} a={a}");
            }
        }
    }

    #[test]
    fn sigma_strictly_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=10 {
            for _ in 0..1000 {
                let a = rng.gen_range(0.0..d as f64);
                let b = rng.gen_range(0.0..d as f64);
                if (a - b).abs() < 1e-9 {
                    continue;
                }
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                assert!(sigma_d(d, lo).unwrap() < sigma_d(d, hi).unwrap());
            }
        }
    }

    #[test]
    fn sigma_linear_on_first_unit() {
        for d in 1..=10 {
            for i in 1..=100 {
                let a = i as f64 / 100.0;
                assert!((sigma_d(d, a).unwrap() - a * d as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn alpha_0_examples() {
        assert!((alpha_0(2, 2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((alpha_0(3, 2.0).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((alpha_0(3, 6.0).unwrap() - 3.0).abs() < 1e-12);
        assert!(alpha_0(3, 6.5).is_err());
        assert_eq!(alpha_0_exact(3, q(2, 1)).unwrap(), q(2, 3));
        assert_eq!(alpha_0_exact(2, q(2, 1)).unwrap(), q(1, 1));
    }

    #[test]
    fn alpha_0_inverts_sigma_and_matches_closed_form() {
        for d in 1..=8 {
            let top = sd(d) as f64;
            for i in 0..=40 {
                let s = top * i as f64 / 40.0;
                let a = alpha_0(d, s).unwrap();
                assert!((sigma_d(d, a).unwrap() - s).abs() <= 1e-9);
                assert!((alpha_0_closed_form(d, s, a) - a).abs() < 1e-7);
                let ex = alpha_0_exact(d, RationalValue::approximate(s, 1_000_000).unwrap());
                assert!((ex.unwrap().to_f64() - a).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta(q(5, 1), 3, 1).unwrap(), q(3, 5));
        assert_eq!(eta(q(10, 1), 4, 2).unwrap(), q(0, 1));
        assert_eq!(eta(q(3, 1), 3, 2).unwrap(), q(1, 1));
        assert!(eta(q(3, 1), 3, 3).is_err());
    }

    #[test]
    fn theta_matches_scan() {
        for d in 2..=50 {
            assert_eq!(theta(d).unwrap(), theta_scan(d).unwrap(), "d={d}");
        }
        assert!(theta(1).is_err());
    }

    #[test]
    fn nu_mu_and_d() {
        assert_eq!(nu(2, 1).unwrap(), q(1, 3));
        assert_eq!(mu(2).unwrap(), q(1, 3));
        assert_eq!(mu(7).unwrap(), q(1, 10));
        assert_eq!(mu(4).unwrap(), q(1, 6));
        assert!(nu(3, 4).is_err());
        assert_eq!(big_d(3).unwrap(), 4);
        assert_eq!(big_d(7).unwrap(), 64);
        assert_eq!(big_d(8).unwrap(), 112);
        assert!(big_d(2).is_err());
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho(2), 2);
        assert_eq!(rho(3), 6);
        for d in 2..=10 {
            let v = sigma_d(d, (d as f64 - 1.0) / 2.0).unwrap();
            assert!((v - rho(d) as f64 / 2.0).abs() < 1e-12);
        }
    }
}
