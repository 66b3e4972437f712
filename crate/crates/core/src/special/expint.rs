//! Generalized exponential integrals `E_n(x)`, returned scaled by `e^x`.
//!
//! `E_n(x) = x^{n-1} Γ(1-n, x)`, so these are the incomplete gamma function at
//! non-positive integer order in a form that neither overflows nor underflows.

use alloc::vec::Vec;

use super::{EPS, EULER_GAMMA, MAX_ITER};
use crate::error::{Error, Result};

/// `e^x E_1(x)` for `x > 0`.
pub fn exp_scaled_e1(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain { a: 0.0, x });
    }
    if x > 1.0 {
        return continued_fraction(1, x);
    }
    // E_1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k k!)
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..MAX_ITER {
        term *= -x / k as f64;
        let add = term / k as f64;
        sum += add;
        if libm::fabs(add) < EPS * libm::fabs(sum) {
            return Ok(libm::exp(x) * (-EULER_GAMMA - libm::log(x) - sum));
        }
    }
    Err(Error::NoConvergence("E_1 series"))
}

/// `e^x E_n(x)` for `n ≥ 0`, `x ≥ 0` (`x > 0` when `n ≤ 1`).
pub fn exp_scaled_expint(n: u32, x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 || (x == 0.0 && n <= 1) {
        return Err(Error::Domain {
            a: 1.0 - n as f64,
            x,
        });
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    match n {
        0 => Ok(1.0 / x),
        _ if x == 0.0 => Ok(1.0 / (n as f64 - 1.0)),
        1 => exp_scaled_e1(x),
        _ if x > 1.0 => continued_fraction(n, x),
        _ => small_argument_series(n, x),
    }
}

/// `[e^x E_1(x), …, e^x E_{max_n}(x)]` for `x > 0`.
///
/// Below `x = 1` the table is built by the upward recurrence
/// `E_{n+1} = (e^{-x} - x E_n)/n`, whose error gain `x/n` stays below one.
/// Above it each entry comes from its own continued fraction.
pub fn exp_scaled_expint_table(max_n: usize, x: f64) -> Result<Vec<f64>> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain { a: 0.0, x });
    }
    let mut out = Vec::with_capacity(max_n);
    if max_n == 0 {
        return Ok(out);
    }
    if x.is_infinite() {
        out.resize(max_n, 0.0);
        return Ok(out);
    }
    if x <= 1.0 {
        let mut current = exp_scaled_e1(x)?;
        out.push(current);
        for n in 1..max_n {
            current = (1.0 - x * current) / n as f64;
            out.push(current);
        }
    } else {
        for n in 1..=max_n {
            out.push(continued_fraction(n as u32, x)?);
        }
    }
    Ok(out)
}

/// Modified Lentz evaluation of the even continued fraction for `e^x E_n(x)`.
fn continued_fraction(n: u32, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let nm1 = n as f64 - 1.0;
    let mut b = x + n as f64;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let a = -(i as f64) * (nm1 + i as f64);
        b += 2.0;
        d = a * d + b;
        if libm::fabs(d) < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = b + a / c;
        if libm::fabs(c) < TINY {
            c = TINY;
        }
        let delta = c * d;
        h *= delta;
        if libm::fabs(delta - 1.0) < EPS {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence("E_n continued fraction"))
}

/// Power series for `E_n(x)`, `n ≥ 2`, `0 < x ≤ 1`, scaled by `e^x`.
fn small_argument_series(n: u32, x: f64) -> Result<f64> {
    let nm1 = (n - 1) as i64;
    // First term: the k = 0 summand 1/(n-1).
    let mut sum = 1.0 / nm1 as f64;
    let mut fact = 1.0;
    for k in 1..MAX_ITER as i64 {
        fact *= -x / k as f64;
        let del = if k != nm1 {
            -fact / (k - nm1) as f64
        } else {
            let psi = -EULER_GAMMA + (1..=nm1).map(|m| 1.0 / m as f64).sum::<f64>();
            fact * (-libm::log(x) + psi)
        };
        sum += del;
        if k > nm1 && libm::fabs(del) < EPS * libm::fabs(sum) {
            return Ok(libm::exp(x) * sum);
        }
    }
    Err(Error::NoConvergence("E_n series"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e0_and_zero_argument() {
        assert_eq!(exp_scaled_expint(0, 2.0).unwrap(), 0.5);
        assert_eq!(exp_scaled_expint(3, 0.0).unwrap(), 0.5);
        assert!(exp_scaled_expint(1, 0.0).is_err());
        assert!(exp_scaled_expint(2, -1.0).is_err());
    }

    #[test]
    fn e1_matches_reference() {
        // E_1(1) = 0.219383934395520273677...
        let v = exp_scaled_e1(1.0).unwrap() * libm::exp(-1.0);
        assert!((v - 0.219_383_934_395_520_27).abs() < 1e-15);
        // E_1(0.1) = 1.82292395841939
        let v = exp_scaled_e1(0.1).unwrap() * libm::exp(-0.1);
        assert!((v / 1.822_923_958_419_390_7 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn table_agrees_with_pointwise() {
        for &x in &[0.01, 0.3, 1.0, 1.5, 7.0, 40.0] {
            let table = exp_scaled_expint_table(30, x).unwrap();
            for (i, &v) in table.iter().enumerate() {
                let direct = exp_scaled_expint(i as u32 + 1, x).unwrap();
                assert!(
                    ((v - direct) / direct).abs() < 1e-12,
                    "n={} x={} table={} direct={}",
                    i + 1,
                    x,
                    v,
                    direct
                );
            }
        }
    }

    #[test]
    fn bounds_hold() {
        // 1/(x+n) < e^x E_n(x) ≤ 1/(x+n-1)
        for n in 1..20u32 {
            for &x in &[0.05, 0.9, 2.0, 25.0] {
                let v = exp_scaled_expint(n, x).unwrap();
                assert!(v > 1.0 / (x + n as f64));
                assert!(v <= 1.0 / (x + n as f64 - 1.0) * (1.0 + 1e-14));
            }
        }
    }
}
