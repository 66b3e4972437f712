//! Upper incomplete gamma function `Γ(a, x) = ∫_x^∞ t^{a-1} e^{-t} dt` for real `a`.

use super::{exp_scaled_e1, EPS, MAX_ITER};
use crate::error::{Error, Result};
use crate::quad;

/// Largest `n` with `n!` finite in `f64`.
const MAX_FACTORIAL: u32 = 170;

/// Above this many lost decimal digits a recurrence step is abandoned.
const CANCELLATION_DIGITS: f64 = 6.0;

/// Arguments of `Γ(a, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaArg {
    pub a: f64,
    pub x: f64,
}

impl GammaArg {
    /// Rejects NaNs, negative `x`, and `(a ≤ 0, x ≤ 0)` where the integral diverges.
    pub fn new(a: f64, x: f64) -> Result<Self> {
        if a.is_nan() || x.is_nan() || a.is_infinite() || x < 0.0 || (a <= 0.0 && x == 0.0) {
            return Err(Error::Domain { a, x });
        }
        Ok(Self { a, x })
    }

    pub fn eval(self) -> Result<f64> {
        upper_incomplete_gamma(self.a, self.x)
    }
}

/// `ln n!`.
pub fn ln_factorial(n: u32) -> f64 {
    if n < 2 {
        0.0
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

fn factorial(n: u32) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Upper incomplete gamma `Γ(a, x)`.
///
/// Positive integer orders use the finite sum `n! e^{-x} Σ_{m≤n} x^m/m!`.
/// For `x > max(1, a+1)` a continued fraction is used for any real `a`.
/// Otherwise positive orders use `Γ(a) − γ(a, x)` and non-positive orders
/// walk the recurrence `Γ(a, x) = (Γ(a+1, x) − x^a e^{-x}) / a` downward from
/// `Γ(0, x) = E_1(x)` (integers) or from the fractional order in `(0, 1)`.
/// When a subtraction loses more than six digits the value is recomputed by
/// adaptive quadrature.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    GammaArg::new(a, x)?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    let value = if a > 0.0 && a == libm::floor(a) && a <= (MAX_FACTORIAL + 1) as f64 {
        integer_order(a as u32 - 1, x)
    } else if x > 1.0 && x > a + 1.0 {
        continued_fraction(a, x)?
    } else if a > 0.0 {
        positive_small_x(a, x)?
    } else {
        recurrence_with_guard(a, x, CANCELLATION_DIGITS)?
    };
    if value.is_infinite() {
        return Err(Error::Overflow);
    }
    Ok(value)
}

/// `Γ(n+1, x) = n! e^{-x} Σ_{m=0}^{n} x^m / m!`.
fn integer_order(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return factorial(n);
    }
    let ln_x = libm::log(x);
    let mut sum = 0.0;
    if x < 600.0 {
        // Σ e^{-x} x^m / m!, scaled by n! at the end.
        let mut term = libm::exp(-x);
        for m in 0..=n {
            if m > 0 {
                term *= x / m as f64;
            }
            sum += term;
        }
        sum * factorial(n)
    } else {
        let ln_nf = ln_factorial(n);
        for m in 0..=n {
            sum += libm::exp(ln_nf - ln_factorial(m) + m as f64 * ln_x - x);
        }
        sum
    }
}

/// Legendre continued fraction, valid for every real `a` once `x > a + 1`.
fn continued_fraction(a: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if libm::fabs(d) < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = b + an / c;
        if libm::fabs(c) < TINY {
            c = TINY;
        }
        let delta = c * d;
        h *= delta;
        if libm::fabs(delta - 1.0) < EPS {
            return Ok(libm::exp(a * libm::log(x) - x) * h);
        }
    }
    Err(Error::NoConvergence("incomplete gamma continued fraction"))
}

/// Lower incomplete gamma `γ(a, x)` by its power series, `a > 0`.
fn lower_series(a: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if libm::fabs(term) < EPS * libm::fabs(sum) {
            return Ok(sum * libm::exp(a * libm::log(x) - x));
        }
    }
    Err(Error::NoConvergence("lower incomplete gamma series"))
}

fn positive_small_x(a: f64, x: f64) -> Result<f64> {
    let complete = libm::tgamma(a);
    if complete.is_infinite() {
        return Err(Error::Overflow);
    }
    let lower = lower_series(a, x)?;
    let value = complete - lower;
    if lost_digits(complete, lower, value) > CANCELLATION_DIGITS {
        return by_quadrature(a, x);
    }
    Ok(value)
}

fn lost_digits(p: f64, q: f64, difference: f64) -> f64 {
    let scale = libm::fabs(p).max(libm::fabs(q));
    if scale == 0.0 {
        return 0.0;
    }
    if difference == 0.0 {
        return f64::INFINITY;
    }
    libm::log10(scale / libm::fabs(difference))
}

/// Downward recurrence for `a ≤ 0`, falling back to quadrature once a step
/// loses more than `max_lost_digits` decimal digits.
pub(crate) fn recurrence_with_guard(a: f64, x: f64, max_lost_digits: f64) -> Result<f64> {
    debug_assert!(a <= 0.0 && x > 0.0);
    let steps = libm::ceil(-a);
    let mut order = a + steps;
    let mut value = if order == 0.0 {
        exp_scaled_e1(x)? * libm::exp(-x)
    } else if x > 1.0 && x > order + 1.0 {
        continued_fraction(order, x)?
    } else {
        positive_small_x(order, x)?
    };
    let ln_x = libm::log(x);
    for _ in 0..steps as u32 {
        order -= 1.0;
        // Γ(s, x) = (Γ(s+1, x) − x^s e^{-x}) / s
        let boundary = libm::exp(order * ln_x - x);
        let difference = value - boundary;
        if lost_digits(value, boundary, difference) > max_lost_digits {
            return by_quadrature(a, x);
        }
        value = difference / order;
        if value.is_infinite() {
            return Err(Error::Overflow);
        }
    }
    Ok(value)
}

/// `Γ(a, x)` by quadrature after substituting `t = x e^u`:
/// `x^a e^{-x} ∫_0^∞ exp(a u − x (e^u − 1)) du`.
fn by_quadrature(a: f64, x: f64) -> Result<f64> {
    let prefactor = libm::exp(a * libm::log(x) - x);
    let upper = libm::log((x + libm::fabs(a) + 800.0) / x);
    let integral = quad::integrate(|u| libm::exp(a * u - x * libm::expm1(u)), 0.0, upper, 1e-13)?;
    let value = prefactor * integral;
    if value.is_infinite() {
        return Err(Error::Overflow);
    }
    Ok(value)
}
