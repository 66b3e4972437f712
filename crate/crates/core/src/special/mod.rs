//! Special functions for the Rician series and the closed-form capacities.
//!
//! All functions are pure and reentrant.

mod expint;
mod gamma;
mod marcum;

pub use expint::{exp_scaled_e1, exp_scaled_expint, exp_scaled_expint_table};
pub use gamma::{ln_factorial, upper_incomplete_gamma, GammaArg};
pub use marcum::{exp_scaled_bessel_i, marcum_q1};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Precision floor shared by the series and continued fractions.
pub(crate) const EPS: f64 = 1e-16;
pub(crate) const MAX_ITER: usize = 10_000;
