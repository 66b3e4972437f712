//! Ergodic capacity kernel for downlink cooperative NOMA with an orbital
//! angular momentum (OAM) side channel over independent Rician fading.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the pure numerics:
//!
//! - [`special`]: upper incomplete gamma (including non-positive orders),
//!   scaled generalized exponential integrals and the first-order Marcum Q.
//! - [`channel`]: Rician link statistics, sampling, and the series CDFs of the
//!   min-statistics that drive the closed forms.
//! - [`oam`]: the normalized OAM receive vector and its singular spectrum.
//! - [`capacity`]: power allocation, per-draw capacities for the three schemes
//!   and block-structured Monte Carlo averaging.
//! - [`closed_form`]: exact ergodic capacities from the incomplete-gamma series.
//!
//! IO, threading, sweeps and the command line live in the `cnoma-sim` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod capacity;
pub mod channel;
pub mod closed_form;
mod error;
pub mod oam;
pub mod quad;
pub mod special;
pub mod sum;

pub use capacity::{
    BaselinePower, OperatingPoint, PowerAllocation, Scheme, SchemeCapacities, SymbolCapacities,
};
pub use channel::{LinkTriple, RicianLink, SeriesControl, SeriesForm, SeriesValue};
pub use closed_form::ClosedFormTerms;
pub use error::{Error, Result};
pub use oam::OamChannel;

/// Converts a decibel value to a linear power ratio.
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}
