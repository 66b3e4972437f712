//! Normalized OAM receive channel and its singular spectrum.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default OAM mode index.
pub const DEFAULT_MODE: i32 = 1;
/// Default number of receive antennas.
pub const DEFAULT_ANTENNAS: usize = 1;

/// Mode-ℓ OAM channel towards the cell-center user, one transmit port and
/// `antennas` receive elements.
#[derive(Debug, Clone, PartialEq)]
pub struct OamChannel {
    mode: i32,
    antennas: usize,
    entries: Vec<Complex64>,
    singular_values: Vec<f64>,
}

impl OamChannel {
    /// Builds `h_m = e^{-j 2π (m-1) ℓ} / M` for `m = 1..=M`.
    ///
    /// The channel is a column vector, so its spectrum has a single nonzero
    /// singular value `‖h‖ = 1/√M`; the remaining `M − 1` entries are zero.
    pub fn new(mode: i32, antennas: usize) -> Result<Self> {
        if antennas == 0 {
            return Err(Error::InvalidParameter(
                "OAM channel needs at least one antenna",
            ));
        }
        let scale = 1.0 / antennas as f64;
        let entries: Vec<Complex64> = (0..antennas)
            .map(|m| Complex64::from_polar(scale, -2.0 * PI * m as f64 * mode as f64))
            .collect();
        let norm = libm::sqrt(entries.iter().map(|h| h.norm_sqr()).sum::<f64>());
        let mut singular_values = vec![0.0; antennas];
        singular_values[0] = norm;
        Ok(Self {
            mode,
            antennas,
            entries,
            singular_values,
        })
    }

    pub fn mode(&self) -> i32 {
        self.mode
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Singular values in nonincreasing order.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Principal singular value `μ_1`.
    pub fn principal_gain(&self) -> f64 {
        self.singular_values[0]
    }
}

impl Default for OamChannel {
    fn default() -> Self {
        Self::new(DEFAULT_MODE, DEFAULT_ANTENNAS).expect("default OAM channel is valid")
    }
}

/// Received SINR of the OAM symbol, `p_N2 ρ μ_1²`.
pub fn oam_sinr(channel: &OamChannel, p_n2: f64, rho: f64) -> f64 {
    let mu = channel.principal_gain();
    p_n2 * rho * mu * mu
}
