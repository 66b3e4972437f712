//! Parallel Monte Carlo, figure sweeps, configuration and CSV output around
//! [`cnoma_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod mc;
pub mod output;

pub use error::{Result, SimError};
