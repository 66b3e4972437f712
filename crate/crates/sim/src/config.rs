//! Run configuration.
//!
//! A TOML file holds the same flat keys as the command-line flags, e.g.
//!
//! ```toml
//! rho_db = 15.0
//! pf = 0.6
//! pn1 = 0.2
//! pn2 = 0.2
//! schemes = ["cnoma-oam", "oma-oam"]
//! ```
//!
//! Unknown keys are rejected. Flags override file keys, which override the
//! built-in defaults listed in `--help`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use cnoma_core::capacity::{BaselinePower, PowerAllocation, Scheme};
use cnoma_core::{LinkTriple, OamChannel, OperatingPoint, RicianLink, SeriesControl, SeriesForm};
use serde::Deserialize;

use crate::error::{Result, SimError};
use crate::experiments::{self, Method, Pn2Sweep};

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Transmit SNR ρ in dB [default: 15]
    #[arg(long, allow_negative_numbers = true)]
    pub rho_db: Option<f64>,
    /// Power share of the CCU NOMA symbol x1 [default: (P - pf)/2]
    #[arg(long)]
    pub pn1: Option<f64>,
    /// Power share of the OAM symbol x3 [default: (P - pf)/2]
    #[arg(long)]
    pub pn2: Option<f64>,
    /// Power share of the CEU symbol x2 [default: 0.6·P]
    #[arg(long)]
    pub pf: Option<f64>,
    /// Total transmit power P [default: 1]
    #[arg(long)]
    pub total_power: Option<f64>,
    /// Rician K of the BS→CCU link [default: 5]
    #[arg(long)]
    pub k_ccu: Option<f64>,
    /// Average power Ω of the BS→CCU link [default: 36]
    #[arg(long)]
    pub omega_ccu: Option<f64>,
    /// Rician K of the BS→CEU link [default: 2]
    #[arg(long)]
    pub k_ceu: Option<f64>,
    /// Average power Ω of the BS→CEU link [default: 9]
    #[arg(long)]
    pub omega_ceu: Option<f64>,
    /// Rician K of the CCU→CEU relay link [default: 5]
    #[arg(long)]
    pub k_relay: Option<f64>,
    /// Average power Ω of the CCU→CEU relay link [default: 36]
    #[arg(long)]
    pub omega_relay: Option<f64>,
    /// BS–CCU distance; recorded only, Ω values set the link statistics [default: 0.5]
    #[arg(long)]
    pub d_ccu: Option<f64>,
    /// BS–CEU distance; recorded only [default: 1]
    #[arg(long)]
    pub d_ceu: Option<f64>,
    /// OAM mode index ℓ [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub oam_mode: Option<i32>,
    /// Receive antennas M of the OAM link [default: 1]
    #[arg(long)]
    pub antennas: Option<usize>,
    /// Conventional-CNOMA power split: conserve | match-pn1 [default: conserve]
    #[arg(long)]
    pub baseline: Option<String>,
    /// How p_n2 sweeps move the other shares: conserve | fixed-pn1 [default: conserve]
    #[arg(long)]
    pub pn2_sweep: Option<String>,
    /// Monte Carlo trials per point [default: 1000000]
    #[arg(long)]
    pub trials: Option<u64>,
    /// RNG seed [default: 7]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest series index [default: 40]
    #[arg(long)]
    pub max_order: Option<usize>,
    /// Relative last-term tolerance of the series [default: 1e-10]
    #[arg(long)]
    pub tail_tolerance: Option<f64>,
    /// Closed-form coefficients: derived | printed [default: derived]
    #[arg(long)]
    pub series_form: Option<String>,
    /// First SNR of sweeps in dB [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub snr_start_db: Option<f64>,
    /// Last SNR of sweeps in dB [default: 30]
    #[arg(long, allow_negative_numbers = true)]
    pub snr_stop_db: Option<f64>,
    /// SNR step of sweeps in dB [default: 2.5]
    #[arg(long)]
    pub snr_step_db: Option<f64>,
    /// Grid step of the p_n2 search [default: 0.05]
    #[arg(long)]
    pub pn2_step: Option<f64>,
    /// Comma-separated schemes: cnoma-oam, cnoma, oma-oam [default: all]
    #[arg(long, alias = "scheme", value_delimiter = ',')]
    pub schemes: Option<Vec<String>>,
    /// Comma-separated methods: monte-carlo, closed-form [default: both]
    #[arg(long, alias = "method", value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// Worker threads; results do not depend on it [default: all cores]
    #[arg(long)]
    pub threads: Option<usize>,
    /// CSV output path [default: standard output]
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),* $(,)?) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    /// Keys set in `top` win.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay!(base, top;
            rho_db, pn1, pn2, pf, total_power, k_ccu, omega_ccu, k_ceu, omega_ceu,
            k_relay, omega_relay, d_ccu, d_ceu, oam_mode, antennas, baseline, pn2_sweep,
            trials, seed, max_order, tail_tolerance, series_form, snr_start_db,
            snr_stop_db, snr_step_db, pn2_step, schemes, methods, threads, output,
        )
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let total = self.total_power.unwrap_or(1.0);
        let pf = self.pf.unwrap_or(0.6 * total);
        let near = 0.5 * (total - pf);
        let power = PowerAllocation::new(
            self.pn1.unwrap_or(near),
            self.pn2.unwrap_or(near),
            pf,
            total,
        )?;
        let links = LinkTriple::new(
            RicianLink::new(self.k_ccu.unwrap_or(5.0), self.omega_ccu.unwrap_or(36.0))?,
            RicianLink::new(self.k_ceu.unwrap_or(2.0), self.omega_ceu.unwrap_or(9.0))?,
            RicianLink::new(
                self.k_relay.unwrap_or(5.0),
                self.omega_relay.unwrap_or(36.0),
            )?,
        )?;
        let oam = OamChannel::new(
            self.oam_mode.unwrap_or(cnoma_core::oam::DEFAULT_MODE),
            self.antennas.unwrap_or(cnoma_core::oam::DEFAULT_ANTENNAS),
        )?;
        let baseline = match &self.baseline {
            Some(s) => s.parse::<BaselinePower>()?,
            None => BaselinePower::default(),
        };
        let point = OperatingPoint::new(self.rho_db.unwrap_or(15.0), links, oam, power, baseline)?;

        let form = match self.series_form.as_deref() {
            None | Some("derived") => SeriesForm::Derived,
            Some("printed") => SeriesForm::Printed,
            Some(other) => {
                return Err(SimError::Config(format!(
                    "unknown series form `{other}` (expected derived or printed)"
                )))
            }
        };
        let control = SeriesControl::new(
            self.max_order.unwrap_or(40),
            self.tail_tolerance.unwrap_or(1e-10),
        )?
        .with_form(form);

        let schemes = match &self.schemes {
            Some(list) => list
                .iter()
                .map(|s| s.parse::<Scheme>())
                .collect::<Result<Vec<_>, _>>()?,
            None => Scheme::ALL.to_vec(),
        };
        let methods = match &self.methods {
            Some(list) => list
                .iter()
                .map(|s| s.parse::<Method>())
                .collect::<Result<Vec<_>>>()?,
            None => Method::ALL.to_vec(),
        };
        let pn2_sweep = match &self.pn2_sweep {
            Some(s) => s.parse()?,
            None => Pn2Sweep::default(),
        };
        let snr_grid_db = experiments::snr_grid(
            self.snr_start_db.unwrap_or(experiments::SNR_START_DB),
            self.snr_stop_db.unwrap_or(experiments::SNR_STOP_DB),
            self.snr_step_db.unwrap_or(experiments::SNR_STEP_DB),
        )?;
        let trials = self.trials.unwrap_or(experiments::DEFAULT_TRIALS);
        if trials < 1 {
            return Err(SimError::Config("trials must be ≥ 1".into()));
        }
        if self.threads == Some(0) {
            return Err(SimError::Config("threads must be ≥ 1".into()));
        }
        Ok(Resolved {
            point,
            control,
            trials,
            seed: self.seed.unwrap_or(experiments::DEFAULT_SEED),
            pn2_sweep,
            snr_grid_db,
            pn2_step: self.pn2_step.unwrap_or(0.05),
            schemes,
            methods,
            threads: self.threads,
            output: self.output.clone(),
        })
    }
}

/// A configuration with defaults applied and every value validated.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub point: OperatingPoint,
    pub control: SeriesControl,
    pub trials: u64,
    pub seed: u64,
    pub pn2_sweep: Pn2Sweep,
    pub snr_grid_db: Vec<f64>,
    pub pn2_step: f64,
    pub schemes: Vec<Scheme>,
    pub methods: Vec<Method>,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_reference_point() {
        let r = RunConfig::default().resolve().unwrap();
        assert_eq!(r.point, OperatingPoint::reference());
        assert_eq!(r.trials, 1_000_000);
        assert_eq!(r.snr_grid_db.len(), 13);
        assert_eq!(r.schemes, Scheme::ALL.to_vec());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            RunConfig::from_toml("rho = 3"),
            Err(SimError::Config(_))
        ));
        assert!(RunConfig::from_toml("rho_db = 3.0\nschemes = [\"cnoma\"]").is_ok());
    }

    #[test]
    fn top_layer_wins() {
        let file = RunConfig::from_toml("rho_db = 3.0\nseed = 9").unwrap();
        let flags = RunConfig {
            rho_db: Some(20.0),
            ..Default::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.rho_db, Some(20.0));
        assert_eq!(merged.seed, Some(9));
    }

    #[test]
    fn far_share_alone_splits_the_rest_evenly() {
        let r = RunConfig::from_toml("pf = 0.7").unwrap().resolve().unwrap();
        assert!((r.point.power.p_n1() - 0.15).abs() < 1e-12);
        assert!((r.point.power.p_n2() - 0.15).abs() < 1e-12);
    }

    #[test]
    fn invalid_values_rejected() {
        for text in [
            "pf = 0.3\npn1 = 0.4\npn2 = 0.4",
            "baseline = \"half\"",
            "series_form = \"other\"",
            "schemes = [\"tdma\"]",
            "omega_ceu = 40.0",
            "trials = 0",
        ] {
            assert!(
                RunConfig::from_toml(text).unwrap().resolve().is_err(),
                "{text}"
            );
        }
    }
}
