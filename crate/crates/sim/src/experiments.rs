//! Figure reproduction harness: parameter sweeps, the optimum OAM power
//! search and the antenna-count study.

use std::fmt;
use std::str::FromStr;

use cnoma_core::capacity::{PowerAllocation, Scheme, SchemeCapacities};
use cnoma_core::closed_form::exact_scheme_capacities;
use cnoma_core::{Error, OamChannel, OperatingPoint, SeriesControl};
use log::{info, warn};
use rayon::prelude::*;

use crate::error::{Result, SimError};
use crate::mc;

/// `p_N2` grid of the power-allocation figure.
pub const PN2_GRID: [f64; 7] = [0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35];
pub const SNR_START_DB: f64 = 0.0;
pub const SNR_STOP_DB: f64 = 30.0;
pub const SNR_STEP_DB: f64 = 2.5;
pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 7;
/// Antenna counts visited by [`antenna_study`].
pub const ANTENNA_COUNTS: [usize; 4] = [1, 2, 4, 8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    MonteCarlo,
    ClosedForm,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::MonteCarlo, Method::ClosedForm];

    pub fn name(self) -> &'static str {
        match self {
            Method::MonteCarlo => "monte-carlo",
            Method::ClosedForm => "closed-form",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monte-carlo" | "mc" => Ok(Method::MonteCarlo),
            "closed-form" | "exact" => Ok(Method::ClosedForm),
            _ => Err(SimError::Config(format!(
                "unknown method `{s}` (expected monte-carlo or closed-form)"
            ))),
        }
    }
}

/// Quantity varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    Pn2,
    RhoDb,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::Pn2 => "p_n2",
            Variable::RhoDb => "rho_db",
        }
    }
}

/// How the other shares move when `p_N2` is swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pn2Sweep {
    /// `p_F` fixed, `p_N1 = P − p_F − p_N2`.
    #[default]
    ConserveNear,
    /// `p_N1` fixed, `p_F = P − p_N1 − p_N2`.
    FixedPn1,
}

impl Pn2Sweep {
    pub fn name(self) -> &'static str {
        match self {
            Pn2Sweep::ConserveNear => "conserve",
            Pn2Sweep::FixedPn1 => "fixed-pn1",
        }
    }
}

impl FromStr for Pn2Sweep {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conserve" => Ok(Pn2Sweep::ConserveNear),
            "fixed-pn1" => Ok(Pn2Sweep::FixedPn1),
            _ => Err(SimError::Config(format!(
                "unknown p_n2 sweep mode `{s}` (expected conserve or fixed-pn1)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: Variable,
    pub grid: Vec<f64>,
    /// Template whose swept field is overwritten per grid value.
    pub fixed: OperatingPoint,
    pub schemes: Vec<Scheme>,
    pub methods: Vec<Method>,
    pub trials: u64,
    pub seed: u64,
    pub pn2_sweep: Pn2Sweep,
    pub control: SeriesControl,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(SimError::Config("sweep grid is empty".into()));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Config("sweep grid values must be finite".into()));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SimError::Config(
                "sweep grid must be strictly increasing".into(),
            ));
        }
        if self.schemes.is_empty() || self.methods.is_empty() {
            return Err(SimError::Config(
                "sweep needs at least one scheme and one method".into(),
            ));
        }
        if self.methods.contains(&Method::MonteCarlo) && self.trials < 1 {
            return Err(SimError::Config(
                "Monte Carlo needs at least one trial".into(),
            ));
        }
        self.control.validate()?;
        Ok(())
    }

    /// Operating point at one grid value.
    pub fn point_at(&self, value: f64) -> Result<OperatingPoint, Error> {
        let mut point = self.fixed.clone();
        match self.variable {
            Variable::RhoDb => point.rho_db = value,
            Variable::Pn2 => {
                let p = self.fixed.power;
                let total = p.total();
                point.power = match self.pn2_sweep {
                    Pn2Sweep::ConserveNear => {
                        PowerAllocation::new(total - p.p_f() - value, value, p.p_f(), total)?
                    }
                    Pn2Sweep::FixedPn1 => {
                        PowerAllocation::new(p.p_n1(), value, total - p.p_n1() - value, total)?
                    }
                };
            }
        }
        Ok(point)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Capacities {
        value: SchemeCapacities,
        /// Series order for closed-form rows.
        effective_order: Option<usize>,
    },
    /// The grid value violates the power constraints.
    Infeasible(String),
    /// The method does not exist for this scheme.
    Unsupported,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub variable: Variable,
    pub value: f64,
    pub scheme: Scheme,
    pub method: Method,
    pub outcome: Outcome,
}

impl Row {
    pub fn capacities(&self) -> Option<&SchemeCapacities> {
        match &self.outcome {
            Outcome::Capacities { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// One scheme by one method at one point.
pub fn evaluate(
    scheme: Scheme,
    method: Method,
    point: &OperatingPoint,
    trials: u64,
    seed: u64,
    control: &SeriesControl,
) -> Result<Outcome> {
    Ok(match method {
        Method::MonteCarlo => Outcome::Capacities {
            value: mc::ergodic_capacities(scheme, point, trials, seed)?,
            effective_order: None,
        },
        Method::ClosedForm if scheme == Scheme::OmaOam => Outcome::Unsupported,
        Method::ClosedForm => {
            let (value, terms) = exact_scheme_capacities(scheme, point, control)?;
            Outcome::Capacities {
                value,
                effective_order: Some(terms.effective_order),
            }
        }
    })
}

/// Rows ordered by grid index, then scheme, then method. Infeasible grid
/// values produce marked rows instead of an error.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<Row>> {
    spec.validate()?;
    let per_value: Vec<Vec<Row>> = spec
        .grid
        .par_iter()
        .map(|&value| rows_at(spec, value))
        .collect::<Result<_>>()?;
    Ok(per_value.into_iter().flatten().collect())
}

fn rows_at(spec: &SweepSpec, value: f64) -> Result<Vec<Row>> {
    let point = match spec.point_at(value) {
        Ok(p) => Ok(p),
        Err(Error::InfeasiblePower(why)) => {
            warn!(
                "{} = {value}: infeasible allocation ({why})",
                spec.variable.name()
            );
            Err(why.to_string())
        }
        Err(e) => return Err(e.into()),
    };
    let mut rows = Vec::with_capacity(spec.schemes.len() * spec.methods.len());
    for &scheme in &spec.schemes {
        for &method in &spec.methods {
            let outcome = match &point {
                Ok(p) => evaluate(scheme, method, p, spec.trials, spec.seed, &spec.control)?,
                Err(why) => Outcome::Infeasible(why.clone()),
            };
            rows.push(Row {
                variable: spec.variable,
                value,
                scheme,
                method,
                outcome,
            });
        }
    }
    Ok(rows)
}

/// Largest `C_sum` among the feasible rows of `scheme`/`method`; ties go to
/// the earlier row.
pub fn argmax_c_sum(rows: &[Row], scheme: Scheme, method: Method) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for row in rows
        .iter()
        .filter(|r| r.scheme == scheme && r.method == method)
    {
        if let Some(c) = row.capacities() {
            if best.is_none_or(|(_, b)| c.c_sum > b) {
                best = Some((row.value, c.c_sum));
            }
        }
    }
    best
}

/// `0, step, …, stop` with the end point included when it lies on the grid.
pub fn snr_grid(start_db: f64, stop_db: f64, step_db: f64) -> Result<Vec<f64>> {
    if !(step_db > 0.0 && start_db.is_finite() && stop_db >= start_db) {
        return Err(SimError::Config(
            "SNR grid needs start ≤ stop and step > 0".into(),
        ));
    }
    let n = ((stop_db - start_db) / step_db + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start_db + step_db * i as f64).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pn2Optimum {
    pub p_n2: f64,
    pub c_sum: f64,
    /// The maximum sits on the edge of the grid, or the grid was empty.
    pub boundary: bool,
    /// `(p_n2, C_sum)` for every grid point visited.
    pub evaluated: Vec<(f64, f64)>,
}

/// Grid search of closed-form CNOMA-OAM `C_sum` over `p_N2` with
/// `p_N1 = P − p_F − p_N2`, on `step, 2·step, …` strictly inside `(0, P − p_F)`.
pub fn find_optimal_pn2(
    rho_db: f64,
    p_f: f64,
    grid_step: f64,
    fixed: &OperatingPoint,
    control: &SeriesControl,
) -> Result<Pn2Optimum> {
    let total = fixed.power.total();
    if !(p_f > 0.0 && p_f < total) {
        return Err(Error::InfeasiblePower("p_F must lie strictly between 0 and P").into());
    }
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(SimError::Config("p_n2 grid step must be > 0".into()));
    }
    let span = total - p_f;
    let mut template = fixed.clone();
    template.rho_db = rho_db;
    template.power = PowerAllocation::new(0.5 * span, 0.5 * span, p_f, total)?;
    let mut grid: Vec<f64> = (1..)
        // Rounded so that 7 × 0.05 prints as 0.35.
        .map(|k| (k as f64 * grid_step * 1e12).round() / 1e12)
        .take_while(|&v| v < span * (1.0 - 1e-9))
        .collect();
    let empty = grid.is_empty();
    if empty {
        warn!("no p_n2 grid point inside (0, {span}); using the midpoint");
        grid.push(0.5 * span);
    }
    let spec = SweepSpec {
        variable: Variable::Pn2,
        grid,
        fixed: template,
        schemes: vec![Scheme::CnomaOam],
        methods: vec![Method::ClosedForm],
        trials: 1,
        seed: 0,
        pn2_sweep: Pn2Sweep::ConserveNear,
        control: *control,
    };
    let rows = sweep(&spec)?;
    let evaluated: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.capacities().map(|c| (r.value, c.c_sum)))
        .collect();
    let (p_n2, c_sum) = argmax_c_sum(&rows, Scheme::CnomaOam, Method::ClosedForm)
        .ok_or_else(|| SimError::Config("no feasible p_n2 grid point".into()))?;
    let boundary = empty || p_n2 == evaluated[0].0 || p_n2 == evaluated[evaluated.len() - 1].0;
    if boundary && !empty {
        warn!("optimum p_n2 = {p_n2} lies on the grid boundary");
    }
    info!("optimum p_n2 = {p_n2}, C_sum = {c_sum}");
    Ok(Pn2Optimum {
        p_n2,
        c_sum,
        boundary,
        evaluated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Sum capacity versus `p_N2`.
    PowerSplit,
    /// CCU capacity versus SNR.
    Ccu,
    /// CEU capacity versus SNR.
    Ceu,
    /// Sum capacity versus SNR.
    Sum,
}

impl Figure {
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            3 => Some(Figure::PowerSplit),
            4 => Some(Figure::Ccu),
            5 => Some(Figure::Ceu),
            6 => Some(Figure::Sum),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Figure::PowerSplit => 3,
            Figure::Ccu => 4,
            Figure::Ceu => 5,
            Figure::Sum => 6,
        }
    }

    /// CSV column the figure plots.
    pub fn column(self) -> &'static str {
        match self {
            Figure::Ccu => "c_ccu",
            Figure::Ceu => "c_ceu",
            Figure::PowerSplit | Figure::Sum => "c_sum",
        }
    }

    /// Preset sweep; `template` supplies everything except the swept axis.
    pub fn spec(
        self,
        template: &OperatingPoint,
        snr_grid_db: Vec<f64>,
        trials: u64,
        seed: u64,
        pn2_sweep: Pn2Sweep,
        control: SeriesControl,
    ) -> SweepSpec {
        let (variable, grid, schemes) = match self {
            Figure::PowerSplit => (Variable::Pn2, PN2_GRID.to_vec(), vec![Scheme::CnomaOam]),
            _ => (Variable::RhoDb, snr_grid_db, Scheme::ALL.to_vec()),
        };
        SweepSpec {
            variable,
            grid,
            fixed: template.clone(),
            schemes,
            methods: Method::ALL.to_vec(),
            trials,
            seed,
            pn2_sweep,
            control,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntennaRow {
    pub antennas: usize,
    pub optimum: Pn2Optimum,
    /// Smallest `C_sum(CNOMA-OAM) − C_sum(CNOMA)` over the SNR grid.
    pub margin_vs_cnoma: f64,
    /// Smallest `C_sum(CNOMA-OAM) − C_sum(OMA-OAM)` over the SNR grid.
    pub margin_vs_oma: f64,
}

/// Repeats the `p_N2` search and the sum-capacity ordering for each receive
/// antenna count. Margins use same-seed Monte Carlo for all three schemes.
pub fn antenna_study(
    antennas: &[usize],
    template: &OperatingPoint,
    snr_grid_db: &[f64],
    trials: u64,
    seed: u64,
    control: &SeriesControl,
) -> Result<Vec<AntennaRow>> {
    antennas
        .iter()
        .map(|&m| {
            let mut point = template.clone();
            point.oam = OamChannel::new(point.oam.mode(), m)?;
            let optimum = find_optimal_pn2(point.rho_db, point.power.p_f(), 0.05, &point, control)?;
            let mut margin_vs_cnoma = f64::INFINITY;
            let mut margin_vs_oma = f64::INFINITY;
            for &db in snr_grid_db {
                let mut p = point.clone();
                p.rho_db = db;
                let [oam, base, oma] = [Scheme::CnomaOam, Scheme::Cnoma, Scheme::OmaOam]
                    .map(|s| mc::ergodic_capacities(s, &p, trials, seed));
                let oam = oam?.c_sum;
                margin_vs_cnoma = margin_vs_cnoma.min(oam - base?.c_sum);
                margin_vs_oma = margin_vs_oma.min(oam - oma?.c_sum);
            }
            Ok(AntennaRow {
                antennas: m,
                optimum,
                margin_vs_cnoma,
                margin_vs_oma,
            })
        })
        .collect()
}
