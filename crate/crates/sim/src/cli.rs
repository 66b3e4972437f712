//! The `cnoma` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use log::LevelFilter;

use crate::config::{Resolved, RunConfig};
use crate::error::{Result, SimError};
use crate::experiments::{self, Figure, Method, Outcome, Row, Variable};
use crate::output;

#[derive(Debug, Parser)]
#[command(
    name = "cnoma",
    version,
    about = "Ergodic capacity of cooperative NOMA with an OAM side beam"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML file with the same keys as the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// More log output (repeatable)
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacities of the selected schemes at one operating point
    Simulate(Common),
    /// Parameter sweep, either a figure preset or an SNR sweep
    Sweep {
        /// Figure preset: 3 (p_n2 sweep), 4 (CCU), 5 (CEU) or 6 (sum)
        #[arg(long, value_parser = clap::value_parser!(u8).range(3..=6))]
        figure: Option<u8>,
        #[command(flatten)]
        common: Common,
    },
    /// Grid search for the OAM power share maximizing the closed-form sum capacity
    Optimize(Common),
    /// Optimum p_n2 and scheme margins for several antenna counts
    Antennas {
        /// Comma-separated antenna counts
        #[arg(long, value_delimiter = ',', default_values_t = experiments::ANTENNA_COUNTS)]
        counts: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Simulate(c) | Command::Optimize(c) => c,
            Command::Sweep { common, .. } | Command::Antennas { common, .. } => common,
        }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let common = cli.command.common();
    let level = match common.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        2 => LevelFilter::Debug,
        _ => LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .try_init();
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn resolve(common: &Common) -> Result<Resolved> {
    let file = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    file.overlay(common.run.clone()).resolve()
}

fn execute(command: &Command) -> Result<()> {
    let cfg = resolve(command.common())?;
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cfg.threads {
            builder = builder.num_threads(n);
        }
        builder
            .build()
            .map_err(|e| SimError::Config(e.to_string()))?
    };
    pool.install(|| match command {
        Command::Simulate(_) => simulate(&cfg),
        Command::Sweep { figure, .. } => sweep(&cfg, *figure),
        Command::Optimize(_) => optimize(&cfg),
        Command::Antennas { counts, .. } => antennas(&cfg, counts),
    })
}

/// Writes the CSV to the output file, or to standard output; the summary then
/// goes to whichever stream the CSV does not use.
fn emit(cfg: &Resolved, rows: &[Row], summary: &str) -> Result<()> {
    match &cfg.output {
        Some(path) => {
            let file = BufWriter::new(File::create(path)?);
            output::write_rows(file, rows)?;
            print!("{summary}");
            io::stdout().flush()?;
        }
        None => {
            output::write_rows(io::stdout().lock(), rows)?;
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn describe(row: &Row) -> String {
    let label = format!("{:<9} {:<11}", row.scheme.name(), row.method.name());
    match &row.outcome {
        Outcome::Capacities { value, .. } if row.method == Method::MonteCarlo => format!(
            "{label} C_CCU = {:.6}  C_CEU = {:.6}  C_sum = {:.6} ± {:.1e}\n",
            value.c_ccu, value.c_ceu, value.c_sum, value.std_error.sum
        ),
        Outcome::Capacities { value, .. } => format!(
            "{label} C_CCU = {:.6}  C_CEU = {:.6}  C_sum = {:.6}\n",
            value.c_ccu, value.c_ceu, value.c_sum
        ),
        Outcome::Infeasible(why) => format!("{label} infeasible: {why}\n"),
        Outcome::Unsupported => format!("{label} no closed form\n"),
    }
}

fn simulate(cfg: &Resolved) -> Result<()> {
    let spec = experiments::SweepSpec {
        variable: Variable::RhoDb,
        grid: vec![cfg.point.rho_db],
        fixed: cfg.point.clone(),
        schemes: cfg.schemes.clone(),
        methods: cfg.methods.clone(),
        trials: cfg.trials,
        seed: cfg.seed,
        pn2_sweep: cfg.pn2_sweep,
        control: cfg.control,
    };
    let rows = experiments::sweep(&spec)?;
    let p = cfg.point.power;
    let mut summary = format!(
        "rho = {} dB, p_n1 = {}, p_n2 = {}, p_f = {}, M = {}, trials = {}, seed = {}\n",
        cfg.point.rho_db,
        p.p_n1(),
        p.p_n2(),
        p.p_f(),
        cfg.point.oam.antennas(),
        cfg.trials,
        cfg.seed
    );
    rows.iter().for_each(|r| summary.push_str(&describe(r)));
    emit(cfg, &rows, &summary)
}

fn sweep(cfg: &Resolved, figure: Option<u8>) -> Result<()> {
    let (mut spec, figure) = match figure.and_then(Figure::from_number) {
        Some(f) => (
            f.spec(
                &cfg.point,
                cfg.snr_grid_db.clone(),
                cfg.trials,
                cfg.seed,
                cfg.pn2_sweep,
                cfg.control,
            ),
            Some(f),
        ),
        None => (
            experiments::SweepSpec {
                variable: Variable::RhoDb,
                grid: cfg.snr_grid_db.clone(),
                fixed: cfg.point.clone(),
                schemes: cfg.schemes.clone(),
                methods: cfg.methods.clone(),
                trials: cfg.trials,
                seed: cfg.seed,
                pn2_sweep: cfg.pn2_sweep,
                control: cfg.control,
            },
            None,
        ),
    };
    // Explicit scheme or method lists narrow a preset.
    if figure.is_some() {
        spec.methods.retain(|m| cfg.methods.contains(m));
        if figure != Some(Figure::PowerSplit) {
            spec.schemes.retain(|s| cfg.schemes.contains(s));
        }
    }
    let rows = experiments::sweep(&spec)?;
    let mut summary = String::new();
    if let Some(f) = figure {
        summary.push_str(&format!(
            "figure {}: {} versus {}\n",
            f.number(),
            f.column(),
            spec.variable.name()
        ));
    }
    for &scheme in &spec.schemes {
        for &method in &spec.methods {
            if let Some((v, c)) = experiments::argmax_c_sum(&rows, scheme, method) {
                summary.push_str(&format!(
                    "{:<9} {:<11} max C_sum = {c:.6} at {} = {v}\n",
                    scheme.name(),
                    method.name(),
                    spec.variable.name()
                ));
            }
        }
    }
    emit(cfg, &rows, &summary)
}

fn optimize(cfg: &Resolved) -> Result<()> {
    let opt = experiments::find_optimal_pn2(
        cfg.point.rho_db,
        cfg.point.power.p_f(),
        cfg.pn2_step,
        &cfg.point,
        &cfg.control,
    )?;
    let mut out = io::stdout().lock();
    for (p, c) in &opt.evaluated {
        writeln!(out, "p_n2 = {p:.4}  C_sum = {c:.6}")?;
    }
    writeln!(
        out,
        "p_n2* = {} (C_sum = {:.6}){}",
        opt.p_n2,
        opt.c_sum,
        if opt.boundary {
            ", on the grid boundary"
        } else {
            ""
        }
    )?;
    Ok(())
}

fn antennas(cfg: &Resolved, counts: &[usize]) -> Result<()> {
    let rows = experiments::antenna_study(
        counts,
        &cfg.point,
        &cfg.snr_grid_db,
        cfg.trials,
        cfg.seed,
        &cfg.control,
    )?;
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "antennas,p_n2_opt,c_sum_opt,min_margin_vs_cnoma,min_margin_vs_oma_oam"
    )?;
    for r in &rows {
        writeln!(
            out,
            "{},{:e},{:e},{:e},{:e}",
            r.antennas, r.optimum.p_n2, r.optimum.c_sum, r.margin_vs_cnoma, r.margin_vs_oma
        )?;
    }
    Ok(())
}
