//! Power allocation, per-draw capacities of the three downlink schemes, and
//! Monte Carlo averaging over Rician draws.
//!
//! Trials are grouped into fixed blocks of [`BLOCK_TRIALS`]; block `b` draws
//! from the ChaCha8 stream `b` of the run seed. Any executor that evaluates
//! blocks independently and merges them in block order reproduces
//! [`ergodic_capacities`] bit for bit.

use core::fmt;
use core::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::LinkTriple;
use crate::error::{Error, Result};
use crate::oam::OamChannel;
use crate::sum::CompensatedSum;

/// Trials per deterministic RNG block.
pub const BLOCK_TRIALS: u64 = 4096;

const SUM_TOLERANCE: f64 = 1e-9;

#[inline]
fn log2_1p(v: f64) -> f64 {
    libm::log1p(v) * core::f64::consts::LOG2_E
}

/// Downlink multiple-access scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Cooperative NOMA plus an interference-free OAM beam to the CCU.
    CnomaOam,
    /// Conventional cooperative NOMA, no OAM beam.
    Cnoma,
    /// TDMA with four quarter slots, including the OAM slot.
    OmaOam,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::CnomaOam, Scheme::Cnoma, Scheme::OmaOam];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::CnomaOam => "cnoma-oam",
            Scheme::Cnoma => "cnoma",
            Scheme::OmaOam => "oma-oam",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cnoma-oam" => Ok(Scheme::CnomaOam),
            "cnoma" => Ok(Scheme::Cnoma),
            "oma-oam" => Ok(Scheme::OmaOam),
            _ => Err(Error::InvalidParameter(
                "scheme must be one of cnoma-oam, cnoma, oma-oam",
            )),
        }
    }
}

/// Power split used by the conventional CNOMA comparator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaselinePower {
    /// `p_N = p_N1 + p_N2`: the OAM share goes back to the CCU NOMA symbol.
    #[default]
    ConservePower,
    /// `p_N = p_N1`, `p_F = P − p_N1`.
    MatchPn1,
}

impl BaselinePower {
    pub fn name(self) -> &'static str {
        match self {
            BaselinePower::ConservePower => "conserve",
            BaselinePower::MatchPn1 => "match-pn1",
        }
    }
}

impl FromStr for BaselinePower {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conserve" => Ok(BaselinePower::ConservePower),
            "match-pn1" => Ok(BaselinePower::MatchPn1),
            _ => Err(Error::InvalidParameter(
                "baseline power must be `conserve` or `match-pn1`",
            )),
        }
    }
}

/// Fractions of the total transmit power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    p_n1: f64,
    p_n2: f64,
    p_f: f64,
    total: f64,
}

impl PowerAllocation {
    /// Checks `p_F > p_N1 + p_N2`, `p_N1 + p_N2 + p_F = P` and non-negativity.
    pub fn new(p_n1: f64, p_n2: f64, p_f: f64, total: f64) -> Result<Self> {
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InfeasiblePower("total power P must be > 0"));
        }
        if [p_n1, p_n2, p_f]
            .iter()
            .any(|p| !(p.is_finite() && *p >= 0.0))
        {
            return Err(Error::InfeasiblePower("power shares must be ≥ 0"));
        }
        if p_f <= p_n1 + p_n2 {
            return Err(Error::InfeasiblePower("requires p_F > p_N1 + p_N2"));
        }
        if libm::fabs(p_n1 + p_n2 + p_f - total) > SUM_TOLERANCE * total {
            return Err(Error::InfeasiblePower("requires p_N1 + p_N2 + p_F = P"));
        }
        Ok(Self {
            p_n1,
            p_n2,
            p_f,
            total,
        })
    }

    /// `p_N1 = p_N2 = (P − p_F)/2`.
    pub fn equal_near_shares(p_f: f64, total: f64) -> Result<Self> {
        let near = 0.5 * (total - p_f);
        Self::new(near, near, p_f, total)
    }

    pub fn p_n1(&self) -> f64 {
        self.p_n1
    }
    pub fn p_n2(&self) -> f64 {
        self.p_n2
    }
    pub fn p_f(&self) -> f64 {
        self.p_f
    }
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Two-symbol split `(p_N, 0, p_F)` used by conventional CNOMA.
    pub fn baseline(&self, policy: BaselinePower) -> PowerAllocation {
        let (p_n, p_f) = match policy {
            BaselinePower::ConservePower => (self.p_n1 + self.p_n2, self.p_f),
            BaselinePower::MatchPn1 => (self.p_n1, self.total - self.p_n1),
        };
        PowerAllocation {
            p_n1: p_n,
            p_n2: 0.0,
            p_f,
            total: self.total,
        }
    }
}

/// Everything that fixes one capacity evaluation except the trial budget.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPoint {
    /// Transmit SNR `ρ = P/σ²` in dB.
    pub rho_db: f64,
    pub links: LinkTriple,
    pub oam: OamChannel,
    pub power: PowerAllocation,
    pub baseline: BaselinePower,
}

impl OperatingPoint {
    pub fn new(
        rho_db: f64,
        links: LinkTriple,
        oam: OamChannel,
        power: PowerAllocation,
        baseline: BaselinePower,
    ) -> Result<Self> {
        if !rho_db.is_finite() {
            return Err(Error::InvalidParameter("SNR in dB must be finite"));
        }
        Ok(Self {
            rho_db,
            links,
            oam,
            power,
            baseline,
        })
    }

    /// 15 dB, reference links, `p = 0.2/0.2/0.6`, single-antenna OAM channel.
    pub fn reference() -> Self {
        Self {
            rho_db: 15.0,
            links: LinkTriple::reference(),
            oam: OamChannel::default(),
            power: PowerAllocation::new(0.2, 0.2, 0.6, 1.0).unwrap(),
            baseline: BaselinePower::ConservePower,
        }
    }

    /// Linear transmit SNR.
    pub fn rho(&self) -> f64 {
        crate::db_to_linear(self.rho_db)
    }

    /// Power split actually used by `scheme`.
    pub fn allocation_for(&self, scheme: Scheme) -> PowerAllocation {
        match scheme {
            Scheme::Cnoma => self.power.baseline(self.baseline),
            _ => self.power,
        }
    }
}

/// Power gains `(|h1|², |h2|², |h3|²)` of one fading draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainDraw {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

impl GainDraw {
    pub fn new(g1: f64, g2: f64, g3: f64) -> Self {
        Self { g1, g2, g3 }
    }
}

/// Per-symbol capacities in bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymbolCapacities {
    pub c_x1: f64,
    pub c_x2: f64,
    pub c_x3: f64,
}

/// Standard errors of the Monte Carlo means.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StdErrors {
    pub ccu: f64,
    pub ceu: f64,
    pub sum: f64,
}

/// Ergodic capacities of one scheme at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeCapacities {
    pub c_ccu: f64,
    pub c_ceu: f64,
    /// Always exactly `c_ccu + c_ceu`.
    pub c_sum: f64,
    pub std_error: StdErrors,
    pub symbols: SymbolCapacities,
}

impl SchemeCapacities {
    /// Assembles `C_CCU = C_x1 + C_x3`, `C_CEU = C_x2`.
    pub fn from_symbols(symbols: SymbolCapacities, std_error: StdErrors) -> Self {
        let c_ccu = symbols.c_x1 + symbols.c_x3;
        let c_ceu = symbols.c_x2;
        Self {
            c_ccu,
            c_ceu,
            c_sum: c_ccu + c_ceu,
            std_error,
            symbols,
        }
    }
}

/// Instantaneous SINRs of the first and second slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstantSinrs {
    /// `ρ |h1|² p_N1` for `x1` at the CCU after SIC.
    pub ccu_x1: f64,
    /// `ρ |h1|² p_F / (ρ |h1|² p_N1 + 1)` for `x2` at the CCU.
    pub ccu_x2: f64,
    /// `ρ |h2|² p_F / (ρ |h2|² p_N1 + 1)` for `x2` on the direct link.
    pub ceu_x2_direct: f64,
    /// `p_N2 ρ μ_1²` for the OAM symbol.
    pub ccu_x3: f64,
    /// `ρ |h3|² P` for the relayed `x2`.
    pub ceu_relay: f64,
}

/// Diagnostic SINRs for one draw. The capacity expressions below use the
/// min-forms directly and do not combine the direct and relayed copies.
pub fn instant_sinrs(
    gains: &GainDraw,
    oam: &OamChannel,
    power: &PowerAllocation,
    rho: f64,
) -> InstantSinrs {
    let s1 = rho * gains.g1;
    let s2 = rho * gains.g2;
    InstantSinrs {
        ccu_x1: s1 * power.p_n1,
        ccu_x2: s1 * power.p_f / (s1 * power.p_n1 + 1.0),
        ceu_x2_direct: s2 * power.p_f / (s2 * power.p_n1 + 1.0),
        ccu_x3: crate::oam::oam_sinr(oam, power.p_n2, rho),
        ceu_relay: instant_relay_sinr(gains.g3, rho, power.total),
    }
}

/// Relay-hop SINR `ρ |h3|² P`.
pub fn instant_relay_sinr(g3: f64, rho: f64, total_power: f64) -> f64 {
    rho * g3 * total_power
}

/// `C_x3 = ½ log2(1 + p_N2 ρ μ_1²)`, a constant over fading.
pub fn oam_capacity(oam: &OamChannel, p_n2: f64, rho: f64) -> f64 {
    0.5 * log2_1p(crate::oam::oam_sinr(oam, p_n2, rho))
}

fn cooperative_noma(gains: &GainDraw, p_n: f64, rho: f64) -> (f64, f64) {
    let z1 = gains.g2.min(gains.g1);
    let z2 = (p_n * gains.g1).min(gains.g3);
    let c_x1 = 0.5 * (log2_1p(z1 * rho) - log2_1p(z1 * p_n * rho));
    debug_assert!(c_x1 >= 0.0);
    (c_x1, 0.5 * log2_1p(z2 * rho))
}

/// Two-slot CNOMA-OAM:
/// `C_x1 = ½[log2(1 + z1 ρ) − log2(1 + z1 p_N1 ρ)]`, `z1 = min(|h2|², |h1|²)`;
/// `C_x2 = ½ log2(1 + min(p_N1 |h1|², |h3|²) ρ)`;
/// `C_x3 = ½ log2(1 + p_N2 ρ μ_1²)`.
pub fn instant_cnoma_oam(
    gains: &GainDraw,
    oam: &OamChannel,
    power: &PowerAllocation,
    rho: f64,
) -> SymbolCapacities {
    let (c_x1, c_x2) = cooperative_noma(gains, power.p_n1, rho);
    SymbolCapacities {
        c_x1,
        c_x2,
        c_x3: oam_capacity(oam, power.p_n2, rho),
    }
}

/// Conventional CNOMA with the two-symbol split held in `power.p_n1()`.
pub fn instant_cnoma_baseline(
    gains: &GainDraw,
    power: &PowerAllocation,
    rho: f64,
) -> SymbolCapacities {
    let (c_x1, c_x2) = cooperative_noma(gains, power.p_n1, rho);
    SymbolCapacities {
        c_x1,
        c_x2,
        c_x3: 0.0,
    }
}

/// Quarter-slot TDMA with full power `P` in each slot.
pub fn instant_oma_oam(
    gains: &GainDraw,
    oam: &OamChannel,
    rho: f64,
    total_power: f64,
) -> SymbolCapacities {
    let z1 = gains.g2.min(gains.g1);
    let z2 = (total_power * gains.g1).min(gains.g3);
    let mu = oam.principal_gain();
    SymbolCapacities {
        c_x1: 0.25 * log2_1p(z1 * total_power * rho),
        c_x2: 0.25 * log2_1p(z2 * rho),
        c_x3: 0.25 * log2_1p(total_power * rho * mu * mu),
    }
}

/// Per-draw capacities of `scheme` at `point`.
pub fn instant_capacities(
    scheme: Scheme,
    gains: &GainDraw,
    point: &OperatingPoint,
) -> SymbolCapacities {
    let rho = point.rho();
    match scheme {
        Scheme::CnomaOam => instant_cnoma_oam(gains, &point.oam, &point.power, rho),
        Scheme::Cnoma => instant_cnoma_baseline(gains, &point.allocation_for(scheme), rho),
        Scheme::OmaOam => instant_oma_oam(gains, &point.oam, rho, point.power.total),
    }
}

/// RNG for block `block` of a run seeded with `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Draws `|h1|²`, `|h2|²`, `|h3|²` in that order.
#[inline]
pub fn draw_gains<R: rand::Rng + ?Sized>(links: &LinkTriple, rng: &mut R) -> GainDraw {
    GainDraw {
        g1: links.bs_ccu.sample_power_gain(rng),
        g2: links.bs_ceu.sample_power_gain(rng),
        g3: links.ccu_ceu.sample_power_gain(rng),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    sum: CompensatedSum,
    sum_sq: CompensatedSum,
}

impl Moments {
    #[inline]
    fn push(&mut self, v: f64) {
        self.sum.add(v);
        self.sum_sq.add(v * v);
    }

    fn merge(&mut self, other: &Moments) {
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
    }

    fn mean(&self, n: u64) -> f64 {
        self.sum.value() / n as f64
    }

    fn std_error(&self, n: u64) -> f64 {
        if n < 2 {
            return 0.0;
        }
        let nf = n as f64;
        let mean = self.sum.value() / nf;
        let var = ((self.sum_sq.value() - nf * mean * mean) / (nf - 1.0)).max(0.0);
        libm::sqrt(var / nf)
    }
}

/// Running Monte Carlo statistics for one scheme.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CapacityStats {
    trials: u64,
    x1: Moments,
    x2: Moments,
    x12: Moments,
    c_x3: f64,
}

impl CapacityStats {
    pub fn trials(&self) -> u64 {
        self.trials
    }

    #[inline]
    pub fn push(&mut self, c: &SymbolCapacities) {
        self.trials += 1;
        self.x1.push(c.c_x1);
        self.x2.push(c.c_x2);
        self.x12.push(c.c_x1 + c.c_x2);
        self.c_x3 = c.c_x3;
    }

    /// Appends `other`; merging blocks in a fixed order is deterministic.
    pub fn merge(&mut self, other: &CapacityStats) {
        if other.trials == 0 {
            return;
        }
        self.trials += other.trials;
        self.x1.merge(&other.x1);
        self.x2.merge(&other.x2);
        self.x12.merge(&other.x12);
        self.c_x3 = other.c_x3;
    }

    pub fn finish(&self) -> Result<SchemeCapacities> {
        let n = self.trials;
        if n == 0 {
            return Err(Error::InvalidParameter(
                "Monte Carlo needs at least one trial",
            ));
        }
        let symbols = SymbolCapacities {
            c_x1: self.x1.mean(n),
            c_x2: self.x2.mean(n),
            c_x3: self.c_x3,
        };
        let std_error = StdErrors {
            ccu: self.x1.std_error(n),
            ceu: self.x2.std_error(n),
            sum: self.x12.std_error(n),
        };
        Ok(SchemeCapacities::from_symbols(symbols, std_error))
    }
}

/// Number of RNG blocks covering `trials`.
pub fn block_count(trials: u64) -> u64 {
    trials.div_ceil(BLOCK_TRIALS)
}

/// Statistics of block `block` of a `trials`-trial run.
pub fn simulate_block(
    scheme: Scheme,
    point: &OperatingPoint,
    trials: u64,
    seed: u64,
    block: u64,
) -> CapacityStats {
    let start = block * BLOCK_TRIALS;
    let len = trials.saturating_sub(start).min(BLOCK_TRIALS);
    let mut rng = block_rng(seed, block);
    let mut stats = CapacityStats::default();
    for _ in 0..len {
        let gains = draw_gains(&point.links, &mut rng);
        stats.push(&instant_capacities(scheme, &gains, point));
    }
    stats
}

/// Ergodic capacities by averaging `trials` fading draws (single-threaded).
pub fn ergodic_capacities(
    scheme: Scheme,
    point: &OperatingPoint,
    trials: u64,
    seed: u64,
) -> Result<SchemeCapacities> {
    if trials < 1 {
        return Err(Error::InvalidParameter(
            "Monte Carlo needs at least one trial",
        ));
    }
    let mut total = CapacityStats::default();
    for block in 0..block_count(trials) {
        total.merge(&simulate_block(scheme, point, trials, seed, block));
    }
    total.finish()
}
