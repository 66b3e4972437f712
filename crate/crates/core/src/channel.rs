//! Rician fading statistics, sampling, and the series CDFs of the
//! min-statistics `z1 = min(|h1|², |h2|²)` and `z2 = min(p_N1 |h1|², |h3|²)`.
//!
//! A Rician power gain with factor `K` and mean `Ω` has the density
//! `A Σ_n B(n) g^n e^{-a g}` with `a = (1+K)/Ω`, `A = a e^{-K}` and
//! `B(n) = K^n (1+K)^n / (Ω^n (n!)²)`. Integrating term by term gives the
//! survival function `A Σ_n B̃(n) Γ(n+1, a z)` with `B̃(n) = B(n)/a^{n+1}`.
//! Since `A B̃(n) n! = e^{-K} K^n / n!`, each term is evaluated as a Poisson
//! weight times the regularized `Γ(n+1, a z)/n!`, which keeps every factor in
//! `[0, 1]` for any `K` and `Ω`.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::special::marcum_q1;

/// Rician fading link: `E[|h|²] = Ω`, LOS-to-scatter power ratio `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianLink {
    k_factor: f64,
    omega: f64,
    los: f64,
    scatter: f64,
}

impl RicianLink {
    pub fn new(k_factor: f64, omega: f64) -> Result<Self> {
        if !(k_factor.is_finite() && k_factor >= 0.0) {
            return Err(Error::InvalidParameter(
                "Rician K-factor must be finite and ≥ 0",
            ));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(
                "average link power Ω must be finite and > 0",
            ));
        }
        Ok(Self {
            k_factor,
            omega,
            los: libm::sqrt(k_factor / (k_factor + 1.0)),
            scatter: libm::sqrt(0.5 / (k_factor + 1.0)),
        })
    }

    pub fn k_factor(&self) -> f64 {
        self.k_factor
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Exponential rate `a = (1+K)/Ω`.
    pub fn rate(&self) -> f64 {
        (1.0 + self.k_factor) / self.omega
    }

    /// Series normalizer `A = (1+K) e^{-K} / Ω`.
    pub fn normalizer(&self) -> f64 {
        self.rate() * libm::exp(-self.k_factor)
    }

    /// Draws `|h|²` with `h = √Ω (√(K/(K+1)) + √(1/(K+1)) u)`, `u ~ CN(0, 1)`.
    #[inline]
    pub fn sample_power_gain<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let i = self.los + self.scatter * re;
        let q = self.scatter * im;
        self.omega * (i * i + q * q)
    }

    /// `P(|h|² ≤ z)` by the truncated series.
    pub fn cdf_power_gain(&self, z: f64, control: &SeriesControl) -> Result<SeriesValue> {
        cdf_power_gain(self, z, control)
    }
}

/// The three fading links of the cooperative downlink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkTriple {
    /// BS → CCU (Link 1, gain `|h1|²`, subscript `y`).
    pub bs_ccu: RicianLink,
    /// BS → CEU (Link 2, gain `|h2|²`, subscript `x`).
    pub bs_ceu: RicianLink,
    /// CCU → CEU relay hop (Link 4, gain `|h3|²`, subscript `w`).
    pub ccu_ceu: RicianLink,
}

impl LinkTriple {
    /// Requires the cell-edge direct link to be weaker on average than the
    /// cell-center link.
    pub fn new(bs_ccu: RicianLink, bs_ceu: RicianLink, ccu_ceu: RicianLink) -> Result<Self> {
        if bs_ceu.omega() >= bs_ccu.omega() {
            return Err(Error::InvalidParameter(
                "BS→CEU average power must be below BS→CCU average power",
            ));
        }
        Ok(Self {
            bs_ccu,
            bs_ceu,
            ccu_ceu,
        })
    }

    /// Reference parameters: `K = 5, Ω = 36` on BS→CCU and CCU→CEU,
    /// `K = 2, Ω = 9` on BS→CEU.
    pub fn reference() -> Self {
        Self {
            bs_ccu: RicianLink::new(5.0, 36.0).unwrap(),
            bs_ceu: RicianLink::new(2.0, 9.0).unwrap(),
            ccu_ceu: RicianLink::new(5.0, 36.0).unwrap(),
        }
    }
}

/// How the inner coefficients of the ergodic-capacity series are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeriesForm {
    /// Term-by-term integration of the series CDF:
    /// `(i+j)!/(i! j!) a_x^i a_y^j ρ^{-(i+j)}`.
    #[default]
    Derived,
    /// The typeset coefficients `(i+j)/(i! j!) (a_x^i + a_y^j) ρ^{-(i+j)}`.
    Printed,
}

/// Truncation policy for the infinite sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Largest index used in any single infinite sum.
    pub max_order: usize,
    /// A sum stops once its last term is at most this fraction of the running sum.
    pub tail_tolerance: f64,
    pub form: SeriesForm,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            max_order: 40,
            tail_tolerance: 1e-10,
            form: SeriesForm::Derived,
        }
    }
}

impl SeriesControl {
    pub fn new(max_order: usize, tail_tolerance: f64) -> Result<Self> {
        let control = Self {
            max_order,
            tail_tolerance,
            form: SeriesForm::Derived,
        };
        control.validate()?;
        Ok(control)
    }

    pub fn with_form(mut self, form: SeriesForm) -> Self {
        self.form = form;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_order < 1 {
            return Err(Error::InvalidParameter("series max_order must be ≥ 1"));
        }
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance.is_finite()) {
            return Err(Error::InvalidParameter("series tail_tolerance must be > 0"));
        }
        Ok(())
    }
}

/// Value of a truncated series with its audit trail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Highest index actually summed (largest over all axes).
    pub order: usize,
    /// Magnitude of the last term added (largest over all axes).
    pub last_term: f64,
}

/// Terms `e^{-K} K^n/n! · Q(n+1, s)` of one link's survival series, where
/// `Q` is the regularized upper incomplete gamma at `s = a z`.
///
/// Summation stops at the first `n` past the Poisson mode whose term is at
/// most `tail_tolerance` times the running sum, or once the remaining Poisson
/// mass bounding the tail is below `1e-17`.
fn survival_terms(link: &RicianLink, s: f64, control: &SeriesControl) -> Result<(Vec<f64>, f64)> {
    let k = link.k_factor();
    let mode = libm::floor(k) as usize;
    let mut weight = libm::exp(-k);
    // Q(n+1, s) = e^{-s} Σ_{i≤n} s^i / i!
    let mut poisson_s = libm::exp(-s);
    let mut q = poisson_s;
    let mut terms = Vec::with_capacity(control.max_order + 1);
    let mut sum = 0.0;
    for n in 0..=control.max_order {
        if n > 0 {
            weight *= k / n as f64;
            poisson_s *= s / n as f64;
            q += poisson_s;
        }
        let term = weight * q.min(1.0);
        terms.push(term);
        sum += term;
        if n >= mode
            && (term <= control.tail_tolerance * sum || poisson_tail(k, n, weight) < ABS_TAIL)
        {
            return Ok((terms, term));
        }
    }
    Err(Error::Truncation {
        order: control.max_order,
        last_term: *terms.last().unwrap_or(&0.0),
    })
}

/// Below this the omitted survival mass cannot change `1 − S` in double precision.
const ABS_TAIL: f64 = 1e-17;

/// Bound on `Σ_{m>n} e^{-K} K^m/m!` given the weight at `n > K − 1`.
fn poisson_tail(k: f64, n: usize, weight: f64) -> f64 {
    let r = k / (n as f64 + 1.0);
    if r >= 1.0 {
        return f64::INFINITY;
    }
    weight * r / (1.0 - r)
}

fn check_z(z: f64) -> Result<()> {
    if z.is_nan() || z < 0.0 {
        return Err(Error::InvalidParameter("CDF argument must be ≥ 0"));
    }
    Ok(())
}

/// `P(|h|² ≤ z) = 1 − A Σ_n B̃(n) Γ(n+1, a z)`.
pub fn cdf_power_gain(link: &RicianLink, z: f64, control: &SeriesControl) -> Result<SeriesValue> {
    control.validate()?;
    check_z(z)?;
    if z == 0.0 {
        return Ok(SeriesValue {
            value: 0.0,
            order: 0,
            last_term: 0.0,
        });
    }
    if z.is_infinite() {
        return Ok(SeriesValue {
            value: 1.0,
            order: 0,
            last_term: 0.0,
        });
    }
    let (terms, last_term) = survival_terms(link, link.rate() * z, control)?;
    let survival: f64 = terms.iter().sum();
    Ok(SeriesValue {
        value: (1.0 - survival).clamp(0.0, 1.0),
        order: terms.len() - 1,
        last_term,
    })
}

/// `P(|h|² ≤ z) = 1 − Q_1(√(2K), √(2(1+K) z / Ω))`.
pub fn cdf_power_gain_marcum(link: &RicianLink, z: f64) -> Result<f64> {
    check_z(z)?;
    let a = libm::sqrt(2.0 * link.k_factor());
    let b = libm::sqrt(2.0 * link.rate() * z);
    Ok(1.0 - marcum_q1(a, b)?)
}

/// CDF of `min(s_x G_x, s_y G_y)` for independent Rician gains, as the double
/// series `1 − A_x A_y Σ_n Σ_k B̃_x(n) B̃_y(k) Γ(n+1, a_x z/s_x) Γ(k+1, a_y z/s_y)`.
fn cdf_scaled_pair(
    x_link: &RicianLink,
    x_scale: f64,
    y_link: &RicianLink,
    y_scale: f64,
    control: &SeriesControl,
    z: f64,
) -> Result<SeriesValue> {
    control.validate()?;
    check_z(z)?;
    if z == 0.0 {
        return Ok(SeriesValue {
            value: 0.0,
            order: 0,
            last_term: 0.0,
        });
    }
    if z.is_infinite() {
        return Ok(SeriesValue {
            value: 1.0,
            order: 0,
            last_term: 0.0,
        });
    }
    let (x_terms, x_last) = survival_terms(x_link, x_link.rate() / x_scale * z, control)?;
    let (y_terms, y_last) = survival_terms(y_link, y_link.rate() / y_scale * z, control)?;
    let mut survival = 0.0;
    for &tx in &x_terms {
        for &ty in &y_terms {
            survival += tx * ty;
        }
    }
    Ok(SeriesValue {
        value: (1.0 - survival).clamp(0.0, 1.0),
        order: (x_terms.len() - 1).max(y_terms.len() - 1),
        last_term: x_last.max(y_last),
    })
}

/// CDF of `z1 = min(|h_x|², |h_y|²)`.
pub fn cdf_min_pair(
    x_link: &RicianLink,
    y_link: &RicianLink,
    control: &SeriesControl,
    z1: f64,
) -> Result<SeriesValue> {
    cdf_scaled_pair(x_link, 1.0, y_link, 1.0, control, z1)
}

/// CDF of `z2 = min(|h_w|², p_N1 |h_y|²)`; the `y` rate becomes `a_y / p_N1`.
pub fn cdf_scaled_min(
    w_link: &RicianLink,
    y_link: &RicianLink,
    p_n1: f64,
    control: &SeriesControl,
    z2: f64,
) -> Result<SeriesValue> {
    check_scale(p_n1)?;
    cdf_scaled_pair(w_link, 1.0, y_link, p_n1, control, z2)
}

pub(crate) fn check_scale(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter("power fraction must lie in (0, 1]"));
    }
    Ok(())
}

/// Poisson weights `e^{-K} K^n / n!` truncated by the same rule as the
/// survival series: past the mode, last weight ≤ `tail_tolerance` × cumulative.
pub(crate) fn poisson_weights(k: f64, control: &SeriesControl) -> Result<Vec<f64>> {
    let mode = libm::floor(k) as usize;
    let mut weight = libm::exp(-k);
    let mut weights = Vec::with_capacity(control.max_order + 1);
    let mut cumulative = 0.0;
    for n in 0..=control.max_order {
        if n > 0 {
            weight *= k / n as f64;
        }
        weights.push(weight);
        cumulative += weight;
        if n >= mode && weight <= control.tail_tolerance * cumulative {
            return Ok(weights);
        }
    }
    Err(Error::Truncation {
        order: control.max_order,
        last_term: weight,
    })
}

/// Method-of-moments Rician K estimate from the mean and variance of `|h|²`:
/// with `r = Var/mean²`, `K = (1 − r + √(1 − r)) / r`.
pub fn moment_k_factor(mean: f64, variance: f64) -> f64 {
    let r = variance / (mean * mean);
    if r >= 1.0 {
        return 0.0;
    }
    let root = libm::sqrt(1.0 - r);
    (1.0 - r + root) / r
}
