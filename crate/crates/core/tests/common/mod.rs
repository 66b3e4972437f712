//! Independent numerical oracles. Nothing here calls into the crate's special
//! functions or its quadrature module.
#![allow(dead_code)]

/// Adaptive Simpson with Richardson correction; `eps` is absolute.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        // Below the rounding floor further halving cannot help.
        let floor = 1e-15 * (left.abs() + right.abs());
        if depth == 0 || delta.abs() <= 15.0 * eps.max(floor) {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, eps, 30)
}

/// Sum of Simpson integrals over consecutive panels.
pub fn panels<F: Fn(f64) -> f64>(f: &F, edges: &[f64], rel: f64) -> f64 {
    // Rough magnitude first so the absolute tolerance is meaningful.
    let coarse: f64 = edges
        .windows(2)
        .map(|w| {
            let h = (w[1] - w[0]) / 16.0;
            (0..=16)
                .map(|i| {
                    let wt = if i == 0 || i == 16 {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    wt * f(w[0] + h * i as f64).abs()
                })
                .sum::<f64>()
                * h
                / 3.0
        })
        .sum();
    let eps = rel * coarse.max(1e-300) / edges.len() as f64;
    edges
        .windows(2)
        .map(|w| adaptive_simpson(f, w[0], w[1], eps))
        .sum()
}

/// `Γ(a, x)` by quadrature of `∫_x^∞ t^{a-1} e^{-t} dt` after `t = x e^u`.
pub fn gamma_upper_quadrature(a: f64, x: f64) -> f64 {
    let t_max = x.max(a.abs()) + 120.0;
    let u_max = (t_max / x).ln();
    let f = |u: f64| (a * u - x * (u.exp() - 1.0)).exp();
    let edges: Vec<f64> = (0..=64).map(|i| u_max * i as f64 / 64.0).collect();
    (a * x.ln() - x).exp() * panels(&f, &edges, 1e-13)
}

fn ln_fact(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Brute-force `Q_1(a, b)` from the Poisson mixture
/// `Q_1 = Σ_n e^{-a²/2} (a²/2)^n/n! · Q(n+1, b²/2)` with regularized upper gamma
/// written out as a finite sum.
pub fn marcum_q1_poisson(a: f64, b: f64) -> f64 {
    let lam = 0.5 * a * a;
    let s = 0.5 * b * b;
    let mut total = 0.0;
    for n in 0..600u32 {
        let w = if lam == 0.0 {
            if n == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            (-lam + n as f64 * lam.ln() - ln_fact(n)).exp()
        };
        let q: f64 = if s == 0.0 {
            1.0
        } else {
            (0..=n)
                .map(|i| (-s + i as f64 * s.ln() - ln_fact(i)).exp())
                .sum()
        };
        total += w * q.min(1.0);
        if n as f64 > lam + 20.0 && w < 1e-18 {
            break;
        }
    }
    total
}

pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `E[ln(1 + ρZ)] = ρ ∫_0^∞ S(z) / (1 + ρz) dz` for a survival function `S`,
/// integrated in `u = ln z` on `[ln 1e-12, ln z_max]`.
pub fn log_moment_from_survival<S: Fn(f64) -> f64>(survival: &S, rho: f64, z_max: f64) -> f64 {
    let lo = (1e-12f64).ln();
    let hi = z_max.ln();
    let f = |u: f64| {
        let z = u.exp();
        rho * z * survival(z) / (1.0 + rho * z)
    };
    let edges: Vec<f64> = (0..=80).map(|i| lo + (hi - lo) * i as f64 / 80.0).collect();
    // Mass below 1e-12 contributes ≈ ρ·1e-12.
    panels(&f, &edges, 1e-11) + rho * 1e-12
}
