mod common;

use cnoma_core::capacity::block_rng;
use cnoma_core::channel::{cdf_min_pair, cdf_power_gain_marcum, cdf_scaled_min, moment_k_factor};
use cnoma_core::{LinkTriple, RicianLink, SeriesControl};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DRAWS: usize = 1_000_000;

fn links() -> [(&'static str, RicianLink); 3] {
    let l = LinkTriple::reference();
    [
        ("bs-ccu", l.bs_ccu),
        ("bs-ceu", l.bs_ceu),
        ("ccu-ceu", l.ccu_ceu),
    ]
}

fn draws(link: &RicianLink, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..DRAWS)
        .map(|_| link.sample_power_gain(&mut rng))
        .collect()
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[test]
fn series_cdf_matches_marcum_on_grid() {
    let control = SeriesControl::default();
    for (name, link) in links() {
        let mut worst = 0.0f64;
        for i in 0..100 {
            let z = link.omega() * 4.0 * (i as f64 + 0.5) / 100.0;
            let series = link.cdf_power_gain(z, &control).unwrap().value;
            let marcum = cdf_power_gain_marcum(&link, z).unwrap();
            worst = worst.max((series - marcum).abs());
        }
        println!("{name}: max |series - marcum| = {worst:e}");
        assert!(worst <= 1e-6, "{name}: {worst:e}");
    }
}

#[test]
fn cdf_at_k2_omega9_z9_matches_marcum() {
    let link = RicianLink::new(2.0, 9.0).unwrap();
    let series = link
        .cdf_power_gain(9.0, &SeriesControl::default())
        .unwrap()
        .value;
    let marcum = cdf_power_gain_marcum(&link, 9.0).unwrap();
    assert!((series - marcum).abs() < 1e-9, "{series} vs {marcum}");
}

#[test]
fn cdf_limits_and_monotonicity() {
    let control = SeriesControl::default();
    for (_, link) in links() {
        assert_eq!(link.cdf_power_gain(0.0, &control).unwrap().value, 0.0);
        assert_eq!(
            link.cdf_power_gain(f64::INFINITY, &control).unwrap().value,
            1.0
        );
        let far = link
            .cdf_power_gain(link.omega() * 40.0, &control)
            .unwrap()
            .value;
        assert!((far - 1.0).abs() < 1e-10);
        let grid = common::log_spaced(1e-3, link.omega() * 10.0, 200);
        let values: Vec<f64> = grid
            .iter()
            .map(|&z| link.cdf_power_gain(z, &control).unwrap().value)
            .collect();
        assert!(values.windows(2).all(|w| w[1] >= w[0]));
        assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

#[test]
fn min_pair_is_product_of_survivals() {
    let l = LinkTriple::reference();
    let control = SeriesControl::default();
    assert_eq!(
        cdf_min_pair(&l.bs_ceu, &l.bs_ccu, &control, 0.0)
            .unwrap()
            .value,
        0.0
    );
    for &z in &common::log_spaced(0.01, 80.0, 60) {
        let joint = cdf_min_pair(&l.bs_ceu, &l.bs_ccu, &control, z)
            .unwrap()
            .value;
        let sx = 1.0 - cdf_power_gain_marcum(&l.bs_ceu, z).unwrap();
        let sy = 1.0 - cdf_power_gain_marcum(&l.bs_ccu, z).unwrap();
        assert!(((1.0 - joint) - sx * sy).abs() < 1e-9, "z={z}");
    }
}

#[test]
fn scaled_min_at_full_power_is_min_pair() {
    let l = LinkTriple::reference();
    let control = SeriesControl::default();
    for &z in &[0.0, 0.5, 2.0, 11.0, 50.0] {
        let a = cdf_scaled_min(&l.ccu_ceu, &l.bs_ccu, 1.0, &control, z)
            .unwrap()
            .value;
        let b = cdf_min_pair(&l.ccu_ceu, &l.bs_ccu, &control, z)
            .unwrap()
            .value;
        assert_eq!(a, b);
    }
}

fn within_binomial(empirical: f64, p: f64, n: usize) -> bool {
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    (empirical - p).abs() <= 3.0 * sigma
}

#[test]
fn min_pair_matches_empirical_cdf() {
    let l = LinkTriple::reference();
    let p = cdf_min_pair(&l.bs_ceu, &l.bs_ccu, &SeriesControl::default(), 5.0)
        .unwrap()
        .value;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let hits = (0..DRAWS)
        .filter(|_| {
            let g1 = l.bs_ccu.sample_power_gain(&mut rng);
            let g2 = l.bs_ceu.sample_power_gain(&mut rng);
            g1.min(g2) <= 5.0
        })
        .count();
    let empirical = hits as f64 / DRAWS as f64;
    assert!(within_binomial(empirical, p, DRAWS), "{empirical} vs {p}");
}

#[test]
fn scaled_min_matches_empirical_cdf() {
    let l = LinkTriple::reference();
    let p = cdf_scaled_min(&l.ccu_ceu, &l.bs_ccu, 0.2, &SeriesControl::default(), 2.0)
        .unwrap()
        .value;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let hits = (0..DRAWS)
        .filter(|_| {
            let g1 = l.bs_ccu.sample_power_gain(&mut rng);
            let g3 = l.ccu_ceu.sample_power_gain(&mut rng);
            (0.2 * g1).min(g3) <= 2.0
        })
        .count();
    let empirical = hits as f64 / DRAWS as f64;
    assert!(within_binomial(empirical, p, DRAWS), "{empirical} vs {p}");
}

#[test]
fn sampler_moments() {
    for (i, (name, link)) in links().into_iter().enumerate() {
        let (mean, var) = mean_var(&draws(&link, 100 + i as u64));
        let k = moment_k_factor(mean, var);
        println!(
            "{name}: mean {mean:.4} (Ω {}), K estimate {k:.4}",
            link.omega()
        );
        assert!(
            ((mean - link.omega()) / link.omega()).abs() < 0.01,
            "{name} mean {mean}"
        );
        assert!(
            ((k - link.k_factor()) / link.k_factor()).abs() < 0.05,
            "{name} K {k}"
        );
    }
}

#[test]
fn rayleigh_limit_has_unit_mean() {
    let link = RicianLink::new(0.0, 1.0).unwrap();
    let (mean, var) = mean_var(&draws(&link, 5));
    assert!((mean - 1.0).abs() < 0.01, "{mean}");
    // Exponential(1): variance 1.
    assert!((var - 1.0).abs() < 0.02, "{var}");
}

#[test]
fn large_k_concentrates_at_omega() {
    let link = RicianLink::new(1e8, 4.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let g = link.sample_power_gain(&mut rng);
        assert!((g - 4.0).abs() < 0.01, "{g}");
    }
}

#[test]
fn identical_seeds_replay_bit_identically() {
    let link = LinkTriple::reference().bs_ccu;
    let a: Vec<u64> = {
        let mut rng = block_rng(42, 7);
        (0..1000)
            .map(|_| link.sample_power_gain(&mut rng).to_bits())
            .collect()
    };
    let b: Vec<u64> = {
        let mut rng = block_rng(42, 7);
        (0..1000)
            .map(|_| link.sample_power_gain(&mut rng).to_bits())
            .collect()
    };
    assert_eq!(a, b);
    let mut other = block_rng(42, 8);
    assert_ne!(a[0], link.sample_power_gain(&mut other).to_bits());
}
