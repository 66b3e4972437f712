mod common;

use cnoma_core::special::{marcum_q1, upper_incomplete_gamma};
use common::{gamma_upper_quadrature, log_spaced, marcum_q1_poisson};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn gamma_minus_one_at_one_against_quadrature() {
    let oracle = gamma_upper_quadrature(-1.0, 1.0);
    assert!(
        rel(oracle, 0.148_495_506_775_922) < 1e-12,
        "oracle {oracle}"
    );
    let v = upper_incomplete_gamma(-1.0, 1.0).unwrap();
    assert!(rel(v, oracle) < 1e-10);
}

#[test]
fn gamma_matches_quadrature_on_grid() {
    let xs = log_spaced(0.01, 50.0, 30);
    let mut worst = 0.0f64;
    for a in -6..=6 {
        for &x in &xs {
            let a = a as f64;
            let v = upper_incomplete_gamma(a, x).unwrap();
            let oracle = gamma_upper_quadrature(a, x);
            let err = rel(v, oracle);
            worst = worst.max(err);
            assert!(err <= 1e-8, "a={a} x={x}: {v} vs {oracle} ({err:e})");
        }
    }
    println!("worst relative deviation {worst:e}");
}

#[test]
fn gamma_recurrence_consistency() {
    for a in (-60..=60).map(|i| i as f64 * 0.1) {
        for &x in &[0.03, 0.4, 1.0, 2.2, 9.0, 31.0] {
            let lhs = upper_incomplete_gamma(a + 1.0, x).unwrap();
            let rhs = a * upper_incomplete_gamma(a, x).unwrap() + (a * f64::ln(x) - x).exp();
            assert!(rel(lhs, rhs) < 1e-9, "a={a} x={x}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn gamma_strictly_decreasing_in_x() {
    let xs = log_spaced(0.01, 50.0, 60);
    for a in -6..=6 {
        let vals: Vec<f64> = xs
            .iter()
            .map(|&x| upper_incomplete_gamma(a as f64, x).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]), "a={a}");
    }
}

#[test]
fn marcum_one_one_brute_force() {
    let oracle = marcum_q1_poisson(1.0, 1.0);
    // Frozen from the brute-force series above.
    assert!((oracle - 0.732_879_803_796_820_3).abs() < 1e-12, "{oracle}");
    assert!((marcum_q1(1.0, 1.0).unwrap() - oracle).abs() < 1e-12);
}

#[test]
fn marcum_agrees_with_poisson_mixture() {
    for &a in &[0.0, 0.2, 1.0, 2.0, 3.2, 6.0, 12.0] {
        for &b in &[0.0, 0.1, 0.9, 2.0, 3.5, 5.0, 9.0, 14.0] {
            let v = marcum_q1(a, b).unwrap();
            let oracle = marcum_q1_poisson(a, b);
            assert!((v - oracle).abs() < 1e-12, "a={a} b={b}: {v} vs {oracle}");
        }
    }
}

proptest! {
    #[test]
    fn marcum_bounded_and_monotone(a in 0.0f64..8.0, b in 0.0f64..10.0, da in 0.01f64..1.0, db in 0.01f64..1.0) {
        let q = marcum_q1(a, b).unwrap();
        prop_assert!((0.0..=1.0).contains(&q));
        prop_assert!(marcum_q1(a, b + db).unwrap() <= q + 1e-15);
        prop_assert!(marcum_q1(a + da, b).unwrap() >= q - 1e-15);
    }

    #[test]
    fn gamma_recurrence_random(a in -6.0f64..6.0, x in 0.01f64..40.0) {
        let lhs = upper_incomplete_gamma(a + 1.0, x).unwrap();
        let rhs = a * upper_incomplete_gamma(a, x).unwrap() + (a * x.ln() - x).exp();
        prop_assert!(rel(lhs, rhs) < 1e-9);
    }
}
