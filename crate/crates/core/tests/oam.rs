use cnoma_core::oam::oam_sinr;
use cnoma_core::OamChannel;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Singular values of the channel as an `M × 1` complex matrix, by nalgebra's SVD.
fn svd_oracle(ch: &OamChannel) -> Vec<f64> {
    let m = DMatrix::<nalgebra::Complex<f64>>::from_iterator(
        ch.antennas(),
        1,
        ch.entries()
            .iter()
            .map(|c| nalgebra::Complex::new(c.re, c.im)),
    );
    m.svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

#[test]
fn single_antenna_is_unit_gain() {
    let ch = OamChannel::new(1, 1).unwrap();
    assert_eq!(ch.entries(), &[Complex64::new(1.0, 0.0)]);
    assert!((ch.principal_gain() - 1.0).abs() < 1e-15);
}

#[test]
fn four_antennas_match_svd() {
    for mode in [1, 2] {
        let ch = OamChannel::new(mode, 4).unwrap();
        let oracle = svd_oracle(&ch);
        assert!((oracle[0] - 0.5).abs() < 1e-14);
        assert!(
            (ch.principal_gain() - oracle[0]).abs() < 1e-14,
            "mode {mode}"
        );
        for e in ch.entries() {
            assert!((e.norm() - 0.25).abs() < 1e-15);
        }
    }
}

#[test]
fn singular_spectrum_carries_frobenius_norm() {
    for m in [1, 2, 3, 4, 8, 16] {
        let ch = OamChannel::new(1, m).unwrap();
        let frob: f64 = ch.entries().iter().map(|c| c.norm_sqr()).sum();
        let spectrum: f64 = ch.singular_values().iter().map(|s| s * s).sum();
        assert!((frob - 1.0 / m as f64).abs() < 1e-15);
        assert!((spectrum - frob).abs() < 1e-15, "M={m}");
        let sv = ch.singular_values();
        assert!(sv.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(sv.iter().filter(|&&s| s > 0.0).count(), 1);
    }
}

#[test]
fn gain_does_not_depend_on_mode() {
    let reference = OamChannel::new(0, 8).unwrap().principal_gain();
    for mode in -3..=3 {
        let ch = OamChannel::new(mode, 8).unwrap();
        assert!(
            (ch.principal_gain() - reference).abs() < 1e-15,
            "mode {mode}"
        );
        assert!((svd_oracle(&ch)[0] - reference).abs() < 1e-14);
    }
}

#[test]
fn sinr_values_and_linearity() {
    let ch = OamChannel::new(1, 1).unwrap();
    assert!((oam_sinr(&ch, 0.2, 1.0) - 0.2).abs() < 1e-15);
    assert_eq!(oam_sinr(&ch, 0.0, 100.0), 0.0);
    let rho = 10f64.powf(1.5);
    assert!((oam_sinr(&ch, 0.2, rho) - 6.324_555_320_336_759).abs() < 1e-12);
    let ch4 = OamChannel::new(1, 4).unwrap();
    let base = oam_sinr(&ch4, 0.1, 3.0);
    assert!((oam_sinr(&ch4, 0.3, 3.0) - 3.0 * base).abs() < 1e-14);
    assert!((oam_sinr(&ch4, 0.1, 12.0) - 4.0 * base).abs() < 1e-14);
}

#[test]
fn rejects_zero_antennas() {
    assert!(OamChannel::new(1, 0).is_err());
}
