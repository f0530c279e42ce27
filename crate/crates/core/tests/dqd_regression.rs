use approx::assert_relative_eq;
use decom_core::dqd::{
    combined_measures, dqd_decoherence, dqd_error_probs, relaxation_rate, spectral_function,
    DqdConfig, DqdParams, QuadratureConfig,
};

// Independent 40-digit evaluations of the closed-form rate and of the double
// integral (inner angular integral done analytically, outer by tanh-sinh).
const GAMMA_DEFAULT: f64 = 1.273_433_624_248_337_6e9;
const B2_AT_1PS: f64 = 0.010_361_382_527_450_49;
const B2_AT_100PS: f64 = 8.776_580_733_000_857e-3;
const B2_AT_1NS: f64 = 8.776_581_953_086_563e-3;
// Midpoint rule with 10x the default node density on both axes.
const B2_AT_100PS_BRUTE: f64 = 0.008_776_580_958_984_443;

#[test]
fn relaxation_rate_regression() {
    assert_relative_eq!(
        relaxation_rate(&DqdParams::default()),
        GAMMA_DEFAULT,
        max_relative = 1e-12
    );
}

#[test]
fn spectral_function_regressions() {
    let p = DqdParams::default();
    let cfg = QuadratureConfig::default();
    for (t, want) in [(1e-12, B2_AT_1PS), (1e-10, B2_AT_100PS), (1e-9, B2_AT_1NS)] {
        let got = spectral_function(&p, t, &cfg).unwrap();
        assert_relative_eq!(got, want, max_relative = 1e-9);
    }
    let got = spectral_function(&p, 1e-10, &cfg).unwrap();
    assert_relative_eq!(got, B2_AT_100PS_BRUTE, max_relative = 1e-6);
}

#[test]
fn spectral_function_converges_under_node_doubling() {
    let p = DqdParams::default();
    let cfg = QuadratureConfig::default();
    for t in [1e-15, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10, 1e-9] {
        let a = spectral_function(&p, t, &cfg).unwrap();
        let b = spectral_function(&p, t, &cfg.doubled()).unwrap();
        assert!(a > 0.0);
        assert!(((a - b) / b).abs() < 1e-4, "t = {t:e}: {a} vs {b}");
    }
}

#[test]
fn units_round_trip() {
    let p = DqdParams::default();
    let q = DqdConfig::from_json(&p.to_config().to_json())
        .unwrap()
        .to_params()
        .unwrap();
    assert_relative_eq!(
        relaxation_rate(&q),
        relaxation_rate(&p),
        max_relative = 1e-12
    );
    let cfg = QuadratureConfig::default();
    assert_relative_eq!(
        spectral_function(&q, 1e-11, &cfg).unwrap(),
        spectral_function(&p, 1e-11, &cfg).unwrap(),
        max_relative = 1e-12
    );
}

#[test]
fn small_time_first_order_probabilities() {
    let p = DqdParams::default();
    let cfg = QuadratureConfig::default();
    let t = 1e-16;
    let pr = dqd_error_probs(&p, t, 1, &cfg).unwrap();
    let gamma = relaxation_rate(&p);
    let b2 = spectral_function(&p, t, &cfg).unwrap();
    assert_relative_eq!(pr.p1, gamma * t, max_relative = 1e-6);
    assert_relative_eq!(pr.p2, b2 / 2.0, max_relative = 1e-6);
}

#[test]
fn probabilities_scale_linearly_before_clamping() {
    let p = DqdParams::default();
    let cfg = QuadratureConfig::default();
    let t = 1e-14;
    let one = dqd_error_probs(&p, t, 1, &cfg).unwrap();
    let many = dqd_error_probs(&p, t, 68, &cfg).unwrap();
    assert!(!many.clamped);
    assert_relative_eq!(many.p1, 68.0 * one.p1, max_relative = 1e-12);
    assert_relative_eq!(many.p2, 68.0 * one.p2, max_relative = 1e-12);

    let late = dqd_error_probs(&p, 1e-9, 68, &cfg).unwrap();
    assert!(late.clamped);
    assert!(late.p2 <= 0.5 && late.p1 <= 1.0);
}

#[test]
fn correction_helps_in_the_small_probability_region() {
    let p = DqdParams::default();
    let cfg = QuadratureConfig::default();
    let mut checked = 0;
    for k in 0..=40 {
        let t = 1e-16 * 10f64.powf(k as f64 / 10.0);
        let pt = dqd_decoherence(&p, t, 68, &cfg).unwrap();
        if pt.probs.p1.max(pt.probs.p2) < 0.1 {
            assert!(pt.d <= pt.d0, "t = {t:e}");
            checked += 1;
        }
    }
    assert!(checked > 5);
}

#[test]
fn small_p_efficiency_ratios() {
    let p = 1e-6;
    let (_, amp) = combined_measures(p, 0.0);
    let (_, phase) = combined_measures(0.0, p);
    assert_relative_eq!(amp / (p * p), 15.0 / 8.0, max_relative = 1e-5);
    assert_relative_eq!(phase / (p * p), 10.0, max_relative = 1e-5);
    assert_relative_eq!(15.0 / (amp / (p * p)), 8.0, max_relative = 1e-5);
    assert_relative_eq!(15.0 / (phase / (p * p)), 1.5, max_relative = 1e-5);
}
