use aircomp::quadrature::{integrate, integrate_to_infinity, QuadConfig};
use aircomp::special::*;
use aircomp::Error;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

// Reference values computed at 50 significant digits with an independent
// arbitrary-precision library and frozen here.
#[test]
fn frozen_reference_values() {
    assert!(rel(gamma(10.0 / 3.0).unwrap(), 2.778_158_480_437_664_2) < 1e-13);
    assert!(rel(gamma(0.001).unwrap(), 999.423_772_484_595_5) < 1e-13);
    assert!(rel(gamma(170.5).unwrap(), 5.562_092_414_559_999_6e305) < 1e-12);
    assert!(rel(lower_incomplete_gamma(2.7, 3.1).unwrap(), 1.031_851_427_035_777_9) < 1e-10);
    assert!(rel(beta(147.0, 3.0).unwrap(), 6.169_708_950_149_986e-7) < 1e-12);
    let expint_cases = [
        (1.0, 1.0, 0.219_383_934_395_520_27),
        (2.5, 0.7, 0.195_221_264_823_612_93),
        (2.0, 0.3, 0.469_115_225_178_963_86),
        (2.0, 1.5, 0.073_100_786_538_480_85),
        (2.0, 1.6, 0.063_803_184_078_591_74),
        (1.000_000_1, 0.5, 0.559_773_558_948_643_3),
        (2.000_000_3, 0.9, 0.172_404_095_855_179_8),
        (1.9999, 1.2, 0.111_107_567_612_179_64),
        (0.3, 0.2, 2.686_735_333_338_971_4),
        (7.25, 0.01, 0.158_106_951_703_592_03),
        (4.0, 20.0, 8.644_341_992_309_251e-11),
        (1.6, 1e-8, 1.666_608_099_233_988_1),
        (2.5, 100.0, 3.630_190_233_961_828e-46),
    ];
    for (v, x, want) in expint_cases {
        let got = generalized_expint(v, x).unwrap();
        assert!(rel(got, want) < 1e-10, "E_{v}({x}) = {got}, want {want}");
    }
}

#[test]
fn gamma_recurrence_and_factorials() {
    let mut f = 1.0f64;
    for n in 1..=170u32 {
        assert!(rel(gamma(n as f64).unwrap(), f) < 1e-12, "n = {n}");
        f *= n as f64;
    }
    for &x in &[0.01, 0.37, 1.9, 12.5, 80.25] {
        assert!(rel(gamma(x + 1.0).unwrap(), x * gamma(x).unwrap()) < 1e-12);
    }
}

#[test]
fn lower_gamma_against_quadrature() {
    for &(s, x) in &[(0.5, 0.2), (1.7, 4.0), (3.0, 1.0), (10.0, 12.0), (30.0, 25.0)] {
        let q = integrate(|t: f64| t.powf(s - 1.0) * (-t).exp(), 0.0, x, QuadConfig::with_rel_tol(1e-13)).unwrap();
        assert!(rel(lower_incomplete_gamma(s, x).unwrap(), q.value) < 1e-10, "s={s} x={x}");
    }
}

#[test]
fn expint_against_quadrature() {
    for &(v, x) in &[(1.3, 0.05), (2.0, 1.49), (2.0, 1.51), (3.5, 2.0), (1.714_285_714_285_714_2, 0.8), (2.25, 10.0)] {
        let q = integrate_to_infinity(|t: f64| (-x * t).exp() * t.powf(-v), 1.0, QuadConfig::with_rel_tol(1e-13)).unwrap();
        assert!(rel(generalized_expint(v, x).unwrap(), q.value) < 1e-10, "v={v} x={x}");
    }
}

#[test]
fn expint_zero_argument() {
    assert!(rel(generalized_expint(3.0, 0.0).unwrap(), 0.5) < 1e-15);
    assert!(matches!(generalized_expint(0.8, 0.0), Err(Error::Divergent(_))));
    assert!(matches!(generalized_expint(1.0, 0.0), Err(Error::Divergent(_))));
    assert!(matches!(generalized_expint(-1.0, 1.0), Err(Error::Domain(_))));
}

#[test]
fn invalid_arguments_are_domain_errors() {
    assert!(matches!(ln_gamma(-1.0), Err(Error::Domain(_))));
    assert!(matches!(lower_incomplete_gamma(0.0, 1.0), Err(Error::Domain(_))));
    assert!(matches!(lower_incomplete_gamma(1.0, -1.0), Err(Error::Domain(_))));
}

#[test]
fn expint_is_continuous_at_the_switch() {
    for &v in &[0.5, 1.0, 1.714_285_714_285_714_2, 2.0, 2.5, 4.0] {
        let a = generalized_expint(v, EXPINT_SWITCH).unwrap();
        let b = generalized_expint(v, EXPINT_SWITCH * (1.0 + 1e-12)).unwrap();
        assert!(rel(a, b) < 1e-10, "v = {v}");
    }
}

proptest! {
    #[test]
    fn expint_order_recurrence(v in 0.2f64..8.0, x in 0.01f64..30.0) {
        // v E_{v+1}(x) = e^-x - x E_v(x)
        let lhs = v * generalized_expint(v + 1.0, x).unwrap();
        let rhs = (-x).exp() - x * generalized_expint(v, x).unwrap();
        prop_assert!(((lhs - rhs) / lhs).abs() < 1e-9, "lhs {} rhs {}", lhs, rhs);
    }

    #[test]
    fn regularized_gamma_complements(s in 0.1f64..200.0, x in 0.0f64..400.0) {
        let p = regularized_lower_gamma(s, x).unwrap();
        let q = regularized_upper_gamma(s, x).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((p + q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lower_gamma_recurrence(s in 0.2f64..40.0, x in 0.01f64..60.0) {
        // γ(s+1, x) = s γ(s, x) - x^s e^-x
        let lhs = lower_incomplete_gamma(s + 1.0, x).unwrap();
        let rhs = s * lower_incomplete_gamma(s, x).unwrap() - (s * x.ln() - x).exp();
        prop_assert!(((lhs - rhs) / lhs.max(1e-300)).abs() < 1e-9 || (lhs - rhs).abs() < 1e-280);
    }
}
