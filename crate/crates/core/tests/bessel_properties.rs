use std::f64::consts::PI;

use meanmotion::bessel::{j0, j1, jp_integral_oracle};
use proptest::prelude::*;

#[test]
fn derivative_identity() {
    let h = 1e-5;
    for i in 0..100 {
        let x = 0.1 + (50.0 - 0.1) * i as f64 / 99.0;
        let d = (j0(x + h) - j0(x - h)) / (2.0 * h);
        assert!((d + j1(x)).abs() <= 1e-6, "x = {x}");
    }
}

#[test]
fn half_order_matches_elementary_form() {
    // J_{1/2}(x) = √(2/(πx)) sin x exercises the oracle at non-integer order.
    for x in [0.3, 1.0, 4.5, 17.0] {
        let exact = (2.0 / (PI * x)).sqrt() * x.sin();
        assert!((jp_integral_oracle(0.5, x).unwrap() - exact).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bounded_by_one(x in -200.0..200.0f64) {
        prop_assert!(j0(x).abs() <= 1.0);
        prop_assert!(j1(x).abs() <= 1.0);
    }

    #[test]
    fn asymptotic_envelope(x in 12.0..500.0f64) {
        prop_assert!(j0(x).abs() <= 1.1 * (2.0 / (PI * x)).sqrt());
    }

    #[test]
    fn fast_path_matches_oracle(x in 0.0..100.0f64) {
        prop_assert!((j0(x) - jp_integral_oracle(0.0, x).unwrap()).abs() <= 1e-8);
        prop_assert!((j1(x) - jp_integral_oracle(1.0, x).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn parity(x in 0.0..60.0f64) {
        prop_assert_eq!(j0(-x), j0(x));
        prop_assert_eq!(j1(-x), -j1(x));
    }
}
