mod common;

use std::f64::consts::TAU;

use meanmotion::mean_motion::{empirical_mean_motion, mean_motion, ArgumentTracker, UnwrapConfig};
use meanmotion::torus_volume::QuadratureConfig;
use meanmotion::{OscillatorSum, Term};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn weights_form_a_simplex() {
    let mut rng = common::rng(31);
    for case in 0..20 {
        let sum = common::random_sum(&mut rng, 2 + case % 4);
        let res = mean_motion(&sum, &QuadratureConfig::default()).unwrap();
        let eps = res.weight_tolerance.max(1e-12);
        assert!(res.weights.iter().all(|&v| v >= -eps), "{:?}", res.weights);
        assert!((res.weight_sum - 1.0).abs() <= eps, "sum {}", res.weight_sum);
    }
}

#[test]
fn omega_is_a_weighted_average_of_frequencies() {
    let mut rng = common::rng(32);
    for case in 0..20 {
        let sum = common::random_sum(&mut rng, 2 + case % 4);
        let res = mean_motion(&sum, &QuadratureConfig::default()).unwrap();
        let freqs = sum.frequencies();
        let lo = freqs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = freqs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(res.omega >= lo - res.omega_error && res.omega <= hi + res.omega_error);
    }
}

#[test]
fn phases_do_not_matter() {
    let mut rng = common::rng(33);
    for case in 0..10 {
        let sum = common::random_sum(&mut rng, 2 + case % 3);
        let rotated = OscillatorSum::new(
            sum.terms()
                .iter()
                .map(|t| Term::new(t.amplitude * Complex64::cis(rng.random_range(0.0..TAU)), t.frequency))
                .collect(),
        )
        .unwrap();
        let cfg = QuadratureConfig::default();
        let a = mean_motion(&sum, &cfg).unwrap().omega;
        let b = mean_motion(&rotated, &cfg).unwrap().omega;
        assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }
}

#[test]
fn empirical_rate_approaches_formula() {
    let mut rng = common::rng(34);
    let mut checked = 0;
    while checked < 8 {
        let m = 2 + checked % 3;
        let sum = common::random_sum(&mut rng, m);
        // Well-separated moduli keep |z| away from the origin most of the time.
        let mut moduli = sum.moduli();
        moduli.sort_by(f64::total_cmp);
        if moduli.windows(2).any(|w| w[1] - w[0] < 0.3) {
            continue;
        }
        let formula = mean_motion(&sum, &QuadratureConfig::default()).unwrap().omega;
        let empirical = empirical_mean_motion(&sum, 2000.0, &UnwrapConfig::default()).unwrap();
        assert!(
            (empirical.omega_hat - formula).abs() <= 0.02 * sum.max_abs_frequency(),
            "formula {formula}, empirical {}",
            empirical.omega_hat
        );
        checked += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn unwrapping_matches_fine_grid(seed in 0u64..10_000) {
        let mut rng = common::rng(seed);
        let sum = common::random_sum(&mut rng, 3);
        let horizon = 40.0;
        let cfg = UnwrapConfig::default();
        let mut tracker = ArgumentTracker::new(&sum, &cfg).unwrap();
        tracker.advance_to(horizon).unwrap();
        let adaptive = tracker.phase();

        // Independent oracle: unwrap on a grid ten times finer than the tracker's step.
        let steps = (horizon * sum.max_abs_frequency() / 0.005).ceil() as usize;
        let mut phase = sum.evaluate_z(0.0).arg();
        let mut prev = sum.evaluate_z(0.0);
        let mut min_abs = prev.norm();
        for i in 1..=steps {
            let z = sum.evaluate_z(horizon * i as f64 / steps as f64);
            phase += (z / prev).arg();
            prev = z;
            min_abs = min_abs.min(z.norm());
        }
        prop_assume!(min_abs > 1e-3 * sum.total_amplitude());
        prop_assert!((adaptive - phase).abs() <= 1e-6, "adaptive {adaptive}, grid {phase}");
    }
}
