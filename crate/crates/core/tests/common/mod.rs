#![allow(dead_code)]

use meanmotion::switching::ZeroCountResult;
use meanmotion::{OscillatorSum, Term};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Amplitudes with random phase, moduli in [0.2, 3]; frequencies in [0.3, 4]
/// kept at least 0.1 apart.
pub fn random_sum(rng: &mut ChaCha8Rng, m: usize) -> OscillatorSum {
    let mut freqs: Vec<f64> = Vec::with_capacity(m);
    while freqs.len() < m {
        let l = rng.random_range(0.3..4.0);
        if freqs.iter().all(|f: &f64| (f - l).abs() > 0.1) {
            freqs.push(l);
        }
    }
    let terms = freqs
        .into_iter()
        .map(|l| {
            let a = Complex64::from_polar(rng.random_range(0.2..3.0), rng.random_range(0.0..std::f64::consts::TAU));
            Term::new(a, l)
        })
        .collect();
    OscillatorSum::new(terms).unwrap()
}

/// Sign changes of m on a uniform grid of `n` steps plus endpoint zeros.
pub fn brute_force_count(sum: &OscillatorSum, horizon: f64, n: usize, endpoint_tol: f64) -> usize {
    let mut count = 0;
    let mut prev = sum.eval_m(0.0);
    if prev.abs() <= endpoint_tol {
        count += 1;
    }
    for i in 1..=n {
        let t = horizon * i as f64 / n as f64;
        let f = sum.eval_m(t);
        if prev * f < 0.0 {
            count += 1;
        }
        prev = f;
    }
    if prev.abs() <= endpoint_tol {
        count += 1;
    }
    count
}

/// Whether a count mismatch can be attributed to a reported tangency.
pub fn explained_by_tangency(res: &ZeroCountResult, brute: usize) -> bool {
    brute != res.count && !res.suspect_tangencies.is_empty()
}
