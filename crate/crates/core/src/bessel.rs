//! Bessel functions of the first kind, orders 0 and 1.
//!
//! The fast path uses the ascending power series for |x| ≤ 12 and the
//! Hankel large-argument expansion beyond. [`jp_integral_oracle`] evaluates
//! the Poisson integral representation for any order p ∈ [0, 4] and is slow;
//! it exists to cross-check the fast path.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::integrate_adaptive;

/// Switch between ascending series and asymptotic expansion.
pub const SERIES_LIMIT: f64 = 12.0;

/// A Bessel value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselEval {
    pub value: f64,
    pub abs_error_estimate: f64,
}

/// J₀(x).
pub fn j0(x: f64) -> f64 {
    j0_eval(x).value
}

/// J₁(x).
pub fn j1(x: f64) -> f64 {
    j1_eval(x).value
}

pub fn j0_eval(x: f64) -> BesselEval {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        series(0, x)
    } else {
        hankel(0, x)
    }
}

pub fn j1_eval(x: f64) -> BesselEval {
    let ax = x.abs();
    let mut e = if ax <= SERIES_LIMIT {
        series(1, ax)
    } else {
        hankel(1, ax)
    };
    if x < 0.0 {
        e.value = -e.value;
    }
    e
}

/// J_order(x) = (x/2)^order Σ (−x²/4)^k / (k! (k+order)!) for x ≥ 0.
fn series(order: u32, x: f64) -> BesselEval {
    let y = 0.25 * x * x;
    let mut term = if order == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    let mut largest = term.abs();
    let mut k = 0u32;
    loop {
        k += 1;
        term *= -y / (f64::from(k) * f64::from(k + order));
        sum += term;
        largest = largest.max(term.abs());
        if term.abs() <= 1e-17 * largest && f64::from(k) > y.sqrt() {
            break;
        }
    }
    BesselEval {
        value: sum,
        abs_error_estimate: 4.0 * f64::EPSILON * largest * (f64::from(k) + 1.0).sqrt(),
    }
}

/// Coefficients a_k(ν) = Π_{j=1..k} (4ν² − (2j−1)²) / (k! 8^k) of the Hankel expansion.
pub(crate) fn hankel_coefficients(order: u32, count: usize) -> Vec<f64> {
    let mu = 4.0 * f64::from(order * order);
    let mut coeffs = Vec::with_capacity(count);
    let mut a = 1.0;
    coeffs.push(a);
    for k in 1..count {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (8.0 * k as f64);
        coeffs.push(a);
    }
    coeffs
}

/// J_ν(x) ≈ √(2/(πx)) (P cos χ − Q sin χ), χ = x − (ν/2 + 1/4)π, for x > 12.
///
/// The series is summed until its terms stop decreasing.
fn hankel(order: u32, x: f64) -> BesselEval {
    let mu = 4.0 * f64::from(order * order);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0f64;
    let mut last = 1.0f64;
    let inv_x = 1.0 / x;
    for k in 1..64usize {
        let odd = (2 * k - 1) as f64;
        let next = a * (mu - odd * odd) / (8.0 * k as f64) * inv_x;
        if next.abs() >= last || next == 0.0 {
            break;
        }
        a = next;
        last = next.abs();
        // i^k pattern: k odd feeds Q, k even feeds P with alternating sign.
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if last < 1e-17 {
            break;
        }
    }
    let chi = x - FRAC_PI_4 - 0.5 * f64::from(order) * PI;
    let amp = (2.0 / (PI * x)).sqrt();
    let value = amp * (p * chi.cos() - q * chi.sin());
    // Truncation is bounded by the first omitted term; argument reduction of χ costs ~x·ε.
    let abs_error_estimate = amp * (last + 4.0 * f64::EPSILON * (1.0 + x));
    BesselEval {
        value,
        abs_error_estimate,
    }
}

/// Γ(x) for x > 0 via the Lanczos approximation (g = 7, 9 terms).
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// J_p(x) = (x/2)^p / (Γ(p+½)√π) ∫₀^π sin^{2p}φ e^{−ix cos φ} dφ by adaptive quadrature.
///
/// Returns the real part. The imaginary part vanishes analytically and is
/// checked to be below 1e-10; a larger value is reported as
/// [`Error::Internal`].
pub fn jp_integral_oracle(p: f64, x: f64) -> Result<f64> {
    if !(0.0..=4.0).contains(&p) {
        return Err(invalid(format!("oracle order must lie in [0, 4], got {p}")));
    }
    if !x.is_finite() || x.abs() > 1e3 {
        return Err(invalid(format!("oracle argument must satisfy |x| ≤ 1e3, got {x}")));
    }
    if x < 0.0 && p.fract() != 0.0 {
        return Err(invalid("oracle needs x ≥ 0 for non-integer order"));
    }
    if x == 0.0 {
        return Ok(if p == 0.0 { 1.0 } else { 0.0 });
    }
    let prefactor = (0.5 * x).abs().powf(p) / (gamma(p + 0.5) * PI.sqrt());
    let tol = 1e-11 / prefactor.max(1.0);
    let max_segments = 4000;
    let weight = |phi: f64| {
        if p == 0.0 {
            1.0
        } else {
            phi.sin().powf(2.0 * p)
        }
    };
    let integrand = |phi: f64| -> Complex64 {
        Complex64::from_polar(weight(phi), -x * phi.cos())
    };
    let re = integrate_adaptive(|phi| integrand(phi).re, 0.0, PI, tol, max_segments);
    let im = integrate_adaptive(|phi| integrand(phi).im, 0.0, PI, tol, max_segments);
    let sign = if x < 0.0 && (p as i64) % 2 == 1 {
        -1.0
    } else {
        1.0
    };
    let imag = prefactor * im.value;
    if imag.abs() > 1e-10 {
        return Err(Error::Internal(format!(
            "oracle imaginary part {imag:e} exceeds 1e-10 (p = {p}, x = {x})"
        )));
    }
    Ok(sign * prefactor * re.value)
}
