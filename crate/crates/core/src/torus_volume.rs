//! Haar-measure volumes W_m(r; a₁,…,a_m) = P(|Σ a_k e^{iφ_k}| ≤ r) on the m-torus.
//!
//! Three routes are provided: exact closed forms for m ≤ 2, the Bessel
//! integral r∫₀^∞ J₁(rρ) Π J₀(|a_k|ρ) dρ for m ≥ 2, and seeded Monte Carlo.
//!
//! The Bessel integral is split at a cutoff P. On [0, P] a fixed-order
//! Gauss–Kronrod rule is applied on panels narrow enough to resolve the
//! fastest oscillation. Beyond P every Bessel factor is replaced by its
//! Hankel expansion; the product then splits into terms e^{iωρ}·g(ρ) with
//! g smooth, and each term is integrated along the ray ρ = P ± iy where it
//! decays monotonically.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::{hankel_coefficients, j0, j1};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_adaptive, KronrodRule};

/// Settings for the Bessel-integral route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub tol: f64,
    pub max_panels: usize,
    /// Kronrod points per panel (15 or 21).
    pub panel_order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_panels: 200_000,
            panel_order: 15,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<&'static KronrodRule> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(invalid(format!("quadrature tol must be positive, got {}", self.tol)));
        }
        if self.max_panels < 100 {
            return Err(invalid(format!(
                "quadrature max_panels must be at least 100, got {}",
                self.max_panels
            )));
        }
        KronrodRule::with_order(self.panel_order).ok_or_else(|| {
            invalid(format!(
                "quadrature panel_order must be 15 or 21, got {}",
                self.panel_order
            ))
        })
    }
}

/// Positive moduli |a₁|,…,|a_m|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct AmplitudeSet(Vec<f64>);

impl AmplitudeSet {
    pub fn new(amps: Vec<f64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(invalid("amplitude set must be nonempty"));
        }
        if let Some(a) = amps.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(invalid(format!("amplitudes must be positive and finite, got {a}")));
        }
        Ok(Self(amps))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl TryFrom<Vec<f64>> for AmplitudeSet {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<AmplitudeSet> for Vec<f64> {
    fn from(a: AmplitudeSet) -> Self {
        a.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    Step,
    ClosedFormW2,
    BwwQuadrature,
    MonteCarlo,
}

/// Method-specific diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VolumeDetail {
    Exact,
    Quadrature {
        panels: usize,
        cutoff: f64,
        finite_part: f64,
        tail_part: f64,
        panel_residual: f64,
        /// Bound on the neglected Hankel remainder plus contour quadrature error.
        tail_error: f64,
        /// r·∫_P^∞ Π √(2/(π c_j ρ)) dρ, the tail bound without cancellation.
        absolute_tail_bound: f64,
        /// Amount by which the raw value left [0, 1] before clamping.
        clamp_excursion: f64,
    },
    MonteCarlo {
        samples: u64,
        hits: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusVolumeResult {
    pub value: f64,
    pub method: VolumeMethod,
    pub error_estimate: f64,
    pub detail: VolumeDetail,
}

impl TorusVolumeResult {
    fn exact(value: f64, method: VolumeMethod) -> Self {
        Self {
            value,
            method,
            error_estimate: 0.0,
            detail: VolumeDetail::Exact,
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid(format!("radius r must be finite and non-negative, got {r}")));
    }
    Ok(())
}

fn check_amplitude(a: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid(format!("amplitude must be positive and finite, got {a}")));
    }
    Ok(())
}

/// W₁(r; a): 1 when a ≤ r, else 0.
pub fn w1_step(r: f64, a: f64) -> Result<TorusVolumeResult> {
    check_radius(r)?;
    check_amplitude(a)?;
    let value = if a <= r { 1.0 } else { 0.0 };
    Ok(TorusVolumeResult::exact(value, VolumeMethod::Step))
}

/// W₂(r; a₁, a₂) = 1 − arccos(q)/π with q = (r² − a₁² − a₂²)/(2a₁a₂), clipped at q = ±1.
pub fn w2_closed_form(r: f64, a1: f64, a2: f64) -> Result<TorusVolumeResult> {
    check_radius(r)?;
    check_amplitude(a1)?;
    check_amplitude(a2)?;
    let q = (r * r - (a1 * a1 + a2 * a2)) / (2.0 * a1 * a2);
    let value = if q >= 1.0 {
        1.0
    } else if q <= -1.0 {
        0.0
    } else {
        1.0 - q.acos() / PI
    };
    Ok(TorusVolumeResult {
        value,
        method: VolumeMethod::ClosedFormW2,
        error_estimate: 4.0 * f64::EPSILON,
        detail: VolumeDetail::Exact,
    })
}

/// Exact routes for m ≤ 2, Bessel quadrature otherwise.
pub fn torus_volume(r: f64, amps: &AmplitudeSet, cfg: &QuadratureConfig) -> Result<TorusVolumeResult> {
    check_radius(r)?;
    match amps.as_slice() {
        [a] => w1_step(r, *a),
        [a1, a2] => w2_closed_form(r, *a1, *a2),
        _ if r == 0.0 => Ok(TorusVolumeResult::exact(0.0, VolumeMethod::BwwQuadrature)),
        _ => w_bww(r, amps, cfg),
    }
}

/// Equal pieces of the mapped tail interval refined independently.
const TAIL_PIECES: usize = 16;
/// Hankel terms kept in the tail representation.
const TAIL_TERMS: usize = 8;
/// Minimum c·P for every Bessel factor before the tail takes over.
const ASYMPTOTIC_ONSET: f64 = 25.0;
/// Number of doublings of P tried when the Hankel remainder is too large.
const MAX_CUTOFF_DOUBLINGS: usize = 8;

/// One Bessel factor J_ν(cρ) of the integrand.
struct Factor {
    scale: f64,
    order: u32,
    coeffs: Vec<f64>,
    /// |a_K(ν)|, the first omitted Hankel coefficient.
    first_omitted: f64,
}

impl Factor {
    fn new(scale: f64, order: u32) -> Self {
        let mut coeffs = hankel_coefficients(order, TAIL_TERMS + 1);
        let first_omitted = coeffs.pop().map(f64::abs).unwrap_or(0.0);
        Self {
            scale,
            order,
            coeffs,
            first_omitted,
        }
    }

    /// Phase offset in J_ν(x) ≈ √(2/(πx)) Re[e^{i(x − φ)} S(x)].
    fn phase(&self) -> f64 {
        FRAC_PI_4 + FRAC_PI_2 * f64::from(self.order)
    }

    /// S^±(cρ) = Σ_k (±i)^k a_k (cρ)^{−k} at complex ρ.
    fn series(&self, rho: Complex64, sign: f64) -> Complex64 {
        let inv = (rho * self.scale).inv();
        let step = Complex64::new(0.0, sign) * inv;
        let mut power = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for &a in &self.coeffs {
            acc += power * a;
            power *= step;
        }
        acc
    }

    /// Σ_k |a_k| x^{−k} at x = cP.
    fn series_bound(&self, cutoff: f64) -> f64 {
        let x = self.scale * cutoff;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a.abs() / x.powi(k as i32))
            .sum()
    }

    /// Bound on the Hankel remainder relative to √(2/(πx)) at x = cP.
    fn remainder_bound(&self, cutoff: f64) -> f64 {
        2.0 * self.first_omitted / (self.scale * cutoff).powi(TAIL_TERMS as i32)
    }
}

struct BesselProduct {
    r: f64,
    factors: Vec<Factor>,
}

impl BesselProduct {
    fn new(r: f64, amps: &[f64]) -> Self {
        let mut factors = vec![Factor::new(r, 1)];
        factors.extend(amps.iter().map(|&a| Factor::new(a, 0)));
        Self { r, factors }
    }

    fn exponent(&self) -> f64 {
        0.5 * self.factors.len() as f64
    }

    fn eval(&self, rho: f64) -> f64 {
        let mut v = j1(self.r * rho);
        for f in &self.factors[1..] {
            v *= j0(f.scale * rho);
        }
        v
    }

    /// r·Π √(2/(π c_j)), the constant in |integrand| ≤ C ρ^{−s}.
    fn envelope_constant(&self) -> f64 {
        self.r
            * self
                .factors
                .iter()
                .map(|f| (2.0 / (PI * f.scale)).sqrt())
                .product::<f64>()
    }

    /// r·∫_P^∞ of the envelope, ignoring all cancellation.
    fn absolute_tail_bound(&self, cutoff: f64) -> f64 {
        let s = self.exponent();
        self.envelope_constant() * cutoff.powf(1.0 - s) / (s - 1.0)
    }

    /// Bound on r·∫_P^∞ |exact − Hankel-truncated product|.
    fn hankel_remainder_bound(&self, cutoff: f64) -> f64 {
        let s = self.exponent();
        let (with, without) = self.factors.iter().fold((1.0, 1.0), |(w, wo), f| {
            let b = f.series_bound(cutoff);
            (w * (b + f.remainder_bound(cutoff)), wo * b)
        });
        self.envelope_constant() * (with - without) * cutoff.powf(1.0 - s) / (s - 1.0)
    }

    /// r·∫_P^∞ of the Hankel-truncated product, with its quadrature error.
    fn tail_integral(&self, cutoff: f64, abs_tol: f64) -> (f64, f64) {
        let n = self.factors.len();
        let patterns = 1usize << (n - 1);
        // Pattern σ and −σ are complex conjugates: Π Re X_j = 2^{1−n} Re Σ_{σ₀=+1} Π X_j^{σ_j}.
        let weight = self.envelope_constant() * 2f64.powi(1 - n as i32);
        let per_pattern_tol = abs_tol / (weight * patterns as f64);
        let s = self.exponent();
        let mut total = 0.0;
        let mut error = 0.0;
        for mask in 0..patterns {
            let signs: Vec<f64> = (0..n)
                .map(|j| if j > 0 && mask & (1 << (j - 1)) != 0 { -1.0 } else { 1.0 })
                .collect();
            let omega: f64 = self.factors.iter().zip(&signs).map(|(f, sg)| sg * f.scale).sum();
            let phase: f64 = self.factors.iter().zip(&signs).map(|(f, sg)| sg * f.phase()).sum();
            let dir = if omega >= 0.0 { 1.0 } else { -1.0 };
            let base = Complex64::cis(omega * cutoff - phase) * Complex64::new(0.0, dir);
            let g = |x: f64| -> Complex64 {
                let one_minus = 1.0 - x;
                if one_minus <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let stretch = one_minus.powi(-4);
                let y = cutoff * (stretch - 1.0);
                let jac = 4.0 * cutoff * stretch / one_minus;
                let rho = Complex64::new(cutoff, dir * y);
                let mut v = base * (-omega.abs() * y).exp() * rho.powf(-s) * jac;
                for (f, sg) in self.factors.iter().zip(&signs) {
                    v *= f.series(rho, *sg);
                }
                v
            };
            // Pre-split so the first error estimates already resolve the decay.
            for piece in 0..TAIL_PIECES {
                let lo = piece as f64 / TAIL_PIECES as f64;
                let hi = (piece + 1) as f64 / TAIL_PIECES as f64;
                let re = integrate_adaptive(|x| g(x).re, lo, hi, per_pattern_tol / TAIL_PIECES as f64, 500);
                total += re.value;
                error += re.error;
            }
        }
        (weight * total, weight * error)
    }
}

/// W_m(r) = r ∫₀^∞ J₁(rρ) Π_k J₀(|a_k|ρ) dρ for m ≥ 2.
pub fn w_bww(r: f64, amps: &AmplitudeSet, cfg: &QuadratureConfig) -> Result<TorusVolumeResult> {
    let rule = cfg.validate()?;
    check_radius(r)?;
    if r == 0.0 {
        return Err(invalid("Bessel-integral route needs r > 0"));
    }
    if amps.len() < 2 {
        return Err(invalid(
            "Bessel-integral route needs at least two amplitudes (use the step function for one)",
        ));
    }
    let product = BesselProduct::new(r, amps.as_slice());
    let fastest = r + amps.sum();
    let width_max = FRAC_PI_2 / fastest;
    let slowest = amps.as_slice().iter().copied().fold(r, f64::min);

    // Smallest cutoff for which the truncated Hankel tail is accurate enough.
    let mut cutoff = ASYMPTOTIC_ONSET / slowest;
    let mut doublings = 0;
    while product.hankel_remainder_bound(cutoff) > 0.1 * cfg.tol {
        if doublings == MAX_CUTOFF_DOUBLINGS {
            break;
        }
        cutoff *= 2.0;
        doublings += 1;
    }
    let remainder = product.hankel_remainder_bound(cutoff);

    let mut panels = (cutoff / width_max).ceil() as usize;
    if panels > cfg.max_panels || remainder > cfg.tol {
        let reachable = cfg.max_panels as f64 * width_max;
        let (best, residual) = panel_sum(&product, rule, reachable, cfg.max_panels);
        return Err(Error::QuadratureFailed {
            best: r * best,
            residual: r * residual + product.absolute_tail_bound(reachable),
            panels: cfg.max_panels,
        });
    }

    let (mut finite, mut residual) = panel_sum(&product, rule, cutoff, panels);
    // Refine the panels while the embedded-rule residual dominates.
    while r * residual > 0.5 * cfg.tol && 2 * panels <= cfg.max_panels {
        panels *= 2;
        (finite, residual) = panel_sum(&product, rule, cutoff, panels);
    }
    let (tail, tail_quad_error) = product.tail_integral(cutoff, 0.1 * cfg.tol);

    let raw = r * finite + tail;
    let value = raw.clamp(0.0, 1.0);
    let tail_error = remainder + tail_quad_error;
    let error_estimate = r * residual + tail_error;
    Ok(TorusVolumeResult {
        value,
        method: VolumeMethod::BwwQuadrature,
        error_estimate,
        detail: VolumeDetail::Quadrature {
            panels,
            cutoff,
            finite_part: r * finite,
            tail_part: tail,
            panel_residual: r * residual,
            tail_error,
            absolute_tail_bound: product.absolute_tail_bound(cutoff),
            clamp_excursion: raw - value,
        },
    })
}

fn panel_sum(product: &BesselProduct, rule: &KronrodRule, cutoff: f64, panels: usize) -> (f64, f64) {
    let width = cutoff / panels as f64;
    (0..panels)
        .map(|i| {
            let a = width * i as f64;
            rule.apply(|rho| product.eval(rho), a, a + width)
        })
        .fold((0.0, 0.0), |(v, e), (dv, de)| (v + dv, e + de))
}

/// Samples drawn per independent generator stream.
const MC_CHUNK: u64 = 1 << 14;

/// Fraction of uniformly drawn angle vectors with |Σ a_k e^{iφ_k}| ≤ r.
///
/// Chunk i of the sample draws from ChaCha8 stream i under `seed`, so the
/// result is bit-identical for a given (seed, samples) however the chunks
/// are scheduled across threads.
pub fn w_monte_carlo(r: f64, amps: &AmplitudeSet, samples: u64, seed: u64) -> Result<TorusVolumeResult> {
    check_radius(r)?;
    if samples < 1000 {
        return Err(invalid(format!("Monte Carlo needs at least 1000 samples, got {samples}")));
    }
    let amps = amps.as_slice();
    let r2 = r * r;
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let count = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut hits = 0u64;
            for _ in 0..count {
                let mut z = Complex64::new(0.0, 0.0);
                for &a in amps {
                    let phi = rng.random::<f64>() * TAU;
                    z += Complex64::from_polar(a, phi);
                }
                if z.norm_sqr() <= r2 {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let value = hits as f64 / samples as f64;
    Ok(TorusVolumeResult {
        value,
        method: VolumeMethod::MonteCarlo,
        error_estimate: (value * (1.0 - value) / samples as f64).sqrt(),
        detail: VolumeDetail::MonteCarlo { samples, hits, seed },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amps(v: &[f64]) -> AmplitudeSet {
        AmplitudeSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn step_function_cases() {
        assert_eq!(w1_step(2.0, 1.0).unwrap().value, 1.0);
        assert_eq!(w1_step(1.0, 2.0).unwrap().value, 0.0);
        assert_eq!(w1_step(1.5, 1.5).unwrap().value, 1.0);
        assert!(w1_step(1.0, 0.0).is_err());
        assert!(w1_step(-1.0, 1.0).is_err());
    }

    #[test]
    fn closed_form_boundaries() {
        let (a1, a2) = (1.3, 0.4);
        assert_eq!(w2_closed_form(a1 + a2, a1, a2).unwrap().value, 1.0);
        assert_eq!(w2_closed_form((a1 - a2).abs(), a1, a2).unwrap().value, 0.0);
        let mid = w2_closed_form((a1 * a1 + a2 * a2).sqrt(), a1, a2).unwrap().value;
        assert!((mid - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bww_matches_closed_form_for_worked_weight() {
        let exact = w2_closed_form(1.0, 2.5, 3.0).unwrap().value;
        let q = w_bww(1.0, &amps(&[2.5, 3.0]), &QuadratureConfig::default()).unwrap();
        assert!((q.value - exact).abs() < 1e-6, "{} vs {exact}", q.value);
        assert!(q.error_estimate < 1e-7);
    }

    #[test]
    fn bww_saturates_beyond_total_amplitude() {
        let a = amps(&[0.7, 1.1, 0.4]);
        let q = w_bww(a.sum() + 1.0, &a, &QuadratureConfig::default()).unwrap();
        assert!((q.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn bww_rejects_single_amplitude() {
        assert!(w_bww(1.0, &amps(&[1.0]), &QuadratureConfig::default()).is_err());
    }

    #[test]
    fn bww_reports_panel_budget_failure() {
        let cfg = QuadratureConfig {
            max_panels: 100,
            ..Default::default()
        };
        let err = w_bww(1.0, &amps(&[1e-3, 5.0, 5.0]), &cfg).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailed { .. }));
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let a = amps(&[1.0, 0.5, 0.8]);
        let x = w_monte_carlo(1.0, &a, 50_000, 7).unwrap();
        let y = w_monte_carlo(1.0, &a, 50_000, 7).unwrap();
        assert_eq!(x, y);
        assert_eq!(w_monte_carlo(2.0, &amps(&[1.0]), 1000, 3).unwrap().value, 1.0);
        assert!(w_monte_carlo(1.0, &a, 10, 1).is_err());
    }

    #[test]
    fn config_validation() {
        let bad = QuadratureConfig {
            panel_order: 9,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = QuadratureConfig {
            tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
