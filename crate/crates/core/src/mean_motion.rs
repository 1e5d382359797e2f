//! Mean motion Ω = lim Φ(t)/t of z(t) = Σ a_k e^{iλ_k t}.
//!
//! [`mean_motion`] evaluates the weighted average Ω = Σ λ_k V_k with
//! V_k = W_{m−1}(|a_k|; the other moduli). [`empirical_mean_motion`] tracks
//! the continuous argument of z along a trajectory instead.

use std::f64::consts::FRAC_PI_2;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::oscillator::OscillatorSum;
use crate::torus_volume::{torus_volume, AmplitudeSet, QuadratureConfig, TorusVolumeResult};

pub const DEFAULT_RESONANCE_BOUND: u32 = 10;
/// Cap on m·(2L+1)^m enumerated candidates.
pub const RESONANCE_WORK_CAP: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResonanceStatus {
    NonResonantUpToBound,
    /// Some relation Σℓ_kλ_k ≈ 0 has Σℓ_k = 0.
    Resonant,
    /// Relations exist, but each has Σℓ_k ≠ 0.
    AlmostResonanceOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub status: ResonanceStatus,
    pub witness: Option<Vec<i64>>,
    pub search_bound: u32,
    pub tolerance: f64,
}

/// Exhaustive search for integer relations Σ ℓ_k λ_k ≈ 0 with ℓ ∈ [−L, L]^m \ {0}.
///
/// Only ℓ whose first nonzero entry is positive are enumerated. The witness
/// returned has the smallest L1 norm among the relations that decide the
/// status. `tol` defaults to 1e-9·max|λ_k|.
pub fn check_resonance(freqs: &[f64], bound: u32, tol: Option<f64>) -> Result<ResonanceReport> {
    if freqs.is_empty() {
        return Err(invalid("resonance check needs at least one frequency"));
    }
    if bound == 0 {
        return Err(invalid("resonance search bound must be at least 1"));
    }
    if freqs.iter().any(|f| !f.is_finite()) {
        return Err(invalid("frequencies must be finite"));
    }
    let m = freqs.len();
    let candidates = m as f64 * f64::from(2 * bound + 1).powi(m as i32);
    if candidates > RESONANCE_WORK_CAP {
        return Err(Error::WorkCap {
            candidates,
            cap: RESONANCE_WORK_CAP,
        });
    }
    let tolerance = tol.unwrap_or_else(|| 1e-9 * freqs.iter().map(|f| f.abs()).fold(0.0, f64::max));

    let l = i64::from(bound);
    let mut ell = vec![-l; m];
    let mut best_balanced: Option<(i64, Vec<i64>)> = None;
    let mut best_any: Option<(i64, Vec<i64>)> = None;
    loop {
        let leading_positive = ell.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0);
        if leading_positive {
            let s: f64 = ell.iter().zip(freqs).map(|(&k, &f)| k as f64 * f).sum();
            if s.abs() <= tolerance {
                let norm: i64 = ell.iter().map(|v| v.abs()).sum();
                let slot = if ell.iter().sum::<i64>() == 0 {
                    &mut best_balanced
                } else {
                    &mut best_any
                };
                if slot.as_ref().is_none_or(|(n, _)| norm < *n) {
                    *slot = Some((norm, ell.clone()));
                }
            }
        }
        // Odometer increment.
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(finish(best_balanced, best_any, bound, tolerance));
            }
            i -= 1;
            if ell[i] < l {
                ell[i] += 1;
                break;
            }
            ell[i] = -l;
        }
    }
}

fn finish(
    balanced: Option<(i64, Vec<i64>)>,
    any: Option<(i64, Vec<i64>)>,
    bound: u32,
    tolerance: f64,
) -> ResonanceReport {
    let (status, witness) = match (balanced, any) {
        (Some((_, w)), _) => (ResonanceStatus::Resonant, Some(w)),
        (None, Some((_, w))) => (ResonanceStatus::AlmostResonanceOnly, Some(w)),
        (None, None) => (ResonanceStatus::NonResonantUpToBound, None),
    };
    ResonanceReport {
        status,
        witness,
        search_bound: bound,
        tolerance,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanMotionResult {
    pub omega: f64,
    /// Σ |λ_k|·(error estimate of V_k).
    pub omega_error: f64,
    /// V_k in the order of the sum's terms (ascending frequency).
    pub weights: Vec<f64>,
    pub weight_errors: Vec<f64>,
    pub weight_sum: f64,
    /// Σ of the weight error estimates.
    pub weight_tolerance: f64,
    pub resonance: ResonanceReport,
    pub volumes: Vec<TorusVolumeResult>,
}

/// Ω = Σ λ_k V_k with V_k = W_{m−1}(|a_k|; |a_j|, j ≠ k).
///
/// Resonance is checked first (bound [`DEFAULT_RESONANCE_BOUND`]) and only
/// logged; the result carries the report.
pub fn mean_motion(sum: &OscillatorSum, cfg: &QuadratureConfig) -> Result<MeanMotionResult> {
    mean_motion_with(sum, |r, others| torus_volume(r, others, cfg))
}

/// [`mean_motion`] with a caller-supplied volume routine, called as
/// `volume(|a_k|, others)` for m ≥ 2.
pub fn mean_motion_with<F>(sum: &OscillatorSum, mut volume: F) -> Result<MeanMotionResult>
where
    F: FnMut(f64, &AmplitudeSet) -> Result<TorusVolumeResult>,
{
    let freqs = sum.frequencies();
    let moduli = sum.moduli();
    let m = moduli.len();
    let bound = resonance_bound_for(m);
    let resonance = check_resonance(&freqs, bound, None)?;
    if resonance.status != ResonanceStatus::NonResonantUpToBound {
        warn!(
            "frequencies {:?} are {:?} (witness {:?}); mean-motion formula may not apply",
            freqs, resonance.status, resonance.witness
        );
    }

    let volumes: Vec<TorusVolumeResult> = if m == 1 {
        vec![TorusVolumeResult {
            value: 1.0,
            method: crate::torus_volume::VolumeMethod::Step,
            error_estimate: 0.0,
            detail: crate::torus_volume::VolumeDetail::Exact,
        }]
    } else {
        (0..m)
            .map(|k| {
                let others: Vec<f64> = moduli
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &a)| a)
                    .collect();
                volume(moduli[k], &AmplitudeSet::new(others)?)
            })
            .collect::<Result<_>>()?
    };

    let weights: Vec<f64> = volumes.iter().map(|v| v.value).collect();
    let weight_errors: Vec<f64> = volumes.iter().map(|v| v.error_estimate).collect();
    let omega = freqs.iter().zip(&weights).map(|(l, v)| l * v).sum();
    let omega_error = freqs.iter().zip(&weight_errors).map(|(l, e)| l.abs() * e).sum();
    Ok(MeanMotionResult {
        omega,
        omega_error,
        weight_sum: weights.iter().sum(),
        weight_tolerance: weight_errors.iter().sum(),
        weights,
        weight_errors,
        resonance,
        volumes,
    })
}

/// Largest L ≤ 10 that keeps the resonance search under the work cap.
fn resonance_bound_for(m: usize) -> u32 {
    let mut bound = DEFAULT_RESONANCE_BOUND;
    while bound > 1 && m as f64 * f64::from(2 * bound + 1).powi(m as i32) > RESONANCE_WORK_CAP {
        bound -= 1;
    }
    bound
}

/// Settings for argument tracking.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnwrapConfig {
    /// Largest step; defaults to 0.05/λ_max.
    pub h_max: Option<f64>,
    /// Smallest admissible |z|; defaults to 1e-9·Σ|a_k|.
    pub eps_z: Option<f64>,
    /// Halvings allowed per step.
    pub max_refinements: u32,
}

impl Default for UnwrapConfig {
    fn default() -> Self {
        Self {
            h_max: None,
            eps_z: None,
            max_refinements: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeanMotion {
    pub omega_hat: f64,
    pub min_abs_z: f64,
    pub samples: u64,
}

/// Continuous argument of z(t) along [0, T], sampled adaptively.
pub struct ArgumentTracker<'a> {
    sum: &'a OscillatorSum,
    h: f64,
    eps_z: f64,
    max_refinements: u32,
    t: f64,
    z: num_complex::Complex64,
    phase: f64,
    min_abs_z: f64,
    samples: u64,
}

impl<'a> ArgumentTracker<'a> {
    pub fn new(sum: &'a OscillatorSum, cfg: &UnwrapConfig) -> Result<Self> {
        let lambda_max = sum.max_abs_frequency();
        let default_h = if lambda_max > 0.0 { 0.05 / lambda_max } else { 1.0 };
        let h_max = cfg.h_max.unwrap_or(default_h);
        if !(h_max > 0.0) {
            return Err(invalid(format!("h_max must be positive, got {h_max}")));
        }
        let cap = if lambda_max > 0.0 { 0.1 / lambda_max } else { f64::INFINITY };
        let eps_z = cfg.eps_z.unwrap_or(1e-9 * sum.total_amplitude());
        let z = sum.evaluate_z(0.0);
        let mut tracker = Self {
            sum,
            h: h_max.min(cap),
            eps_z,
            max_refinements: cfg.max_refinements,
            t: 0.0,
            z,
            phase: z.arg(),
            min_abs_z: z.norm(),
            samples: 1,
        };
        tracker.check(0.0, z)?;
        Ok(tracker)
    }

    fn check(&mut self, t: f64, z: num_complex::Complex64) -> Result<()> {
        let r = z.norm();
        self.min_abs_z = self.min_abs_z.min(r);
        if r < self.eps_z {
            return Err(Error::NearOrigin { t, abs_z: r });
        }
        Ok(())
    }

    /// Unwrapped argument Φ(t), with Φ(0) = arg z(0).
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Advance to `t_end` ≥ current time.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        while self.t < t_end {
            let step = self.h.min(t_end - self.t);
            self.step(step, 0)?;
        }
        Ok(())
    }

    /// Take one step of length `h`, halving while |Δarg| ≥ π/2.
    fn step(&mut self, h: f64, depth: u32) -> Result<()> {
        let t_next = if h == 0.0 { self.t } else { self.t + h };
        let z_next = self.sum.evaluate_z(t_next);
        self.check(t_next, z_next)?;
        let delta = (z_next / self.z).arg();
        if delta.abs() >= FRAC_PI_2 && depth < self.max_refinements {
            self.step(0.5 * h, depth + 1)?;
            return self.step(t_next - self.t, depth + 1);
        }
        if delta.abs() >= FRAC_PI_2 {
            return Err(Error::Internal(format!(
                "argument increment {delta} still ≥ π/2 after {} halvings at t = {}",
                self.max_refinements, self.t
            )));
        }
        self.phase += delta;
        self.t = t_next;
        self.z = z_next;
        self.samples += 1;
        Ok(())
    }

    pub fn min_abs_z(&self) -> f64 {
        self.min_abs_z
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }
}

/// Ω̂(T) = (Φ(T) − Φ(0))/T from adaptive argument tracking.
pub fn empirical_mean_motion(sum: &OscillatorSum, horizon: f64, cfg: &UnwrapConfig) -> Result<EmpiricalMeanMotion> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid(format!("horizon T must be positive, got {horizon}")));
    }
    let mut tracker = ArgumentTracker::new(sum, cfg)?;
    let start = tracker.phase();
    tracker.advance_to(horizon)?;
    Ok(EmpiricalMeanMotion {
        omega_hat: (tracker.phase() - start) / horizon,
        min_abs_z: tracker.min_abs_z(),
        samples: tracker.samples(),
    })
}

/// Ω̂ at each of the increasing `horizons` from a single sweep.
pub fn empirical_mean_motion_series(
    sum: &OscillatorSum,
    horizons: &[f64],
    cfg: &UnwrapConfig,
) -> Result<Vec<EmpiricalMeanMotion>> {
    if horizons.windows(2).any(|w| w[1] < w[0]) || horizons.iter().any(|t| !(*t > 0.0)) {
        return Err(invalid("horizons must be positive and nondecreasing"));
    }
    let mut tracker = ArgumentTracker::new(sum, cfg)?;
    let start = tracker.phase();
    horizons
        .iter()
        .map(|&t| {
            tracker.advance_to(t)?;
            Ok(EmpiricalMeanMotion {
                omega_hat: (tracker.phase() - start) / t,
                min_abs_z: tracker.min_abs_z(),
                samples: tracker.samples(),
            })
        })
        .collect()
}
