//! Zeros of the switching function m(t) = Re z(t) and the bang-bang closed loop.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::oscillator::OscillatorSum;
use crate::spectral::{extract_oscillator_sum, LinearSystem, DEFAULT_TOL_SPEC};

/// Constant absorbing the o(T) and endpoint terms in the lower bound.
pub const DEFAULT_BOUND_ALLOWANCE: f64 = 2.0;

/// Grid refinement factor around near-zero grid values.
const LOCAL_REFINEMENT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZeroConfig {
    /// Grid points per π/λ_max.
    pub oversample: u32,
    /// Near-zero threshold that triggers local refinement; defaults to 1e-8·Σ|a_k|.
    pub tol_m: Option<f64>,
    /// Residual accepted at the endpoints 0 and T; defaults to 1e-10·Σ|a_k|.
    pub tol_m_resid: Option<f64>,
}

impl Default for ZeroConfig {
    fn default() -> Self {
        Self {
            oversample: 16,
            tol_m: None,
            tol_m_resid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCountResult {
    pub count: usize,
    pub zeros: Vec<f64>,
    pub grid_step: f64,
    /// Times where |m| came within tol_m of zero without changing sign.
    pub suspect_tangencies: Vec<f64>,
}

struct Resolved {
    tol_m: f64,
    tol_resid: f64,
    dedup: f64,
    time_tol: f64,
}

fn bisect(sum: &OscillatorSum, mut lo: f64, mut hi: f64, mut f_lo: f64, time_tol: f64) -> f64 {
    while hi - lo > time_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = sum.eval_m(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bisection on m′ for the extremum of m inside [lo, hi].
fn bisect_derivative(sum: &OscillatorSum, mut lo: f64, mut hi: f64, time_tol: f64) -> f64 {
    let mut d_lo = sum.eval_m_derivative(lo);
    while hi - lo > time_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let d_mid = sum.eval_m_derivative(mid);
        if (d_mid < 0.0) == (d_lo < 0.0) {
            lo = mid;
            d_lo = d_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Scan [a, b] on `n` subintervals; push every sign change found.
fn scan_interval(sum: &OscillatorSum, a: f64, b: f64, n: usize, res: &Resolved, zeros: &mut Vec<f64>) -> usize {
    let mut found = 0;
    let mut t_prev = a;
    let mut f_prev = sum.eval_m(a);
    for i in 1..=n {
        let t = if i == n { b } else { a + (b - a) * i as f64 / n as f64 };
        let f = sum.eval_m(t);
        if f_prev * f < 0.0 {
            zeros.push(bisect(sum, t_prev, t, f_prev, res.time_tol));
            found += 1;
        }
        t_prev = t;
        f_prev = f;
    }
    found
}

/// Zeros of m on [0, T], counted with multiplicity one.
///
/// m is sampled with step π/(oversample·λ_max). Strict sign changes are
/// bisected to 1e-10·T. Intervals without a sign change are examined twice
/// more: if m′ changes sign the extremum is located and, when it lies on
/// the other side of zero, both crossings are bisected; grid values with
/// |m| < tol_m trigger a 64× finer local scan. Near-zero values that never
/// produce a sign change are reported as suspect tangencies. Endpoints count
/// when |m| ≤ tol_m_resid.
pub fn count_zeros(sum: &OscillatorSum, horizon: f64, cfg: &ZeroConfig) -> Result<ZeroCountResult> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid(format!("horizon T must be positive, got {horizon}")));
    }
    if cfg.oversample < 4 {
        return Err(invalid(format!("oversample must be at least 4, got {}", cfg.oversample)));
    }
    let lambda_max = sum.max_abs_frequency();
    if lambda_max <= 0.0 {
        return Err(invalid("count_zeros needs a nonzero frequency"));
    }
    let scale = sum.total_amplitude();
    let res = Resolved {
        tol_m: cfg.tol_m.unwrap_or(1e-8 * scale),
        tol_resid: cfg.tol_m_resid.unwrap_or(1e-10 * scale),
        dedup: 1e-9 * horizon,
        time_tol: 1e-10 * horizon,
    };

    let nominal = PI / (f64::from(cfg.oversample) * lambda_max);
    let steps = (horizon / nominal).ceil().max(1.0) as usize;
    let grid_step = horizon / steps as f64;
    let times: Vec<f64> = (0..=steps)
        .map(|i| if i == steps { horizon } else { grid_step * i as f64 })
        .collect();
    let values: Vec<f64> = times.iter().map(|&t| sum.eval_m(t)).collect();

    let mut zeros = Vec::new();
    let mut suspects = Vec::new();

    if values[0].abs() <= res.tol_resid {
        zeros.push(0.0);
    }
    if values[steps].abs() <= res.tol_resid {
        zeros.push(horizon);
    }

    let mut changed = vec![false; steps];
    for i in 0..steps {
        let (f0, f1) = (values[i], values[i + 1]);
        if f0 * f1 < 0.0 {
            zeros.push(bisect(sum, times[i], times[i + 1], f0, res.time_tol));
            changed[i] = true;
        } else if f0 != 0.0 && f1 != 0.0 {
            // Same sign at both ends: look for a dip through zero.
            let d0 = sum.eval_m_derivative(times[i]);
            let d1 = sum.eval_m_derivative(times[i + 1]);
            if d0 * d1 < 0.0 {
                let te = bisect_derivative(sum, times[i], times[i + 1], res.time_tol);
                let fe = sum.eval_m(te);
                if fe * f0 < 0.0 {
                    zeros.push(bisect(sum, times[i], te, f0, res.time_tol));
                    zeros.push(bisect(sum, te, times[i + 1], fe, res.time_tol));
                    changed[i] = true;
                } else if fe.abs() < res.tol_m {
                    suspects.push(te);
                }
            }
        }
    }
    // Exact zeros on interior grid points between opposite signs.
    for i in 1..steps {
        if values[i] == 0.0 && values[i - 1] * values[i + 1] < 0.0 {
            zeros.push(times[i]);
            changed[i - 1] = true;
            changed[i] = true;
        }
    }
    // Local refinement around near-zero grid values without a sign change.
    for i in 1..steps {
        let adjacent = changed[i - 1] || changed[i];
        if values[i].abs() < res.tol_m && !adjacent {
            let found = scan_interval(sum, times[i - 1], times[i + 1], 2 * LOCAL_REFINEMENT, &res, &mut zeros);
            if found == 0 {
                suspects.push(times[i]);
            }
        }
    }

    zeros.sort_by(f64::total_cmp);
    zeros.dedup_by(|b, a| (*b - *a).abs() <= res.dedup);
    suspects.sort_by(f64::total_cmp);
    suspects.dedup_by(|b, a| (*b - *a).abs() <= res.dedup);
    // A suspect that coincides with a counted zero is not a tangency.
    suspects.retain(|s| {
        let idx = zeros.partition_point(|z| *z < *s);
        let near = |j: usize| zeros.get(j).is_some_and(|z| (z - s).abs() <= grid_step);
        !(near(idx) || (idx > 0 && near(idx - 1)))
    });

    Ok(ZeroCountResult {
        count: zeros.len(),
        zeros,
        grid_step,
        suspect_tangencies: suspects,
    })
}

/// Lower bound N(T) ≥ (|Ω|/π)·T − allowance and how the observed count compares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lower_bound: f64,
    pub count: usize,
    pub holds: bool,
    /// count − lower_bound.
    pub slack: f64,
    /// N(T)·π/(|Ω|·T); recorded, not asserted.
    pub density_ratio: f64,
}

/// Compare N(T) with the linear bound (|Ω|/π)·T − `allowance`.
pub fn density_lower_bound(
    sum: &OscillatorSum,
    horizon: f64,
    omega: f64,
    allowance: f64,
    cfg: &ZeroConfig,
) -> Result<BoundCheck> {
    let zeros = count_zeros(sum, horizon, cfg)?;
    Ok(bound_from_count(zeros.count, horizon, omega, allowance))
}

/// Bound check for an already computed zero count.
pub fn bound_from_count(count: usize, horizon: f64, omega: f64, allowance: f64) -> BoundCheck {
    let lower_bound = omega.abs() / PI * horizon - allowance;
    let slack = count as f64 - lower_bound;
    BoundCheck {
        lower_bound,
        count,
        holds: slack >= 0.0,
        slack,
        density_ratio: count as f64 * PI / (omega.abs() * horizon),
    }
}

/// Exact bracket for N(T) when m(t) = a₁cos λ₁t + a₂cos λ₂t with λ₁ > λ₂ > 0.
///
/// a₁ > a₂ gives [λ₁T/π, λ₁T/π + 1]; a₁ < a₂ gives [λ₂T/π, λ₁T/π].
pub fn two_oscillator_bounds(a1: f64, l1: f64, a2: f64, l2: f64, horizon: f64) -> Result<(f64, f64)> {
    if !(a1 > 0.0 && a2 > 0.0) {
        return Err(Error::Inapplicable("amplitudes must be positive reals".into()));
    }
    if !(l1 > l2 && l2 > 0.0) {
        return Err(Error::Inapplicable(format!(
            "frequencies must satisfy λ₁ > λ₂ > 0, got λ₁ = {l1}, λ₂ = {l2}"
        )));
    }
    if a1 == a2 {
        return Err(Error::Inapplicable("equal amplitudes".into()));
    }
    if !(horizon > 0.0) {
        return Err(invalid("horizon T must be positive"));
    }
    let fast = l1 * horizon / PI;
    Ok(if a1 > a2 {
        (fast, fast + 1.0)
    } else {
        (l2 * horizon / PI, fast)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: Vec<f64>,
    /// Control applied on the step that starts here.
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BangBangTrajectory {
    pub points: Vec<TrajectoryPoint>,
    /// Zeros of m on [0, T]; the integrator lands on each.
    pub switch_times: Vec<f64>,
}

impl BangBangTrajectory {
    /// Number of sign flips of u along the trajectory.
    pub fn control_flips(&self) -> usize {
        self.points.windows(2).filter(|w| w[0].u != w[1].u).count()
    }
}

/// Integrate ẋ = Ax + b·sgn(m(t)) with classical RK4.
///
/// Steps are shortened to land exactly on every zero of m so the control is
/// constant within each step.
pub fn simulate_bang_bang(sys: &LinearSystem, x0: &[f64], horizon: f64, h: f64) -> Result<BangBangTrajectory> {
    if x0.len() != sys.dim() {
        return Err(invalid(format!(
            "initial state has length {}, system dimension is {}",
            x0.len(),
            sys.dim()
        )));
    }
    if !(h > 0.0) || !(horizon > 0.0) {
        return Err(invalid("step h and horizon T must be positive"));
    }
    let sum = extract_oscillator_sum(sys, DEFAULT_TOL_SPEC)?;
    let lambda_max = sum.max_abs_frequency();
    if h * lambda_max > 0.1 {
        return Err(invalid(format!(
            "step h = {h} too large: h·λ_max = {} exceeds 0.1",
            h * lambda_max
        )));
    }
    let switches = count_zeros(&sum, horizon, &ZeroConfig::default())?.zeros;

    let mut breakpoints: Vec<f64> = switches.iter().copied().filter(|&t| t > 0.0 && t < horizon).collect();
    breakpoints.push(horizon);

    let control = |a: f64, b: f64| {
        let m = sum.eval_m(0.5 * (a + b));
        if m >= 0.0 {
            1.0
        } else {
            -1.0
        }
    };

    let a = sys.a();
    let b = sys.b();
    let mut x = DVector::from_column_slice(x0);
    let mut t = 0.0;
    let mut points = Vec::new();
    for &end in &breakpoints {
        let u = control(t, end);
        let rhs = |x: &DVector<f64>| a * x + b * u;
        while t < end {
            let step = h.min(end - t);
            points.push(TrajectoryPoint {
                t,
                state: x.as_slice().to_vec(),
                u,
            });
            let k1 = rhs(&x);
            let k2 = rhs(&(&x + &k1 * (0.5 * step)));
            let k3 = rhs(&(&x + &k2 * (0.5 * step)));
            let k4 = rhs(&(&x + &k3 * step));
            x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (step / 6.0);
            t = if end - t <= step { end } else { t + step };
        }
    }
    let last_u = points.last().map_or(1.0, |p| p.u);
    points.push(TrajectoryPoint {
        t: horizon,
        state: x.as_slice().to_vec(),
        u: last_u,
    });
    Ok(BangBangTrajectory {
        points,
        switch_times: switches,
    })
}
