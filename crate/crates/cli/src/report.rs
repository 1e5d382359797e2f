//! Report types and their table rendering.

use std::fmt::Write as _;

use meanmotion::mean_motion::{MeanMotionResult, ResonanceReport};
use meanmotion::spectral::{Controllability, SpectrumReport};
use meanmotion::switching::{BoundCheck, ZeroCountResult};
use meanmotion::torus_volume::VolumeMethod;
use meanmotion::OscillatorSum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub eigenvalues: Vec<Complex64>,
    pub max_real_part: f64,
    pub frequencies: Vec<f64>,
    pub controllability: Controllability,
}

impl SpectrumSummary {
    pub fn new(spec: SpectrumReport, controllability: Controllability) -> Self {
        Self {
            eigenvalues: spec.eigenvalues,
            max_real_part: spec.max_real_part,
            frequencies: spec.frequencies,
            controllability,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSummary {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub freq: f64,
}

pub fn oscillator_summary(sum: &OscillatorSum) -> Vec<OscillatorSummary> {
    sum.terms()
        .iter()
        .map(|t| OscillatorSummary {
            re: t.amplitude.re,
            im: t.amplitude.im,
            modulus: t.amplitude.norm(),
            freq: t.frequency,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanMotionSummary {
    pub omega: f64,
    pub omega_error: f64,
    pub weights: Vec<f64>,
    pub weight_errors: Vec<f64>,
    pub weight_sum: f64,
    pub weight_tolerance: f64,
    pub methods: Vec<VolumeMethod>,
}

impl From<&MeanMotionResult> for MeanMotionSummary {
    fn from(r: &MeanMotionResult) -> Self {
        Self {
            omega: r.omega,
            omega_error: r.omega_error,
            weights: r.weights.clone(),
            weight_errors: r.weight_errors.clone(),
            weight_sum: r.weight_sum,
            weight_tolerance: r.weight_tolerance,
            methods: r.volumes.iter().map(|v| v.method).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSummary {
    pub horizon: f64,
    pub count: usize,
    pub grid_step: f64,
    pub suspect_tangencies: Vec<f64>,
    pub bound: BoundCheck,
}

impl ZeroSummary {
    pub fn new(horizon: f64, zeros: &ZeroCountResult, bound: BoundCheck) -> Self {
        Self {
            horizon,
            count: zeros.count,
            grid_step: zeros.grid_step,
            suspect_tangencies: zeros.suspect_tangencies.clone(),
            bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalEntry {
    pub horizon: f64,
    pub omega_hat: f64,
    pub min_abs_z: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSummary>,
    pub oscillators: Vec<OscillatorSummary>,
    pub resonance: ResonanceReport,
    pub mean_motion: MeanMotionSummary,
    pub zeros: ZeroSummary,
    pub empirical: Vec<EmpiricalEntry>,
}

impl AnalysisReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        if let Some(s) = &self.spectrum {
            let _ = writeln!(out, "spectrum       max |Re λ| = {:.3e}", s.max_real_part);
            let _ = writeln!(
                out,
                "controllable   {} (Kalman rank {}, det {:.6e})",
                s.controllability.controllable, s.controllability.kalman_rank, s.controllability.kalman_determinant
            );
        }
        let _ = writeln!(out, "{:>14} {:>14} {:>14}", "|a_k|", "lambda_k", "V_k");
        for (o, (v, e)) in self
            .oscillators
            .iter()
            .zip(self.mean_motion.weights.iter().zip(&self.mean_motion.weight_errors))
        {
            let _ = writeln!(out, "{:>14.8} {:>14.8} {:>14.8} ± {:.1e}", o.modulus, o.freq, v, e);
        }
        let _ = writeln!(
            out,
            "resonance      {:?} (bound {}, witness {:?})",
            self.resonance.status, self.resonance.search_bound, self.resonance.witness
        );
        let _ = writeln!(
            out,
            "omega          {:.8} ± {:.1e}",
            self.mean_motion.omega, self.mean_motion.omega_error
        );
        let z = &self.zeros;
        let _ = writeln!(
            out,
            "zeros          N({}) = {}, lower bound {:.3}, holds {}, ratio {:.4}",
            z.horizon, z.count, z.bound.lower_bound, z.bound.holds, z.bound.density_ratio
        );
        if !z.suspect_tangencies.is_empty() {
            let _ = writeln!(out, "tangencies     {:?}", z.suspect_tangencies);
        }
        for e in &self.empirical {
            let _ = writeln!(out, "empirical      T = {}: omega_hat = {:.8}", e.horizon, e.omega_hat);
        }
        out
    }
}
