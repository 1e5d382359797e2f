//! Asymptotic density of switching points for bang-bang controls of
//! oscillatory linear systems, via the mean motion of an almost periodic
//! function and by direct zero counting.

pub mod bessel;
pub mod error;
pub mod mean_motion;
pub mod oscillator;
pub mod quadrature;
pub mod spectral;
pub mod switching;
pub mod torus_volume;

pub use error::{Error, Result};
pub use mean_motion::{
    check_resonance, empirical_mean_motion, empirical_mean_motion_series, mean_motion, mean_motion_with, ArgumentTracker,
    EmpiricalMeanMotion, MeanMotionResult, ResonanceReport, ResonanceStatus, UnwrapConfig,
};
pub use oscillator::{OscillatorSum, Term};
pub use spectral::{controllability_check, extract_oscillator_sum, Controllability, LinearSystem};
pub use switching::{count_zeros, simulate_bang_bang, two_oscillator_bounds, BoundCheck, ZeroConfig, ZeroCountResult};
pub use torus_volume::{torus_volume, AmplitudeSet, QuadratureConfig, TorusVolumeResult, VolumeMethod};
