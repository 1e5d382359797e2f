//! Problem description files.

use std::path::Path;

use meanmotion::mean_motion::UnwrapConfig;
use meanmotion::spectral::LinearSystem;
use meanmotion::switching::ZeroConfig;
use meanmotion::torus_volume::QuadratureConfig;
use meanmotion::{OscillatorSum, Term};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorEntry {
    pub re: f64,
    pub im: f64,
    pub freq: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemEntry {
    /// Rows of A.
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlocksEntry {
    pub freqs: Vec<f64>,
    pub b: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub samples: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { samples: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub quadrature: QuadratureConfig,
    pub zero: ZeroConfig,
    pub unwrap: UnwrapConfig,
    pub mc: McConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oscillators: Option<Vec<OscillatorEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BlocksEntry>,
    #[serde(default)]
    pub config: RunConfig,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let ctx = |e| CliError::core("config", e);
        self.quadrature.validate().map_err(ctx)?;
        if self.zero.oversample < 4 {
            return Err(CliError::validation(format!(
                "config: zero.oversample must be at least 4, got {}",
                self.zero.oversample
            )));
        }
        for (name, v) in [
            ("zero.tol_m", self.zero.tol_m),
            ("zero.tol_m_resid", self.zero.tol_m_resid),
            ("unwrap.h_max", self.unwrap.h_max),
            ("unwrap.eps_z", self.unwrap.eps_z),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::validation(format!("config: {name} must be positive, got {v}")));
                }
            }
        }
        if self.mc.samples < 1000 {
            return Err(CliError::validation(format!(
                "config: mc.samples must be at least 1000, got {}",
                self.mc.samples
            )));
        }
        Ok(())
    }
}

/// The problem after validation.
pub enum Problem {
    Oscillators(OscillatorSum),
    System(LinearSystem),
}

impl ProblemSpecFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::validation(format!("input: {e}")))
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        self.config.validate()?;
        let given = [self.oscillators.is_some(), self.system.is_some(), self.blocks.is_some()];
        if given.iter().filter(|g| **g).count() != 1 {
            return Err(CliError::validation(
                "input: exactly one of \"oscillators\", \"system\" or \"blocks\" is required",
            ));
        }
        let ctx = |e| CliError::core("input", e);
        if let Some(list) = &self.oscillators {
            let terms = list
                .iter()
                .map(|o| Term::new(Complex64::new(o.re, o.im), o.freq))
                .collect();
            return Ok(Problem::Oscillators(OscillatorSum::new(terms).map_err(ctx)?));
        }
        if let Some(s) = &self.system {
            return Ok(Problem::System(LinearSystem::from_rows(&s.a, &s.b, &s.p).map_err(ctx)?));
        }
        let b = self.blocks.as_ref().expect("one form is present");
        Ok(Problem::System(LinearSystem::from_blocks(&b.freqs, &b.b, &b.p).map_err(ctx)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_fill_missing_fields() {
        let spec = ProblemSpecFile::parse(
            r#"{"oscillators": [{"re": 1, "im": 0, "freq": 1}], "config": {"zero": {"oversample": 32}}}"#,
        )
        .unwrap();
        assert_eq!(spec.config.zero.oversample, 32);
        assert_eq!(spec.config.quadrature.tol, 1e-8);
        assert_eq!(spec.config.mc.samples, 1_000_000);
    }

    #[test]
    fn system_rows_are_row_major() {
        let spec = ProblemSpecFile::parse(r#"{"system": {"A": [[0, 3], [-3, 0]], "b": [0, 1], "p": [1, 0]}}"#).unwrap();
        match spec.problem().unwrap() {
            Problem::System(sys) => assert_eq!(sys.a()[(0, 1)], 3.0),
            Problem::Oscillators(_) => panic!("expected a system"),
        }
    }

    #[test]
    fn validation_errors_are_not_numerical() {
        let err = ProblemSpecFile::parse(r#"{"blocks": {"freqs": [1], "b": [0, 1]}}"#).unwrap_err();
        assert!(!err.numerical);
        assert!(err.message.contains("missing field `p`"));
    }
}
