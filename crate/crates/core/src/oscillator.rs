//! Finite sums of complex exponentials z(t) = Σ a_k e^{iλ_k t}.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// One oscillator: complex amplitude a_k (phase folded in) and frequency λ_k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub amplitude: Complex64,
    pub frequency: f64,
}

impl Term {
    pub fn new(amplitude: Complex64, frequency: f64) -> Self {
        Self {
            amplitude,
            frequency,
        }
    }

    pub fn real(amplitude: f64, frequency: f64) -> Self {
        Self::new(Complex64::new(amplitude, 0.0), frequency)
    }
}

/// z(t) = Σ a_k e^{iλ_k t}; the switching function is m(t) = Re z(t).
///
/// Terms are sorted by ascending frequency, frequencies are distinct and all
/// amplitudes are nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Term>", into = "Vec<Term>")]
pub struct OscillatorSum {
    terms: Vec<Term>,
}

impl OscillatorSum {
    /// Validate and sort `terms`, dropping terms whose amplitude is exactly zero.
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        Self::with_drop_threshold(terms, 0.0)
    }

    /// Like [`OscillatorSum::new`] but drops every term with |a_k| ≤ `threshold`.
    pub fn with_drop_threshold(terms: Vec<Term>, threshold: f64) -> Result<Self> {
        for t in &terms {
            if !t.frequency.is_finite() || !t.amplitude.re.is_finite() || !t.amplitude.im.is_finite() {
                return Err(invalid("oscillator amplitudes and frequencies must be finite"));
            }
        }
        let mut terms: Vec<Term> = terms
            .into_iter()
            .filter(|t| t.amplitude.norm() > threshold)
            .collect();
        if terms.is_empty() {
            return Err(invalid("oscillator sum needs at least one term with nonzero amplitude"));
        }
        terms.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        if let Some(w) = terms.windows(2).find(|w| w[0].frequency == w[1].frequency) {
            return Err(invalid(format!(
                "oscillator frequencies must be distinct; {} repeats (merge equal-frequency terms)",
                w[0].frequency
            )));
        }
        Ok(Self { terms })
    }

    /// Real amplitudes paired with frequencies.
    pub fn from_real(amplitudes: &[f64], frequencies: &[f64]) -> Result<Self> {
        if amplitudes.len() != frequencies.len() {
            return Err(invalid(format!(
                "got {} amplitudes but {} frequencies",
                amplitudes.len(),
                frequencies.len()
            )));
        }
        Self::new(
            amplitudes
                .iter()
                .zip(frequencies)
                .map(|(&a, &l)| Term::real(a, l))
                .collect(),
        )
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// |a_k| in frequency order.
    pub fn moduli(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.amplitude.norm()).collect()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.frequency).collect()
    }

    /// Σ|a_k|, an upper bound for |z(t)|.
    pub fn total_amplitude(&self) -> f64 {
        self.terms.iter().map(|t| t.amplitude.norm()).sum()
    }

    /// max_k |λ_k|.
    pub fn max_abs_frequency(&self) -> f64 {
        self.terms.iter().map(|t| t.frequency.abs()).fold(0.0, f64::max)
    }

    pub fn evaluate_z(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|term| term.amplitude * Complex64::cis(term.frequency * t))
            .sum()
    }

    pub fn eval_m(&self, t: f64) -> f64 {
        self.evaluate_z(t).re
    }

    /// m′(t) = Re Σ iλ_k a_k e^{iλ_k t}.
    pub fn eval_m_derivative(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| (Complex64::new(0.0, term.frequency) * term.amplitude * Complex64::cis(term.frequency * t)).re)
            .sum()
    }

    /// The sum c·z(t) for real c > 0.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid("scale factor must be positive and finite"));
        }
        Ok(Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.amplitude * c, t.frequency))
                .collect(),
        })
    }

    /// The sum t ↦ z(t + s), obtained by rotating each a_k by e^{iλ_k s}.
    pub fn time_shifted(&self, s: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.amplitude * Complex64::cis(t.frequency * s), t.frequency))
                .collect(),
        }
    }
}

impl TryFrom<Vec<Term>> for OscillatorSum {
    type Error = crate::error::Error;

    fn try_from(terms: Vec<Term>) -> Result<Self> {
        Self::new(terms)
    }
}

impl From<OscillatorSum> for Vec<Term> {
    fn from(sum: OscillatorSum) -> Self {
        sum.terms
    }
}
