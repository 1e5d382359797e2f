"""Switching-point density of bang-bang controls via the mean motion of oscillator sums."""

from ._native import (
    LinearSystem,
    OscillatorSum,
    check_resonance,
    count_zeros,
    empirical_mean_motion,
    j0,
    j1,
    mean_motion,
    torus_volume,
    two_oscillator_bounds,
)

__all__ = [
    "LinearSystem",
    "OscillatorSum",
    "check_resonance",
    "count_zeros",
    "empirical_mean_motion",
    "j0",
    "j1",
    "mean_motion",
    "torus_volume",
    "two_oscillator_bounds",
]
