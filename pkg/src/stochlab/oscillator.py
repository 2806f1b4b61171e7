"""Harmonic oscillator signals, optionally observed through additive noise.

x(t) = A cos(omega t + phi). Evaluation goes through math.cos in every code
path (scalar and simulated series alike) so that "same inputs, same bits"
holds between evaluate and the simulators; numpy's vectorized trig may route
identical inputs through different SIMD kernels depending on array shape,
which would break that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .normal import two_sided_z
from .rng import RandomSource, gaussian_draws
from .series import SampleGrid, TimeSeries

_TWO_PI = 2.0 * math.pi


def canonical_phase(phi: float) -> float:
    """phi reduced to [0, 2*pi)."""
    r = math.fmod(phi, _TWO_PI)
    if r < 0.0:
        r += _TWO_PI
    if r >= _TWO_PI:  # r + 2*pi can round up to 2*pi for tiny negative r
        r -= _TWO_PI
    return r


@dataclass(frozen=True)
class OscillatorParams:
    """Amplitude, angular frequency, phase (stored canonically in [0, 2pi))."""

    amplitude: float
    omega: float
    phase: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.amplitude) and self.amplitude > 0.0):
            raise ValueError("amplitude must be finite and positive")
        if not (math.isfinite(self.omega) and self.omega > 0.0):
            raise ValueError("omega must be finite and positive")
        if not math.isfinite(self.phase):
            raise ValueError("phase must be finite")
        object.__setattr__(self, "phase", canonical_phase(self.phase))

    @property
    def period(self) -> float:
        return _TWO_PI / self.omega


@dataclass(frozen=True)
class SpringSpec:
    """Ideal spring-mass pair; omega = sqrt(stiffness / mass)."""

    stiffness: float
    mass: float

    def __post_init__(self):
        if not (math.isfinite(self.stiffness) and self.stiffness > 0.0):
            raise ValueError("stiffness must be finite and positive")
        if not (math.isfinite(self.mass) and self.mass > 0.0):
            raise ValueError("mass must be finite and positive")


def omega_from_spring(spec: SpringSpec) -> float:
    return math.sqrt(spec.stiffness / spec.mass)


def evaluate(params: OscillatorParams, t: float) -> float:
    """Position at time t."""
    return params.amplitude * math.cos(params.omega * t + params.phase)


def velocity(params: OscillatorParams, t: float) -> float:
    """dx/dt at time t."""
    return -params.amplitude * params.omega * math.sin(params.omega * t + params.phase)


def simulate_deterministic(params: OscillatorParams, grid: SampleGrid) -> TimeSeries:
    """Noise-free samples; values[i] == evaluate(params, grid.time(i)) exactly."""
    values = np.array([evaluate(params, t) for t in grid.times()], dtype=np.float64)
    return TimeSeries(grid, values)


def sigma_for_snr(amplitude: float, snr: float) -> float:
    """Noise sigma giving the requested signal-to-noise power ratio.

    SNR is the power ratio (A^2/2) / sigma^2, so sigma = sqrt(A^2 / (2 snr)).
    """
    if amplitude <= 0.0:
        raise ValueError("amplitude must be positive")
    if snr <= 0.0:
        raise ValueError("snr must be positive")
    return math.sqrt(amplitude * amplitude / (2.0 * snr))


def simulate_noisy(params: OscillatorParams, grid: SampleGrid, sigma: float,
                   src: RandomSource) -> TimeSeries:
    """Deterministic path plus IID N(0, sigma^2) observation noise.

    sigma = 0 returns the deterministic series exactly and consumes no draws.
    """
    if sigma < 0.0:
        raise ValueError("sigma must be nonnegative")
    det = simulate_deterministic(params, grid)
    if sigma == 0.0:
        return det
    noise = gaussian_draws(src, grid.n, 0.0, sigma)
    return TimeSeries(grid, det.values + noise)


@dataclass(frozen=True)
class PredictionInterval:
    lower: float
    center: float
    upper: float
    coverage: float


def prediction_interval(params: OscillatorParams, t: float, sigma: float,
                        coverage: float = 0.95) -> PredictionInterval:
    """Central prediction interval for a noisy observation at time t.

    center +- z * sigma with z the two-sided normal quantile; with sigma = 0
    the interval collapses to the deterministic point.
    """
    if sigma < 0.0:
        raise ValueError("sigma must be nonnegative")
    if not 0.0 < coverage < 1.0:
        raise ValueError("coverage must be strictly inside (0, 1)")
    center = evaluate(params, t)
    half = two_sided_z(coverage) * sigma
    return PredictionInterval(center - half, center, center + half, coverage)
