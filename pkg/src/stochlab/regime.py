"""Two-state Markov regime switching over harmonic oscillators.

Switching lives on an internal grid finer than (and dividing) the
observation grid; at every internal step the regime flips with probability
p, so sojourns are geometric with mean 1/p steps. At each switch the new
oscillator's amplitude and phase are chosen to keep position and velocity
continuous (energy is deliberately not conserved: when omega changes, the
matched amplitude changes with it).

Per-segment phase is local: within a segment starting at t_s the signal is
A cos(omega (t - t_s) + phi), and the spec amplitude/phase (A0, phi0) are
the values at the first sample. On a t0 = 0 grid with p = 0 and sigma = 0
the output is bit-identical to oscillator.simulate_deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .oscillator import OscillatorParams, evaluate
from .rng import RandomSource, gaussian_draws
from .series import SampleGrid, TimeSeries

_GRID_RTOL = 1e-9


def half_life_to_p(half_life: float, internal_dt: float) -> float:
    """Per-step switch probability with the given sojourn half-life.

    Survival after k steps is (1-p)^k; solving (1-p)^(half_life/dt) = 1/2
    gives p = 1 - 2^(-dt/half_life).
    """
    if half_life <= 0.0:
        raise ValueError("half_life must be positive")
    if internal_dt <= 0.0:
        raise ValueError("internal_dt must be positive")
    return 1.0 - 2.0 ** (-internal_dt / half_life)


@dataclass(frozen=True)
class MarkovSwitchSpec:
    """Symmetric two-state chain: switch probability p per internal step."""

    p: float
    internal_dt: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be in [0, 1]")
        if not (math.isfinite(self.internal_dt) and self.internal_dt > 0.0):
            raise ValueError("internal_dt must be finite and positive")


@dataclass(frozen=True)
class RegimeOscillatorSpec:
    """Initial conditions plus the per-regime frequencies and switching law.

    amplitude0/phase0 apply at the first sample in the initial regime;
    omega1/omega2 are the regime-1/regime-2 angular frequencies; sigma is
    the observation noise level.
    """

    amplitude0: float
    phase0: float
    omega1: float
    omega2: float
    switching: MarkovSwitchSpec
    sigma: float = 0.0
    initial_state: int = 1

    def __post_init__(self):
        if self.initial_state not in (1, 2):
            raise ValueError("initial_state must be 1 or 2")
        if self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")
        # amplitude/omega validity delegated to OscillatorParams at build time
        OscillatorParams(self.amplitude0, self.omega1, self.phase0)
        OscillatorParams(self.amplitude0, self.omega2, self.phase0)

    def omega_of(self, state: int) -> float:
        return self.omega1 if state == 1 else self.omega2


@dataclass(frozen=True)
class RegimePath:
    """Realized switching history; params is None for indicator-only paths."""

    start_time: float
    end_time: float
    states: np.ndarray = field(repr=False)  # one entry per segment
    switch_times: np.ndarray = field(repr=False)  # len(states) - 1, absolute
    params: tuple[OscillatorParams, ...] | None = None

    def __post_init__(self):
        states = np.asarray(self.states, dtype=np.int64)
        switch = np.asarray(self.switch_times, dtype=np.float64)
        if len(states) != len(switch) + 1:
            raise ValueError("need exactly one more segment than switches")
        if self.params is not None and len(self.params) != len(states):
            raise ValueError("params must match the number of segments")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "switch_times", switch)

    @property
    def n_segments(self) -> int:
        return len(self.states)

    def segment_bounds(self) -> np.ndarray:
        """n_segments + 1 boundary times, first start to last end."""
        return np.concatenate(
            ([self.start_time], self.switch_times, [self.end_time])
        )


def _switch_steps(spec: MarkovSwitchSpec, n_steps: int, src: RandomSource) -> np.ndarray:
    """1-based internal step indices at which the state flips."""
    u = src.uniforms(n_steps)
    return np.nonzero(u < spec.p)[0] + 1


def simulate_indicator(spec: MarkovSwitchSpec, horizon: float, src: RandomSource,
                       initial_state: int = 1, t0: float = 0.0) -> RegimePath:
    """Switching skeleton over [t0, t0 + horizon], no oscillator attached.

    horizon must be an integer number of internal steps (relative 1e-9).
    """
    steps = int(round(horizon / spec.internal_dt))
    if steps < 1 or abs(horizon - steps * spec.internal_dt) > _GRID_RTOL * spec.internal_dt:
        raise ValueError("horizon must be a positive whole number of internal steps")
    if initial_state not in (1, 2):
        raise ValueError("initial_state must be 1 or 2")
    js = _switch_steps(spec, steps, src)
    switch_times = t0 + js * spec.internal_dt
    states = np.empty(len(js) + 1, dtype=np.int64)
    states[0] = initial_state
    for i in range(len(js)):
        states[i + 1] = 3 - states[i]
    return RegimePath(t0, t0 + steps * spec.internal_dt, states, switch_times)


def match_continuity(current: OscillatorParams, elapsed: float,
                     omega_new: float) -> OscillatorParams:
    """Oscillator params after a frequency switch, keeping x and dx/dt.

    With arg = omega*elapsed + phi at the switch instant and r = omega/omega_new:
    A' = A sqrt(cos^2 + r^2 sin^2), phi' = atan2(r sin, cos). Substituting back
    gives A' cos phi' = A cos(arg) and A' omega_new sin phi' = A omega sin(arg),
    i.e. continuous position and velocity. |A'/A| lies in [min(r,1), max(r,1)].
    """
    if omega_new <= 0.0 or not math.isfinite(omega_new):
        raise ValueError("omega_new must be finite and positive")
    if elapsed < 0.0:
        raise ValueError("elapsed must be nonnegative")
    arg = current.omega * elapsed + current.phase
    c = math.cos(arg)
    s = math.sin(arg)
    r = current.omega / omega_new
    amplitude = current.amplitude * math.hypot(c, r * s)
    phase = math.atan2(r * s, c)
    return OscillatorParams(amplitude, omega_new, phase)


def _build_segments(spec: RegimeOscillatorSpec, t0: float,
                    switch_times: np.ndarray) -> tuple[np.ndarray, tuple[OscillatorParams, ...]]:
    states = np.empty(len(switch_times) + 1, dtype=np.int64)
    states[0] = spec.initial_state
    params = [OscillatorParams(spec.amplitude0, spec.omega_of(spec.initial_state),
                               spec.phase0)]
    seg_start = t0
    for i, tau in enumerate(switch_times):
        new_state = 3 - states[i]
        states[i + 1] = new_state
        params.append(match_continuity(params[i], tau - seg_start,
                                       spec.omega_of(new_state)))
        seg_start = tau
    return states, tuple(params)


def simulate_regime_oscillator(spec: RegimeOscillatorSpec, grid: SampleGrid,
                               src: RandomSource) -> tuple[TimeSeries, RegimePath]:
    """Sample a switching oscillator on grid, with optional observation noise.

    grid.dt must be an integer multiple of the internal step (relative 1e-9).
    Draw order is fixed: one uniform per internal step for the indicator
    (consumed even when p = 0), then grid.n normals iff sigma > 0.
    """
    ratio = grid.dt / spec.switching.internal_dt
    m = int(round(ratio))
    if m < 1 or abs(ratio - m) > _GRID_RTOL * m:
        raise ValueError("grid.dt must be an integer multiple of internal_dt")
    if grid.n < 2:
        raise ValueError("need at least 2 samples")
    n_steps = (grid.n - 1) * m
    js = _switch_steps(spec.switching, n_steps, src)
    switch_times = grid.t0 + js * spec.switching.internal_dt
    states, params = _build_segments(spec, grid.t0, switch_times)

    times = grid.times()
    values = np.empty(grid.n, dtype=np.float64)
    bounds = np.concatenate((switch_times, [np.inf]))
    seg_of = np.searchsorted(bounds, times, side="right")
    starts = np.concatenate(([grid.t0], switch_times))
    for seg in range(len(params)):
        idx = np.nonzero(seg_of == seg)[0]
        if len(idx) == 0:
            continue
        p = params[seg]
        t_s = starts[seg]
        values[idx] = [evaluate(p, t - t_s) for t in times[idx]]

    if spec.sigma > 0.0:
        values = values + gaussian_draws(src, grid.n, 0.0, spec.sigma)

    path = RegimePath(grid.t0, grid.t0 + (grid.n - 1) * grid.dt, states,
                      switch_times, params)
    return TimeSeries(grid, values), path


def write_segments_csv(path, regime_path: RegimePath) -> None:
    """Segment table: t_start,t_end,state,A,phi (phi local to the segment)."""
    if regime_path.params is None:
        raise ValueError("path has no oscillator params (indicator-only)")
    bounds = regime_path.segment_bounds()
    with open(path, "w", newline="") as fh:
        fh.write("t_start,t_end,state,A,phi\n")
        for i, p in enumerate(regime_path.params):
            fh.write(f"{float(bounds[i])!r},{float(bounds[i + 1])!r},"
                     f"{int(regime_path.states[i])},{p.amplitude!r},{p.phase!r}\n")


def read_segments_csv(path, omega1: float, omega2: float) -> RegimePath:
    """Parse a segment table back into a RegimePath.

    Frequencies are not stored in the file, so the caller supplies the
    regime-1/regime-2 omegas used to rebuild the per-segment params.
    """
    rows = []
    with open(path, newline="") as fh:
        header = fh.readline().strip()
        if header != "t_start,t_end,state,A,phi":
            raise ValueError(f"unexpected header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise ValueError(f"line {lineno}: expected 5 fields")
            try:
                rows.append((float(parts[0]), float(parts[1]), int(parts[2]),
                             float(parts[3]), float(parts[4])))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
    if not rows:
        raise ValueError("empty segments file")
    for i in range(1, len(rows)):
        if rows[i][0] != rows[i - 1][1]:
            raise ValueError(f"segments are not contiguous at row {i + 1}")
    states = np.array([r[2] for r in rows], dtype=np.int64)
    switch_times = np.array([r[0] for r in rows[1:]], dtype=np.float64)
    omegas = {1: omega1, 2: omega2}
    params = tuple(OscillatorParams(r[3], omegas[r[2]], r[4]) for r in rows)
    return RegimePath(rows[0][0], rows[-1][1], states, switch_times, params)
