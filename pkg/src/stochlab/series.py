"""Uniformly sampled time series and their CSV form.

Grid times are always t0 + i*dt computed by multiplication, never by a
cumulative sum, so time(i) is exact to one rounding regardless of n.

CSV contract: header "t,value", one row per sample, floats written with
repr (shortest round-trip form), so emitted files parse back losslessly and
identical runs are byte-identical. The reader validates uniform spacing to
a relative tolerance of 1e-9.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_SPACING_RTOL = 1e-9


@dataclass(frozen=True)
class SampleGrid:
    """Uniform sampling grid: n samples at t0, t0+dt, ..., t0+(n-1)*dt."""

    t0: float
    dt: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.t0):
            raise ValueError("t0 must be finite")
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError("dt must be finite and positive")
        if self.n < 1:
            raise ValueError("n must be at least 1")

    def time(self, i: int) -> float:
        return self.t0 + i * self.dt

    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.n) * self.dt

    @property
    def span(self) -> float:
        """Elapsed time from the first to the last sample."""
        return (self.n - 1) * self.dt


def make_grid(t0: float, dt: float, n: int) -> SampleGrid:
    return SampleGrid(t0, dt, n)


@dataclass(frozen=True)
class TimeSeries:
    """Values on a SampleGrid. Treated as immutable once constructed."""

    grid: SampleGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if len(v) != self.grid.n:
            raise ValueError(
                f"length mismatch: grid has {self.grid.n} samples, "
                f"got {len(v)} values"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.grid.n

    def times(self) -> np.ndarray:
        return self.grid.times()


def write_series_csv(path, ts: TimeSeries) -> None:
    times = ts.times()
    with open(path, "w", newline="") as fh:
        fh.write("t,value\n")
        for t, v in zip(times, ts.values):
            # builtin-float repr: shortest digits that parse back exactly
            fh.write(f"{float(t)!r},{float(v)!r}\n")


def read_series_csv(path) -> TimeSeries:
    """Parse a t,value CSV back into a TimeSeries.

    Raises ValueError on a bad header, non-numeric cells, or spacing that
    deviates from uniform by more than 1e-9 relative.
    """
    with open(path, newline="") as fh:
        header = fh.readline().strip()
        if header != "t,value":
            raise ValueError(f"expected header 't,value', got {header!r}")
        times = []
        values = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 2 fields, got {len(parts)}")
            try:
                times.append(float(parts[0]))
                values.append(float(parts[1]))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
    if not times:
        raise ValueError("empty series file")
    t = np.asarray(times)
    if len(t) == 1:
        return TimeSeries(SampleGrid(t[0], 1.0, 1), np.asarray(values))
    dt = (t[-1] - t[0]) / (len(t) - 1)
    if dt <= 0.0:
        raise ValueError("timestamps must be strictly increasing")
    expected = t[0] + np.arange(len(t)) * dt
    if np.max(np.abs(t - expected)) > _SPACING_RTOL * abs(dt):
        raise ValueError("timestamps are not uniformly spaced (rel tol 1e-9)")
    return TimeSeries(SampleGrid(t[0], dt, len(t)), np.asarray(values))
