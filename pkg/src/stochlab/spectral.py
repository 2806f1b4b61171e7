"""Discrete spectra: DFT, arbitrary-length FFT, periodogram, peak picking.

Conventions: un-normalized forward transform X_k = sum_t x_t e^{-2 pi i k t/n}
(so bin 0 is the plain sum), bin k maps to frequency k / (n dt) in cycles per
time unit, periodogram power is |X_k|^2 / n over bins 1..n//2.

The transform is an owned batched mixed-radix Cooley-Tukey: composite sizes
split on their smallest prime factor with all same-size sub-transforms done
in one vectorized level, small prime sizes fall back to a cached direct DFT
matrix, large prime sizes go through Bluestein's chirp-z (whose internal
convolution reuses the power-of-two path). dft_reference is the independent
O(n^2) oracle the tests check the fast path against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .series import SampleGrid, TimeSeries

_DIRECT_DFT_MAX = 61  # prime sizes up to this use the O(n^2) matrix
_dft_matrices: dict[int, np.ndarray] = {}
_twiddles: dict[tuple[int, int], np.ndarray] = {}


@dataclass(frozen=True)
class Spectrum:
    """Forward DFT coefficients of one real or complex series."""

    coefficients: np.ndarray = field(repr=False)
    dt: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.complex128)
        if c.ndim != 1 or len(c) < 1:
            raise ValueError("coefficients must be a nonempty 1-d array")
        object.__setattr__(self, "coefficients", c)
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError("dt must be finite and positive")

    @property
    def n(self) -> int:
        return len(self.coefficients)

    def frequencies(self) -> np.ndarray:
        """Bin frequencies k/(n*dt), cycles per time unit, k = 0..n-1."""
        return np.arange(self.n) / (self.n * self.dt)


@dataclass(frozen=True)
class Periodogram:
    """Power |X_k|^2 / n on the positive-frequency bins 1..n//2."""

    frequencies: np.ndarray = field(repr=False)
    power: np.ndarray = field(repr=False)
    demeaned: bool
    n: int
    dt: float


@dataclass(frozen=True)
class PeakReport:
    """Top-k periodogram peaks, strongest first; ties go to lower frequency."""

    frequencies: np.ndarray
    power: np.ndarray


def _dft_matrix(n: int) -> np.ndarray:
    mat = _dft_matrices.get(n)
    if mat is None:
        k = np.arange(n)
        mat = np.exp((-2j * np.pi / n) * np.outer(k, k))
        _dft_matrices[n] = mat
    return mat


def _twiddle(n: int, r: int) -> np.ndarray:
    tw = _twiddles.get((n, r))
    if tw is None:
        k = np.arange(n)
        s = np.arange(r)
        tw = np.exp((-2j * np.pi / n) * (s[:, None] * k[None, :]))
        _twiddles[(n, r)] = tw
    return tw


def _smallest_prime_factor(n: int) -> int:
    if n % 2 == 0:
        return 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return f
        f += 2
    return n


def _fft_batched(x: np.ndarray) -> np.ndarray:
    # x: (batch, n) complex128
    n = x.shape[1]
    if n == 1:
        return x.copy()
    r = _smallest_prime_factor(n)
    if r == n:
        if n <= _DIRECT_DFT_MAX:
            return x @ _dft_matrix(n).T
        return _bluestein(x)
    m = n // r
    # residue classes mod r: element j = q*r + s -> sub-sequence s, index q
    xs = x.reshape(x.shape[0], m, r)
    sub = _fft_batched(
        xs.transpose(0, 2, 1).reshape(x.shape[0] * r, m)
    ).reshape(x.shape[0], r, m)
    k = np.arange(n)
    yk = sub[:, :, k % m]  # (batch, r, n)
    return np.sum(yk * _twiddle(n, r)[None, :, :], axis=1)


def _bluestein(x: np.ndarray) -> np.ndarray:
    n = x.shape[1]
    mlen = 1 << (2 * n - 1).bit_length()
    j = np.arange(n)
    q = (j * j) % (2 * n)  # chirp exponent mod 2n keeps the angle small
    w = np.exp((-1j * np.pi / n) * q)
    a = np.zeros((x.shape[0], mlen), dtype=np.complex128)
    a[:, :n] = x * w
    b = np.zeros(mlen, dtype=np.complex128)
    wc = np.conj(w)
    b[:n] = wc
    b[mlen - n + 1:] = wc[1:][::-1]
    fa = _fft_batched(a)
    fb = _fft_batched(b[None, :])[0]
    conv = np.conj(_fft_batched(np.conj(fa * fb[None, :]))) / mlen
    return w[None, :] * conv[:, :n]


def _as_complex_vector(values) -> np.ndarray:
    x = np.asarray(values)
    if x.ndim != 1 or len(x) < 1:
        raise ValueError("values must be a nonempty 1-d array")
    x = x.astype(np.complex128)
    if not np.all(np.isfinite(x.real)) or not np.all(np.isfinite(x.imag)):
        raise ValueError("values must be finite")
    return x


def dft_reference(values, dt: float = 1.0) -> Spectrum:
    """O(n^2) direct transform; the oracle the fast path is tested against."""
    x = _as_complex_vector(values)
    n = len(x)
    k = np.arange(n)
    mat = np.exp((-2j * np.pi / n) * np.outer(k, k))
    return Spectrum(mat @ x, dt)


def fft(values, dt: float = 1.0) -> Spectrum:
    """Fast transform for arbitrary n, identical contract to dft_reference."""
    x = _as_complex_vector(values)
    return Spectrum(_fft_batched(x[None, :])[0], dt)


def periodogram(ts: TimeSeries, demean: bool = True) -> Periodogram:
    """Power spectrum of a series on bins 1..n//2.

    demean=True (default) removes the sample mean first so bin-0 leakage from
    a constant offset cannot mask real peaks.
    """
    n = ts.grid.n
    if n < 2:
        raise ValueError("periodogram needs at least 2 samples")
    values = ts.values
    if demean:
        values = values - values.mean()
    spec = fft(values, ts.grid.dt)
    k = np.arange(1, n // 2 + 1)
    power = np.abs(spec.coefficients[k]) ** 2 / n
    return Periodogram(spec.frequencies()[k], power, bool(demean), n, ts.grid.dt)


def dominant_frequencies(pgram: Periodogram, k: int = 1) -> PeakReport:
    """Top-k bins by power; exact ties resolve toward lower frequency."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > len(pgram.power):
        raise ValueError(f"k = {k} exceeds the {len(pgram.power)} available bins")
    order = np.argsort(-pgram.power, kind="stable")[:k]
    return PeakReport(pgram.frequencies[order], pgram.power[order])


def separated_peaks(pgram: Periodogram, k: int = 2, min_separation: float = 0.0) -> PeakReport:
    """Top-k bins subject to pairwise frequency separation >= min_separation.

    Greedy by power: each selected bin excludes the band around it, so a strong
    peak's leakage skirt cannot occupy several of the k slots. min_separation=0
    reduces to dominant_frequencies.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if min_separation < 0.0 or not math.isfinite(min_separation):
        raise ValueError("min_separation must be finite and non-negative")
    order = np.argsort(-pgram.power, kind="stable")
    chosen: list[int] = []
    for idx in order:
        f = pgram.frequencies[idx]
        if all(abs(f - pgram.frequencies[j]) >= min_separation for j in chosen):
            chosen.append(int(idx))
            if len(chosen) == k:
                break
    if len(chosen) < k:
        raise ValueError(
            f"only {len(chosen)} bins satisfy separation {min_separation} (k = {k})"
        )
    sel = np.array(chosen)
    return PeakReport(pgram.frequencies[sel], pgram.power[sel])


def write_periodogram_csv(path, pgram: Periodogram) -> None:
    """Plot-ready CSV, header frequency,magnitude, full repr precision."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("frequency,magnitude\n")
        for f, p in zip(pgram.frequencies, pgram.power):
            fh.write(f"{float(f)!r},{float(p)!r}\n")


def read_periodogram_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read back a periodogram CSV; returns (frequencies, magnitudes)."""
    freqs: list[float] = []
    mags: list[float] = []
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != "frequency,magnitude":
            raise ValueError(f"unexpected header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 2 fields, got {len(parts)}")
            freqs.append(float(parts[0]))
            mags.append(float(parts[1]))
    return np.array(freqs), np.array(mags)


def growth_rates(ts: TimeSeries) -> TimeSeries:
    """Per-step growth v[i]/v[i-1] - 1, stamped at the end of each step.

    Requires strictly positive values; output grid is (t0 + dt, dt, n - 1).
    """
    if ts.grid.n < 2:
        raise ValueError("growth rates need at least 2 samples")
    v = ts.values
    if np.any(v <= 0.0):
        raise ValueError("values must be strictly positive")
    rates = v[1:] / v[:-1] - 1.0
    grid = SampleGrid(ts.grid.t0 + ts.grid.dt, ts.grid.dt, ts.grid.n - 1)
    return TimeSeries(grid, rates)


def write_peaks_csv(path, report: PeakReport) -> None:
    """Ranked peak table: rank,frequency,magnitude (rank 1 = strongest)."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("rank,frequency,magnitude\n")
        for i, (f, p) in enumerate(zip(report.frequencies, report.power), start=1):
            fh.write(f"{i},{float(f)!r},{float(p)!r}\n")


def read_peaks_csv(path) -> PeakReport:
    """Read back a peaks table written by write_peaks_csv."""
    freqs: list[float] = []
    mags: list[float] = []
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != "rank,frequency,magnitude":
            raise ValueError(f"unexpected header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 3 fields, got {len(parts)}")
            if int(parts[0]) != lineno - 1:
                raise ValueError(f"line {lineno}: rank out of order")
            freqs.append(float(parts[1]))
            mags.append(float(parts[2]))
    if not freqs:
        raise ValueError("empty peaks file")
    return PeakReport(np.array(freqs), np.array(mags))
