"""Rare-event estimation error, Gaussian tail arithmetic, and compound returns.

Three small families: the binomial standard error of an event-probability
estimate and its 1/sqrt(T) table; sigma-multiple / tail-probability /
recurrence-time arithmetic for large losses; and the annual distribution of
a strategy that wins r_win with probability p_win each day, both in closed
form (with documented approximation conventions) and by Monte Carlo.

The closed-form annual stats adopt these conventions: expected compound
return is (1 + E[r])^D - 1 (exact); the annual std uses the lognormal
formula on the daily log-return mean/variance (near-exact); the negative-
year probability applies a Gaussian approximation to the annual level
return, and the m-of-n probability is binomial on top of it. The Monte
Carlo routine is the ground truth the approximations are judged against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .normal import gaussian_upper_tail
from .rng import RandomSource

__all__ = [
    "BernoulliEstimate", "BinaryStrategySpec", "CompoundReturnStats",
    "McCompoundResult", "rare_event_se", "estimate_event_prob", "se_table",
    "write_se_table_csv", "sigma_multiple", "gaussian_upper_tail",
    "recurrence_years", "compound_return_stats", "mc_compound_return",
]


@dataclass(frozen=True)
class BernoulliEstimate:
    p_hat: float
    T: int
    se: float


@dataclass(frozen=True)
class BinaryStrategySpec:
    """Daily two-point return: r_win with probability p_win, else r_loss."""

    p_win: float
    r_win: float
    r_loss: float
    days_per_year: int = 250

    def __post_init__(self):
        if not 0.0 < self.p_win < 1.0:
            raise ValueError("p_win must be in (0, 1)")
        if not self.r_win > self.r_loss:
            raise ValueError("r_win must exceed r_loss")
        if self.r_loss <= -1.0:
            raise ValueError("r_loss must exceed -1 (total loss not modeled)")
        if self.days_per_year < 1:
            raise ValueError("days_per_year must be >= 1")


@dataclass(frozen=True)
class CompoundReturnStats:
    expected_annual_compound: float
    annual_std: float
    p_negative_year: float
    p_at_least_m_of_n: float
    m: int = 2
    n_years: int = 10


@dataclass(frozen=True)
class McCompoundResult:
    mean: float
    std: float
    frac_negative: float
    annual_returns: np.ndarray = field(repr=False)


def rare_event_se(p: float, T: int) -> float:
    """SE of the relative-frequency estimator of an event of probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    if T < 1:
        raise ValueError("T must be >= 1")
    return math.sqrt(p * (1.0 - p) / T)


def estimate_event_prob(indicators) -> BernoulliEstimate:
    """Relative frequency of a 0/1 sequence with its plug-in standard error."""
    x = np.asarray(indicators, dtype=np.float64)
    if x.ndim != 1 or len(x) == 0:
        raise ValueError("indicators must be a non-empty 1-d sequence")
    if not np.all((x == 0.0) | (x == 1.0)):
        raise ValueError("indicators must be 0/1 valued")
    p_hat = float(x.mean())
    return BernoulliEstimate(p_hat, len(x), rare_event_se(p_hat, len(x)))


def se_table(ps, Ts) -> np.ndarray:
    """Grid of rare_event_se values, ps along rows and Ts along columns."""
    ps = list(ps)
    Ts = list(Ts)
    if not ps or not Ts:
        raise ValueError("ps and Ts must be non-empty")
    return np.array([[rare_event_se(p, T) for T in Ts] for p in ps])


def write_se_table_csv(path, ps, Ts) -> None:
    """CSV layout: header p,T=<T1>,... then one row per p."""
    grid = se_table(ps, Ts)
    with open(path, "w", newline="") as fh:
        fh.write("p," + ",".join(f"T={T}" for T in Ts) + "\n")
        for p, row in zip(ps, grid):
            cells = ",".join(repr(float(v)) for v in row)
            fh.write(f"{float(p)!r},{cells}\n")


def sigma_multiple(loss: float, daily_std: float, days: int, theta: float) -> float:
    """How many leveraged daily sigmas a multi-day loss represents.

    The quoted daily std is at Reg-T basis, so the theta:1 book's std is
    daily_std * theta/2; days aggregate as sqrt(days) under IID.
    """
    if loss <= 0.0 or daily_std <= 0.0:
        raise ValueError("loss and daily_std must be positive")
    if days < 1:
        raise ValueError("days must be >= 1")
    if theta < 2.0:
        raise ValueError("theta must be >= 2 (Reg-T floor)")
    return loss / (daily_std * (theta / 2.0) * math.sqrt(days))


def recurrence_years(prob: float, window_days: int,
                     calendar_days_per_year: int = 365) -> float:
    """Expected years between events of the given per-window probability.

    Assumes independent non-overlapping windows, so the mean wait is
    window_days/prob days.
    """
    if not 0.0 < prob <= 1.0:
        raise ValueError("prob must be in (0, 1]")
    if window_days < 1 or calendar_days_per_year < 1:
        raise ValueError("day counts must be >= 1")
    return (window_days / prob) / calendar_days_per_year


def _binomial_at_least(m: int, n: int, q: float) -> float:
    """P(X >= m) for X ~ Binomial(n, q), summed exactly over the short side."""
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    below = sum(math.comb(n, j) * q ** j * (1.0 - q) ** (n - j)
                for j in range(m))
    return 1.0 - below


def compound_return_stats(spec: BinaryStrategySpec, m: int = 2,
                          n_years: int = 10) -> CompoundReturnStats:
    """Closed-form annual stats for the two-point daily strategy.

    See the module docstring for the approximation conventions; the exact
    annual distribution is binomial in the number of winning days, and
    mc_compound_return exposes it empirically.
    """
    d = spec.days_per_year
    p = spec.p_win
    mean_daily = p * spec.r_win + (1.0 - p) * spec.r_loss
    expected = (1.0 + mean_daily) ** d - 1.0

    lw = math.log1p(spec.r_win)
    ll = math.log1p(spec.r_loss)
    m1 = p * lw + (1.0 - p) * ll
    v = p * lw * lw + (1.0 - p) * ll * ll - m1 * m1
    annual_std = math.sqrt(math.expm1(d * v)) * math.exp(d * m1 + 0.5 * d * v)

    p_negative = gaussian_upper_tail(expected / annual_std)
    p_at_least = _binomial_at_least(m, n_years, p_negative)
    return CompoundReturnStats(expected, annual_std, p_negative, p_at_least,
                               m, n_years)


def mc_compound_return(spec: BinaryStrategySpec, years: int,
                       src: RandomSource) -> McCompoundResult:
    """Simulate whole years of daily draws and compound within each year.

    A year's gross return depends only on its count of winning days, so
    each year reduces to (1+r_win)^w (1+r_loss)^(d-w); draws are consumed
    in year-major order (chunked internally, draw sequence independent of
    chunk size).
    """
    if years < 1:
        raise ValueError("years must be >= 1")
    d = spec.days_per_year
    lw = math.log1p(spec.r_win)
    ll = math.log1p(spec.r_loss)
    annual = np.empty(years, dtype=np.float64)
    chunk = max(1, min(years, 20_000))
    done = 0
    while done < years:
        ny = min(chunk, years - done)
        u = src.uniforms(ny * d).reshape(ny, d)
        wins = (u < spec.p_win).sum(axis=1)
        annual[done:done + ny] = np.expm1(wins * lw + (d - wins) * ll)
        done += ny
    std = float(annual.std(ddof=1)) if years > 1 else 0.0
    return McCompoundResult(float(annual.mean()), std,
                            float((annual < 0.0).mean()), annual)


def read_se_table_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read back an SE table CSV; returns (ps, Ts, table)."""
    with open(path, newline="") as fh:
        header = fh.readline().strip()
        cols = header.split(",")
        if len(cols) < 2 or cols[0] != "p" or not all(c.startswith("T=") for c in cols[1:]):
            raise ValueError("expected header 'p,T=<T1>,...'")
        Ts = np.array([int(c[2:]) for c in cols[1:]])
        ps = []
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(cols):
                raise ValueError(f"line {lineno}: expected {len(cols)} fields")
            ps.append(float(parts[0]))
            rows.append([float(v) for v in parts[1:]])
    if not rows:
        raise ValueError("empty table file")
    return np.array(ps), Ts, np.array(rows, dtype=np.float64)
