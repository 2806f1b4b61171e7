"""Contrarian long/short strategy engine on synthetic return panels.

Weights buy past losers and short past winners versus the equal-weighted
market: w_it(k) = -(1/N)(R_{i,t-k} - R_{m,t-k}). They sum to zero, so
performance is reported as profit over gross capital at Reg-T (2:1), with
an optional regulatory leverage factor theta applied as theta/2.

The synthetic generator is a lagged one-factor model, R_it = mu_i +
beta_i L_{t-i} + eps_it (asset i sees the common factor with lag i), whose
lag-k autocovariance is beta_i beta_{i+k} sigma_lambda^2 on the k-th
superdiagonal and zero elsewhere. That structure makes expected profit
available in closed form, which the Monte Carlo path must match.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import RandomSource, gaussian_draws


class UndefinedSharpeError(ValueError):
    """Raised when a Sharpe ratio is requested for zero-variance returns."""


@dataclass(frozen=True)
class ReturnPanel:
    """N assets by T periods of simple returns, assets along rows."""

    returns: np.ndarray = field(repr=False)
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        r = np.asarray(self.returns, dtype=np.float64)
        if r.ndim != 2:
            raise ValueError("returns must be a 2-d array (assets x periods)")
        if not np.all(np.isfinite(r)):
            raise ValueError("returns must be finite")
        if self.labels is not None and len(self.labels) != r.shape[0]:
            raise ValueError("labels must match the number of assets")
        object.__setattr__(self, "returns", r)

    @property
    def n_assets(self) -> int:
        return self.returns.shape[0]

    @property
    def n_periods(self) -> int:
        return self.returns.shape[1]


@dataclass(frozen=True)
class LeadLagModel:
    """Lagged-factor return process: R_it = mu_i + beta_i L_{t-i} + eps_it."""

    mu: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    sigma_lambda: float = 1.0
    sigma_eps: float = 1.0

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=np.float64))
        beta = np.atleast_1d(np.asarray(self.beta, dtype=np.float64))
        if mu.shape != beta.shape or mu.ndim != 1:
            raise ValueError("mu and beta must be 1-d vectors of equal length")
        if len(mu) < 2:
            raise ValueError("need at least 2 assets")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(beta))):
            raise ValueError("mu and beta must be finite")
        if self.sigma_lambda < 0.0 or self.sigma_eps < 0.0:
            raise ValueError("sigmas must be nonnegative")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "beta", beta)

    @property
    def n_assets(self) -> int:
        return len(self.mu)


@dataclass(frozen=True)
class StrategyOutput:
    """Backtest results for t = k..T-1 (one row per traded period)."""

    k: int
    theta: float
    periods: np.ndarray = field(repr=False)  # panel column index per row
    weights: np.ndarray = field(repr=False)  # (m, N)
    gross: np.ndarray = field(repr=False)  # V_t
    profits: np.ndarray = field(repr=False)  # pi_t
    returns: np.ndarray = field(repr=False)  # R_pt, 0 where degenerate
    leveraged: np.ndarray = field(repr=False)  # L_pt(theta)
    degenerate: np.ndarray = field(repr=False)  # True where V_t = 0


@dataclass(frozen=True)
class PerfStats:
    mean: float
    std: float
    sharpe: float
    periods_per_year: int = 250


def simulate_deterministic_price(p0: float, increments) -> np.ndarray:
    """Price path P_t = P_{t-1} + X_t seeded at p0 (path excludes p0 itself)."""
    inc = np.asarray(increments, dtype=np.float64)
    if inc.ndim != 1:
        raise ValueError("increments must be a 1-d sequence")
    return p0 + np.cumsum(inc)


def simulate_leadlag(model: LeadLagModel, T: int, src: RandomSource) -> ReturnPanel:
    """Draw a return panel from the lagged-factor model.

    The factor path is drawn first on an index range long enough to cover
    lags 1..N (length T + N), then the N x T idiosyncratic block, so the
    draw count is fixed at (T + N) + N*T regardless of the sigmas.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    n = model.n_assets
    lam = gaussian_draws(src, T + n, 0.0, model.sigma_lambda)
    eps = gaussian_draws(src, n * T, 0.0, model.sigma_eps).reshape(n, T)
    r = np.empty((n, T), dtype=np.float64)
    for j in range(n):
        # asset j+1 reads the factor at t-(j+1); lam[m + n] holds L_m
        start = n - j - 1
        r[j] = model.mu[j] + model.beta[j] * lam[start:start + T] + eps[j]
    return ReturnPanel(r)


def leadlag_autocov(model: LeadLagModel, k: int) -> np.ndarray:
    """Lag-k autocovariance E[(R_{t-k}-mu)(R_t-mu)'] of the factor model.

    Only pairs (i, i+k) share a factor value, so the matrix is the k-th
    superdiagonal of beta_i beta_{i+k} sigma_lambda^2; idiosyncratic noise
    contributes at lag 0 only.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = model.n_assets
    gamma = np.zeros((n, n), dtype=np.float64)
    s2 = model.sigma_lambda ** 2
    for i in range(n - k):
        gamma[i, i + k] = model.beta[i] * model.beta[i + k] * s2
    return gamma


def contrarian_weights(panel: ReturnPanel, t: int, k: int = 1) -> np.ndarray:
    """Date-t weights from date t-k returns: w = -(1/N)(R_{t-k} - mean)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if panel.n_assets < 2:
        raise ValueError("need at least 2 assets")
    if t - k < 0 or t - k >= panel.n_periods:
        raise ValueError("insufficient history for t, k")
    r = panel.returns[:, t - k]
    return -(r - r.mean()) / panel.n_assets


def gross_investment(weights) -> float:
    """V_t = half the sum of absolute weights (long side == short side)."""
    w = np.asarray(weights, dtype=np.float64)
    return 0.5 * float(np.abs(w).sum())


def profit(weights, returns_t) -> float:
    """pi_t = w' R_t."""
    w = np.asarray(weights, dtype=np.float64)
    r = np.asarray(returns_t, dtype=np.float64)
    if w.shape != r.shape:
        raise ValueError("weights and returns must have the same shape")
    return float(w @ r)


def unleveraged_return(weights, returns_t) -> float:
    """R_pt = pi_t / V_t; a degenerate all-zero weight period reports 0."""
    v = gross_investment(weights)
    if v == 0.0:
        return 0.0
    return profit(weights, returns_t) / v


def leveraged_return(r_pt: float, theta: float) -> float:
    """L_pt(theta) = (theta/2) R_pt; theta is the regulatory ratio, >= 2."""
    if theta < 2.0:
        raise ValueError("theta must be >= 2 (Reg-T floor)")
    return (theta / 2.0) * r_pt


def leverage_ratio(long: float, short: float, capital: float) -> float:
    """(|long| + |short|) / capital, the regulatory leverage definition."""
    if capital <= 0.0:
        raise ValueError("capital must be positive")
    return (abs(long) + abs(short)) / capital


def expected_profit_general(mu, gamma_k: np.ndarray) -> float:
    """E[pi_t(k)] = i'Gi/N^2 - tr(G)/N - (1/N) sum (mu_i - mu_m)^2."""
    mu = np.atleast_1d(np.asarray(mu, dtype=np.float64))
    gamma = np.asarray(gamma_k, dtype=np.float64)
    n = len(mu)
    if gamma.shape != (n, n):
        raise ValueError("gamma_k must be N x N matching mu")
    cross = float(gamma.sum()) / n ** 2
    diag = float(np.trace(gamma)) / n
    dispersion = float(((mu - mu.mean()) ** 2).sum()) / n
    return cross - diag - dispersion


def expected_profit_leadlag(model: LeadLagModel) -> float:
    """Closed form for k = 1 under the lagged-factor model.

    The lag-1 matrix has zero trace, so only the superdiagonal sum and the
    mean-dispersion penalty survive.
    """
    n = model.n_assets
    cross = float((model.beta[:-1] * model.beta[1:]).sum())
    mu = model.mu
    dispersion = float(((mu - mu.mean()) ** 2).sum()) / n
    return model.sigma_lambda ** 2 * cross / n ** 2 - dispersion


def backtest(panel: ReturnPanel, k: int = 1, theta: float = 2.0) -> StrategyOutput:
    """Run the contrarian strategy over t = k..T-1.

    Periods where every asset moved identically have V_t = 0; they are
    reported with zero return and flagged rather than aborting the run.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if theta < 2.0:
        raise ValueError("theta must be >= 2 (Reg-T floor)")
    if panel.n_assets < 2:
        raise ValueError("need at least 2 assets")
    T = panel.n_periods
    if T <= k:
        raise ValueError("panel too short for lag k")
    r = panel.returns
    n = panel.n_assets
    base = r[:, : T - k]  # column t-k for t = k..T-1
    w = -(base - base.mean(axis=0)) / n
    gross = 0.5 * np.abs(w).sum(axis=0)
    profits = np.einsum("it,it->t", w, r[:, k:])
    degenerate = gross == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        rets = np.where(degenerate, 0.0, profits / np.where(degenerate, 1.0, gross))
    lev = (theta / 2.0) * rets
    return StrategyOutput(k, theta, np.arange(k, T), w.T.copy(), gross,
                          profits, rets, lev, degenerate)


def perf_stats(returns, periods_per_year: int = 250) -> PerfStats:
    """Mean, sample std (n-1), and annualized Sharpe at a 0% riskfree rate."""
    x = np.asarray(returns, dtype=np.float64)
    if x.ndim != 1 or len(x) < 2:
        raise ValueError("need at least 2 return observations")
    if periods_per_year < 1:
        raise ValueError("periods_per_year must be >= 1")
    mean = float(x.mean())
    std = float(x.std(ddof=1))
    if std == 0.0:
        raise UndefinedSharpeError("returns have zero variance")
    sharpe = math.sqrt(periods_per_year) * mean / std
    return PerfStats(mean, std, sharpe, periods_per_year)


def batch_means_se(x, batch_len: int) -> float:
    """Standard error of the mean of a weakly dependent sequence.

    Splits x into non-overlapping batches (dropping any remainder) and
    uses the spread of batch means; batch_len must comfortably exceed the
    dependence range for the estimate to be honest.
    """
    x = np.asarray(x, dtype=np.float64)
    nb = len(x) // batch_len
    if nb < 2:
        raise ValueError("need at least 2 full batches")
    means = x[: nb * batch_len].reshape(nb, batch_len).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(nb))


def write_panel_csv(path, panel: ReturnPanel, dates=None) -> None:
    """Wide panel CSV: header date,<id1>,... one row per period."""
    labels = panel.labels or tuple(f"a{i + 1}" for i in range(panel.n_assets))
    if dates is None:
        dates = range(panel.n_periods)
    dates = list(dates)
    if len(dates) != panel.n_periods:
        raise ValueError("dates must match the number of periods")
    with open(path, "w", newline="") as fh:
        fh.write("date," + ",".join(labels) + "\n")
        for t, d in enumerate(dates):
            row = ",".join(repr(float(v)) for v in panel.returns[:, t])
            fh.write(f"{d},{row}\n")


def read_panel_csv(path) -> ReturnPanel:
    """Parse a wide panel CSV back into a ReturnPanel (dates discarded)."""
    with open(path, newline="") as fh:
        header = fh.readline().strip()
        cols = header.split(",")
        if len(cols) < 2 or cols[0] != "date":
            raise ValueError("expected header 'date,<id1>,...'")
        labels = tuple(cols[1:])
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(cols):
                raise ValueError(f"line {lineno}: expected {len(cols)} fields")
            try:
                rows.append([float(v) for v in parts[1:]])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
    if not rows:
        raise ValueError("empty panel file")
    return ReturnPanel(np.array(rows, dtype=np.float64).T, labels)


def write_backtest_csv(path, result: StrategyOutput) -> None:
    """Per-period backtest CSV: period,gross,profit,return,leveraged."""
    with open(path, "w", newline="") as fh:
        fh.write("period,gross,profit,return,leveraged\n")
        for i, t in enumerate(result.periods):
            fh.write(
                f"{int(t)},{float(result.gross[i])!r},{float(result.profits[i])!r},"
                f"{float(result.returns[i])!r},{float(result.leveraged[i])!r}\n"
            )


def read_backtest_csv(path) -> dict[str, np.ndarray]:
    """Read a backtest CSV into column arrays keyed by header name."""
    with open(path, newline="") as fh:
        header = fh.readline().strip()
        if header != "period,gross,profit,return,leveraged":
            raise ValueError(f"unexpected header {header!r}")
        cols = header.split(",")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(cols):
                raise ValueError(f"line {lineno}: expected {len(cols)} fields")
            rows.append([float(v) for v in parts])
    if not rows:
        raise ValueError("empty backtest file")
    arr = np.array(rows, dtype=np.float64)
    out = {name: arr[:, j] for j, name in enumerate(cols)}
    out["period"] = out["period"].astype(np.int64)
    return out
