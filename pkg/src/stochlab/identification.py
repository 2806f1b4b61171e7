"""Simultaneous supply/demand simulator and the OLS-vs-2SLS contrast.

Every observation is an equilibrium of
    demand: Q = d0 + d1 P + d2 Y + eps_d
    supply: Q = s0 + s1 P + s2 C + eps_s
so price is correlated with both structural shocks and a naive regression
of Q on P estimates neither curve: with no exogenous shifters its slope
converges to the shock-variance-weighted blend (d1 s_s^2 + s1 s_d^2) /
(s_s^2 + s_d^2). Income Y shifts only demand and costs C only supply,
which makes C a valid instrument for the demand equation and Y for the
supply equation; two_stage_least_squares exploits exactly that.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .rng import RandomSource, gaussian_draws

_IDENTITY_RTOL = 1e-10
_FIRST_STAGE_T_MIN = 3.0


class SingularSystemError(ValueError):
    """Supply and demand price slopes coincide; no unique equilibrium."""


class WeakInstrumentError(ValueError):
    """Excluded instrument's first-stage t-statistic is below the floor."""


@dataclass(frozen=True)
class MarketParams:
    """Structural coefficients plus shock and exogenous-process scales."""

    d0: float
    d1: float
    d2: float
    s0: float
    s1: float
    s2: float
    sigma_d: float = 1.0
    sigma_s: float = 1.0
    y_mean: float = 0.0
    y_std: float = 1.0
    c_mean: float = 0.0
    c_std: float = 1.0

    def __post_init__(self):
        if self.s1 == self.d1:
            raise SingularSystemError("s1 must differ from d1")
        if not (self.d1 < 0.0 < self.s1):
            warnings.warn("unconventional signs: expected d1 < 0 < s1",
                          stacklevel=3)
        if min(self.sigma_d, self.sigma_s, self.y_std, self.c_std) < 0.0:
            raise ValueError("scales must be nonnegative")


GENERIC_MARKET = MarketParams(d0=10.0, d1=-1.0, d2=0.5, s0=2.0, s1=1.0, s2=0.5)


@dataclass(frozen=True)
class EquilibriumData:
    P: np.ndarray = field(repr=False)
    Q: np.ndarray = field(repr=False)
    Y: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)

    def __post_init__(self):
        arrays = []
        n = None
        for name in ("P", "Q", "Y", "C"):
            a = np.asarray(getattr(self, name), dtype=np.float64)
            if a.ndim != 1 or (n is not None and len(a) != n):
                raise ValueError("P, Q, Y, C must be 1-d and equally long")
            n = len(a)
            arrays.append(a)
        for name, a in zip(("P", "Q", "Y", "C"), arrays):
            object.__setattr__(self, name, a)

    def __len__(self) -> int:
        return len(self.P)


@dataclass(frozen=True)
class OlsFit:
    slope: float
    se: float
    intercept: float


@dataclass(frozen=True)
class TwoStageEstimates:
    equation: str
    intercept: float
    price_coef: float
    exog_coef: float
    se_intercept: float
    se_price_coef: float
    se_exog_coef: float
    first_stage_t: float


def simulate_market(params: MarketParams, T: int, src: RandomSource) -> EquilibriumData:
    """Draw T market equilibria.

    Draw order is fixed: Y, C, demand shocks, supply shocks (T each).
    Price comes from the reduced form, quantity from the demand equation,
    and the supply equation is re-checked on every row as a construction
    guard.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    y = gaussian_draws(src, T, params.y_mean, params.y_std)
    c = gaussian_draws(src, T, params.c_mean, params.c_std)
    ed = gaussian_draws(src, T, 0.0, params.sigma_d)
    es = gaussian_draws(src, T, 0.0, params.sigma_s)
    p = ((params.d0 - params.s0) + params.d2 * y - params.s2 * c + ed - es) \
        / (params.s1 - params.d1)
    q = params.d0 + params.d1 * p + params.d2 * y + ed
    q_supply = params.s0 + params.s1 * p + params.s2 * c + es
    scale = np.maximum(np.abs(q), np.abs(q_supply))
    bad = np.abs(q - q_supply) > _IDENTITY_RTOL * np.maximum(scale, 1.0)
    if bad.any():
        raise AssertionError("equilibrium identity violated at generation")
    return EquilibriumData(p, q, y, c)


def ols_slope(data: EquilibriumData, dependent: str = "Q",
              regressor: str = "P") -> OlsFit:
    """Naive one-regressor OLS with its conventional standard error."""
    y = getattr(data, dependent)
    x = getattr(data, regressor)
    n = len(x)
    if n < 3:
        raise ValueError("need at least 3 observations")
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise ValueError("regressor has zero variance")
    slope = float(xc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - intercept - slope * x
    sigma2 = float(resid @ resid) / (n - 2)
    return OlsFit(slope, math.sqrt(sigma2 / sxx), intercept)


def _first_stage_t(z: np.ndarray, p: np.ndarray, col: int) -> tuple[np.ndarray, float]:
    """Fitted first stage and the t-statistic of the excluded instrument."""
    n, k = z.shape
    coef, _, rank, _ = np.linalg.lstsq(z, p, rcond=None)
    if rank < k:
        raise SingularSystemError("first-stage design matrix is rank deficient")
    fitted = z @ coef
    resid = p - fitted
    sigma2 = float(resid @ resid) / (n - k)
    ztz_inv = np.linalg.inv(z.T @ z)
    se = math.sqrt(max(sigma2 * ztz_inv[col, col], 0.0))
    if se == 0.0:
        t = math.inf if coef[col] != 0.0 else 0.0
    else:
        t = coef[col] / se
    return fitted, t


def two_stage_least_squares(data: EquilibriumData,
                            equation: str) -> TwoStageEstimates:
    """2SLS for one structural equation.

    The demand equation regresses Q on (1, P, Y) instrumenting P with C;
    supply regresses Q on (1, P, C) instrumenting P with Y. Standard
    errors are the homoskedastic 2SLS formula with residuals taken at the
    actual regressors, and a first-stage t-statistic under 3 for the
    excluded instrument raises WeakInstrumentError instead of returning a
    meaningless estimate.
    """
    if equation == "demand":
        exog, excluded = data.Y, data.C
    elif equation == "supply":
        exog, excluded = data.C, data.Y
    else:
        raise ValueError("equation must be 'demand' or 'supply'")
    n = len(data)
    if n < 4:
        raise ValueError("need at least 4 observations")
    ones = np.ones(n)
    z = np.column_stack([ones, exog, excluded])
    fitted_p, t_stat = _first_stage_t(z, data.P, 2)
    if abs(t_stat) < _FIRST_STAGE_T_MIN:
        raise WeakInstrumentError(
            f"first-stage |t| = {abs(t_stat):.2f} < {_FIRST_STAGE_T_MIN} for "
            f"the {equation} equation's excluded instrument")

    xhat = np.column_stack([ones, fitted_p, exog])
    coef, _, rank, _ = np.linalg.lstsq(xhat, data.Q, rcond=None)
    if rank < 3:
        raise SingularSystemError("second-stage design matrix is rank deficient")
    # residuals at the actual regressors, not the fitted ones
    x = np.column_stack([ones, data.P, exog])
    resid = data.Q - x @ coef
    sigma2 = float(resid @ resid) / (n - 3)
    cov = sigma2 * np.linalg.inv(xhat.T @ xhat)
    ses = np.sqrt(np.maximum(np.diag(cov), 0.0))
    return TwoStageEstimates(equation, float(coef[0]), float(coef[1]),
                             float(coef[2]), float(ses[0]), float(ses[1]),
                             float(ses[2]), float(t_stat))


def ols_plim_slope(params: MarketParams) -> float:
    """Probability limit of the naive slope when d2 = s2 = 0."""
    vd = params.sigma_d ** 2
    vs = params.sigma_s ** 2
    if vd + vs == 0.0:
        raise ValueError("undefined without shock variance")
    return (params.d1 * vs + params.s1 * vd) / (vs + vd)


def write_market_csv(path, data: EquilibriumData) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("P,Q,Y,C\n")
        for row in zip(data.P, data.Q, data.Y, data.C):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_market_csv(path) -> EquilibriumData:
    with open(path, newline="") as fh:
        header = fh.readline().strip()
        if header != "P,Q,Y,C":
            raise ValueError(f"expected header 'P,Q,Y,C', got {header!r}")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ValueError(f"line {lineno}: expected 4 fields")
            try:
                rows.append([float(v) for v in parts])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
    if not rows:
        raise ValueError("empty market file")
    arr = np.array(rows, dtype=np.float64)
    return EquilibriumData(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3])


def write_estimates_csv(path, params: MarketParams, ols: OlsFit,
                        demand: TwoStageEstimates, supply: TwoStageEstimates) -> None:
    """Long-format comparison table: truth vs naive OLS vs two-stage fits.

    The naive regression of Q on P has no exogenous-variable column, so those
    cells are nan rather than silently reusing an unrelated number.
    """
    nan = float("nan")
    truth = {
        ("demand", "intercept"): params.d0,
        ("demand", "price_coef"): params.d1,
        ("demand", "exog_coef"): params.d2,
        ("supply", "intercept"): params.s0,
        ("supply", "price_coef"): params.s1,
        ("supply", "exog_coef"): params.s2,
    }
    fits = {"demand": demand, "supply": supply}
    with open(path, "w", newline="") as fh:
        fh.write("equation,parameter,truth,ols,ols_se,tsls,tsls_se\n")
        for eq in ("demand", "supply"):
            fit = fits[eq]
            rows = [
                ("intercept", ols.intercept, nan, fit.intercept, fit.se_intercept),
                ("price_coef", ols.slope, ols.se, fit.price_coef, fit.se_price_coef),
                ("exog_coef", nan, nan, fit.exog_coef, fit.se_exog_coef),
            ]
            for name, o, ose, ts, tse in rows:
                fh.write(
                    f"{eq},{name},{float(truth[(eq, name)])!r},"
                    f"{float(o)!r},{float(ose)!r},{float(ts)!r},{float(tse)!r}\n"
                )


def read_estimates_csv(path) -> list[dict]:
    """Read back an estimates table as a list of row dicts."""
    expected = "equation,parameter,truth,ols,ols_se,tsls,tsls_se"
    with open(path, newline="") as fh:
        header = fh.readline().strip()
        if header != expected:
            raise ValueError(f"unexpected header {header!r}")
        names = header.split(",")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(names):
                raise ValueError(f"line {lineno}: expected {len(names)} fields")
            row: dict = {"equation": parts[0], "parameter": parts[1]}
            for name, val in zip(names[2:], parts[2:]):
                row[name] = float(val)
            rows.append(row)
    if not rows:
        raise ValueError("empty estimates file")
    return rows
