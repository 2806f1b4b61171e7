"""Named end-to-end reproduction cases behind `stochlab reproduce`.

Each case re-runs one headline experiment at full scale and checks the
published numbers or the stated statistical property, returning a CaseResult
rather than raising, so the whole recipe set always runs to completion.

Two cases fail by design of the underlying model, and the failures are kept
honest rather than papered over (details in the case docstrings and in the
failure messages): `fig45-regimes` and `compound-quartet`.

All cases are deterministic given the base seed. Replications use split
substreams, so case order and replication counts never shift the draws.
"""

from __future__ import annotations

import hashlib
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from . import identification, oscillator, regime, risk, spectral, statarb
from .normal import gaussian_upper_tail
from .rng import RandomSource, gaussian_draws, split_stream
from .series import SampleGrid, TimeSeries, make_grid


@dataclass(frozen=True)
class CaseResult:
    name: str
    criterion: int
    passed: bool
    detail: str


def _src(seed: int, criterion: int, k: int = 0) -> RandomSource:
    """Substream for replication k of one case; disjoint across cases."""
    return split_stream(RandomSource(seed, stream_id=criterion), k)


# -- case 1 -----------------------------------------------------------------

def _case_point_value(seed: int) -> tuple[bool, str]:
    value = oscillator.evaluate(oscillator.OscillatorParams(2.0, 1.5, 0.5), 3.5)
    err = abs(value - 1.7224)
    return err <= 5e-5, f"evaluate(2, 1.5, 0.5; t=3.5) = {value:.6f}, |err| = {err:.2e}"


# -- case 2 -----------------------------------------------------------------

def _case_interval(seed: int) -> tuple[bool, str]:
    params = oscillator.OscillatorParams(2.0, 1.5, 0.5)
    sigma = 0.15
    interval = oscillator.prediction_interval(params, 3.5, sigma, coverage=0.95)
    err_lo = abs(interval.lower - 1.4284)
    err_hi = abs(interval.upper - 2.0164)
    draws = gaussian_draws(_src(seed, 2), 1_000_000, mean=interval.center, std=sigma)
    coverage = float(np.mean((draws >= interval.lower) & (draws <= interval.upper)))
    ok = err_lo <= 5e-5 and err_hi <= 5e-5 and 0.9485 <= coverage <= 0.9515
    return ok, (f"interval = [{interval.lower:.5f}, {interval.upper:.5f}], "
                f"coverage = {coverage:.4f}")


# -- case 3 -----------------------------------------------------------------

def _case_fft_oracle(seed: int) -> tuple[bool, str]:
    worst_rel = 0.0
    worst_parseval = 0.0
    sizes = list(range(1, 65)) + [1440]
    for n in sizes:
        for rep in range(10):
            src = _src(seed, 3, n * 16 + rep)
            x = src.normals(n) + 1j * src.normals(n)
            fast = spectral.fft(x).coefficients
            ref = spectral.dft_reference(x).coefficients
            scale = float(np.max(np.abs(ref))) or 1.0
            worst_rel = max(worst_rel, float(np.max(np.abs(fast - ref))) / scale)
            lhs = float(np.sum(np.abs(x) ** 2))
            rhs = float(np.sum(np.abs(fast) ** 2)) / n
            worst_parseval = max(worst_parseval, abs(lhs - rhs) / lhs)
    ok = worst_rel <= 1e-9 and worst_parseval <= 1e-10
    return ok, (f"max rel err vs reference = {worst_rel:.2e}, "
                f"max Parseval rel err = {worst_parseval:.2e} "
                f"(n = 1..64 and 1440, 10 seeds each)")


# -- case 4 -----------------------------------------------------------------

def _fig3_grid() -> SampleGrid:
    return make_grid(0.0, 1.0 / 1440.0, 1440)


def _case_fig3_recovery(seed: int) -> tuple[bool, str]:
    grid = _fig3_grid()
    omega = 2.0 * math.pi * 24.0
    amplitude = math.sqrt(2.0)
    sigma = oscillator.sigma_for_snr(amplitude, 0.1)  # sqrt(10)
    hits_clean = hits_noisy = 0
    runs = 100
    for i in range(runs):
        src = _src(seed, 4, i)
        phi = float(src.uniforms(1)[0]) * 2.0 * math.pi
        params = oscillator.OscillatorParams(amplitude, omega, phi)
        clean = oscillator.simulate_deterministic(params, grid)
        peak = spectral.dominant_frequencies(spectral.periodogram(clean), 1)
        hits_clean += abs(peak.frequencies[0] - 24.0) <= 1.0
        noisy = oscillator.simulate_noisy(params, grid, sigma, src)
        peak = spectral.dominant_frequencies(spectral.periodogram(noisy), 1)
        hits_noisy += abs(peak.frequencies[0] - 24.0) <= 1.0
    ok = hits_clean >= 95 and hits_noisy >= 95
    return ok, (f"dominant bin at 24 cycles/day +-1: noiseless {hits_clean}/{runs}, "
                f"SNR=0.1 {hits_noisy}/{runs} (need >= 95)")


# -- case 5 -----------------------------------------------------------------

def _regime_spec(half_life: float, internal_dt: float) -> regime.RegimeOscillatorSpec:
    switching = regime.MarkovSwitchSpec(
        regime.half_life_to_p(half_life, internal_dt), internal_dt)
    return regime.RegimeOscillatorSpec(1.0, 0.0, 2.0 * math.pi * 24.0,
                                       2.0 * math.pi * 48.0, switching)


def _case_fig45_regimes(seed: int) -> tuple[bool, str]:
    """Two-regime spectra. This case FAILS by the model's own physics.

    Slow switching (half-life 4 h over a 24 h window) often starves one regime
    of dwell time and re-enters regimes with unrelated phases, so the two-peak
    check cannot reach 95/100 under any peak extraction (the oracle-band upper
    bound measures ~70/100). Fast switching (half-life 30 s) concentrates the
    spectrum at the root-mean-square frequency sqrt((24^2+48^2)/2) ~ 38
    cycles/day, not at the harmonic mean 32 the check expects; an independent
    ODE integration and the zero-crossing rate both confirm 38.
    """
    grid = _fig3_grid()
    dt = grid.dt
    runs = 100
    slow_hits = 0
    spec_slow = _regime_spec(4.0 / 24.0, dt)
    for i in range(runs):
        ts, _ = regime.simulate_regime_oscillator(spec_slow, grid, _src(seed, 5, i))
        peaks = spectral.separated_peaks(spectral.periodogram(ts), 2, min_separation=12.0)
        lo, hi = sorted(peaks.frequencies)
        slow_hits += abs(lo - 24.0) <= 1.0 and abs(hi - 48.0) <= 1.0
    fast_hits = 0
    fast_freqs = []
    spec_fast = _regime_spec(30.0 / 86400.0, dt / 10.0)
    for i in range(runs):
        ts, _ = regime.simulate_regime_oscillator(spec_fast, grid, _src(seed, 5, runs + i))
        peak = spectral.dominant_frequencies(spectral.periodogram(ts), 1)
        fast_freqs.append(float(peak.frequencies[0]))
        fast_hits += abs(peak.frequencies[0] - 32.0) <= 2.0
    ok = slow_hits >= 95 and fast_hits >= 90
    return ok, (f"4h half-life two peaks at 24/48 +-1: {slow_hits}/{runs} (need >= 95); "
                f"30s half-life peak at 32 +-2: {fast_hits}/{runs} (need >= 90, "
                f"observed peak mean {np.mean(fast_freqs):.1f} = RMS frequency, "
                f"not the harmonic mean)")


# -- case 6 -----------------------------------------------------------------

def _case_continuity(seed: int) -> tuple[bool, str]:
    omega1, omega2 = 2.0 * math.pi, 4.0 * math.pi
    internal_dt = (2.0 * math.pi / omega2) / 1e4  # shorter period / 10^4
    switching = regime.MarkovSwitchSpec(0.1, internal_dt)
    spec = regime.RegimeOscillatorSpec(1.0, 0.3, omega1, omega2, switching)
    grid = make_grid(0.0, internal_dt, 25_000)
    ts, path = regime.simulate_regime_oscillator(spec, grid, _src(seed, 6))
    h = internal_dt
    checked = 0
    worst_pos = 0.0
    worst_vel = 0.0
    bounds = path.segment_bounds()
    for j in range(1, path.n_segments):
        tau = bounds[j]
        prev = path.params[j - 1]
        cur = path.params[j]
        # need two internal samples strictly inside each neighboring segment
        if tau - bounds[j - 1] < 2.0 * h - 1e-12 or bounds[j + 1] - tau < 2.0 * h - 1e-12:
            continue
        idx = int(round((tau - grid.t0) / h))
        if idx < 2 or idx > grid.n - 3:
            continue
        x_old = oscillator.evaluate(prev, tau - bounds[j - 1])
        x_new = oscillator.evaluate(cur, 0.0)
        scale = max(prev.amplitude, cur.amplitude)
        worst_pos = max(worst_pos, abs(x_old - x_new) / scale)
        v = ts.values
        v_left = (3.0 * v[idx] - 4.0 * v[idx - 1] + v[idx - 2]) / (2.0 * h)
        v_right = (-3.0 * v[idx] + 4.0 * v[idx + 1] - v[idx + 2]) / (2.0 * h)
        bound = 1e-4 * max(prev.amplitude * prev.omega, cur.amplitude * cur.omega)
        worst_vel = max(worst_vel, abs(v_left - v_right) / bound)
        checked += 1
        if checked >= 1000:
            break
    ok = checked >= 1000 and worst_pos <= 1e-12 and worst_vel < 1.0
    return ok, (f"{checked} switches: worst position mismatch {worst_pos:.2e} (rel), "
                f"worst velocity mismatch {worst_vel:.3f} of the 1e-4*A*omega budget")


# -- case 7 -----------------------------------------------------------------

def _random_leadlag(src: RandomSource, n: int) -> statarb.LeadLagModel:
    mu = gaussian_draws(src, n, 0.0, 5e-4)
    beta = 0.5 + src.uniforms(n)          # loadings in (0.5, 1.5)
    sigma_lambda = 0.5 + float(src.uniforms(1)[0])
    sigma_eps = 0.5 + float(src.uniforms(1)[0])
    return statarb.LeadLagModel(mu, beta, sigma_lambda=sigma_lambda,
                                sigma_eps=sigma_eps)


def _case_statarb_triangle(seed: int) -> tuple[bool, str]:
    worst_form = 0.0
    worst_z = 0.0
    T = 1_000_000
    for rep in range(10):
        src = _src(seed, 7, rep)
        model = _random_leadlag(src, 10)
        closed = statarb.expected_profit_leadlag(model)
        general = statarb.expected_profit_general(model.mu, statarb.leadlag_autocov(model, 1))
        worst_form = max(worst_form, abs(closed - general))
        panel = statarb.simulate_leadlag(model, T, src)
        result = statarb.backtest(panel, k=1)
        se = statarb.batch_means_se(result.profits, batch_len=1000)
        worst_z = max(worst_z, abs(float(result.profits.mean()) - closed) / se)
    ok = worst_form <= 1e-12 and worst_z <= 4.0
    return ok, (f"closed vs general form: max |diff| = {worst_form:.2e}; "
                f"Monte Carlo at T=1e6: max |z| = {worst_z:.2f} (limit 4)")


# -- case 8 -----------------------------------------------------------------

def _case_neutrality_leverage(seed: int) -> tuple[bool, str]:
    src = _src(seed, 8)
    model = _random_leadlag(src, 10)
    panel = statarb.simulate_leadlag(model, 2000, src)
    result = statarb.backtest(panel, k=1)
    sums = np.abs(result.weights.sum(axis=1))  # weights rows are periods
    scales = np.abs(result.weights).sum(axis=1)
    live = scales > 0.0
    worst = float(np.max(sums[live] / scales[live])) if live.any() else 0.0
    neutral = worst <= 1e-12 and float(np.max(sums[~live], initial=0.0)) == 0.0
    # $100MM long / $100MM short, $2MM profit: 2% unleveraged, 8% at 8:1
    weights = np.array([100.0, -100.0])
    returns = np.array([0.01, -0.01])
    r_unlev = statarb.unleveraged_return(weights, returns)
    r_lev = statarb.leveraged_return(r_unlev, 8.0)
    ratio = statarb.leverage_ratio(100.0, -100.0, 25.0)
    exact = (r_unlev == 0.02) and (r_lev == 0.08) and (ratio == 8.0)
    ok = neutral and exact
    return ok, (f"max |sum w| / sum |w| = {worst:.2e} over 1999 periods; "
                f"examples: {r_unlev:.0%} unleveraged, {r_lev:.0%} at 8:1, "
                f"leverage ratio {ratio:.0f} (all exact)")


# -- case 9 -----------------------------------------------------------------

def _case_rare_event_se(seed: int) -> tuple[bool, str]:
    se = risk.rare_event_se(0.02, 100)
    err = abs(se - 0.0140)
    ps = [0.001, 0.005, 0.01, 0.02, 0.05, 0.1]
    Ts = [100, 400, 1600, 6400]
    table = risk.se_table(ps, Ts)
    halving = bool(np.array_equal(table[:, :-1], 2.0 * table[:, 1:]))
    ok = err <= 5e-5 and halving
    return ok, (f"se(0.02, 100) = {se:.6f}, |err| = {err:.2e}; "
                f"quadrupling T halves every column exactly: {halving}")


# -- case 10 ----------------------------------------------------------------

def _case_tail_arithmetic(seed: int) -> tuple[bool, str]:
    tail = gaussian_upper_tail(7.0)
    multiple = risk.sigma_multiple(0.25, 0.0052, 3, 8.0)
    years = risk.recurrence_years(tail, 3)
    ok = (1.25e-12 <= tail <= 1.31e-12 and 6.8 <= multiple <= 7.1
          and 6.2e9 <= years <= 6.6e9)
    return ok, (f"upper tail at 7 sigma = {tail:.3e}, loss multiple = {multiple:.2f}, "
                f"recurrence = {years:.2e} years")


# -- case 11 ----------------------------------------------------------------

def _case_compound_quartet(seed: int) -> tuple[bool, str]:
    """Compound-return quartet. The Monte Carlo confirmation FAILS by design.

    The closed-form quartet reproduces the published numbers, and simulation
    confirms the mean and std. But the published negative-year probability is
    a Gaussian approximation; the true value is the binomial tail
    P(Binom(250, 0.55) <= 126) ~ 0.0812, about 34 simulation standard errors
    away at 1e5 years, so "simulation confirms all four" cannot hold.
    """
    spec = risk.BinaryStrategySpec(0.55, 0.02, -0.02, days_per_year=250)
    stats = risk.compound_return_stats(spec, m=2, n_years=10)
    formula_ok = (abs(stats.expected_annual_compound - 0.65) <= 0.01
                  and abs(stats.annual_std - 0.53) <= 0.01
                  and abs(stats.p_negative_year - 0.11) <= 0.005
                  and abs(stats.p_at_least_m_of_n - 0.30) <= 0.01)
    years = 100_000
    mc = risk.mc_compound_return(spec, years, _src(seed, 11))
    z_mean = (mc.mean - stats.expected_annual_compound) / (mc.std / math.sqrt(years))
    z_std = ((mc.std - stats.annual_std)
             / (stats.annual_std / math.sqrt(2.0 * (years - 1))))
    se_neg = math.sqrt(mc.frac_negative * (1.0 - mc.frac_negative) / years)
    z_neg = (mc.frac_negative - stats.p_negative_year) / se_neg
    decades = (mc.annual_returns.reshape(-1, 10) < 0.0).sum(axis=1)
    frac_decades = float(np.mean(decades >= 2))
    se_dec = math.sqrt(frac_decades * (1.0 - frac_decades) / len(decades))
    z_dec = (frac_decades - stats.p_at_least_m_of_n) / se_dec
    mc_ok = abs(z_mean) <= 3.0 and abs(z_std) <= 3.0 and abs(z_neg) <= 3.0 and abs(z_dec) <= 3.0
    ok = formula_ok and mc_ok
    return ok, (f"quartet = ({stats.expected_annual_compound:.4f}, {stats.annual_std:.4f}, "
                f"{stats.p_negative_year:.4f}, {stats.p_at_least_m_of_n:.4f}) "
                f"[printed values: ok]; MC z: mean {z_mean:+.2f}, std {z_std:+.2f}, "
                f"negative-year {z_neg:+.1f}, decades {z_dec:+.1f} (|z| <= 3 needed; "
                f"the last two measure the Gaussian-annual approximation error)")


# -- case 12 ----------------------------------------------------------------

def _case_identification_contrast(seed: int) -> tuple[bool, str]:
    params = identification.GENERIC_MARKET
    data = identification.simulate_market(params, 100_000, _src(seed, 12))
    demand = identification.two_stage_least_squares(data, "demand")
    z_tsls = abs(demand.price_coef - params.d1) / demand.se_price_coef
    ols = identification.ols_slope(data)
    z_ols = abs(ols.slope - params.d1) / ols.se
    errs_small = []
    errs_big = []
    for rep in range(50):
        src = _src(seed, 12, 1 + rep)
        d_small = identification.simulate_market(params, 25_000, split_stream(src, 1))
        d_big = identification.simulate_market(params, 100_000, split_stream(src, 2))
        errs_small.append(
            identification.two_stage_least_squares(d_small, "demand").price_coef - params.d1)
        errs_big.append(
            identification.two_stage_least_squares(d_big, "demand").price_coef - params.d1)
    rmse_small = float(np.sqrt(np.mean(np.square(errs_small))))
    rmse_big = float(np.sqrt(np.mean(np.square(errs_big))))
    ratio = rmse_small / rmse_big
    ok = z_tsls < 3.0 and z_ols > 10.0 and 1.7 <= ratio <= 2.3
    return ok, (f"2SLS d1 off by {z_tsls:.2f} SE (< 3), OLS off by {z_ols:.0f} SE (> 10); "
                f"RMSE(T=25k)/RMSE(T=100k) = {ratio:.2f} over 50 replications")


# -- case 13 ----------------------------------------------------------------

_GOLDEN_SEED = 424242
_GOLDEN_SHA256 = "cdfebfa479d71de96d4f6cedd48398ee4328b5dd29f47082976642b5bd6bf59e"


def golden_backtest() -> statarb.StrategyOutput:
    """The frozen desk-scale backtest behind the golden file (seed-independent)."""
    model = statarb.LeadLagModel(np.zeros(10), np.linspace(1.5, 0.5, 10))
    panel = statarb.simulate_leadlag(model, 250, RandomSource(_GOLDEN_SEED))
    return statarb.backtest(panel, k=1, theta=2.0)


def _case_desk_scale_substitutes(seed: int) -> tuple[bool, str]:
    result = golden_backtest()
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "backtest.csv")
        statarb.write_backtest_csv(path, result)
        with open(path, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        golden_ok = digest == _GOLDEN_SHA256
        back = statarb.read_backtest_csv(path)
        roundtrip_ok = (np.array_equal(back["profit"], result.profits)
                        and np.array_equal(back["return"], result.returns))
    src = _src(seed, 13)
    prices = statarb.simulate_deterministic_price(100.0, gaussian_draws(src, 1000, 0.1, 0.5))
    ts = TimeSeries(make_grid(0.0, 1.0, 1000), prices)
    rates = spectral.growth_rates(ts)
    rebuilt = prices[0] * np.cumprod(1.0 + rates.values)
    growth_ok = bool(np.max(np.abs(rebuilt - prices[1:]) / np.abs(prices[1:])) <= 1e-12)
    pgram = spectral.periodogram(ts)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "pgram.csv")
        spectral.write_periodogram_csv(path, pgram)
        freqs, mags = spectral.read_periodogram_csv(path)
        pgram_ok = (np.array_equal(freqs, pgram.frequencies)
                    and np.array_equal(mags, pgram.power))
    ok = golden_ok and roundtrip_ok and growth_ok and pgram_ok
    return ok, (f"golden backtest digest match: {golden_ok}; CSV round-trips exact: "
                f"{roundtrip_ok and pgram_ok}; growth-rate reconstruction <= 1e-12: "
                f"{growth_ok}")


_CASES = {
    "point-value": (1, _case_point_value),
    "interval": (2, _case_interval),
    "fft-oracle": (3, _case_fft_oracle),
    "fig3-recovery": (4, _case_fig3_recovery),
    "fig45-regimes": (5, _case_fig45_regimes),
    "continuity": (6, _case_continuity),
    "statarb-triangle": (7, _case_statarb_triangle),
    "neutrality-leverage": (8, _case_neutrality_leverage),
    "rare-event-se": (9, _case_rare_event_se),
    "tail-arithmetic": (10, _case_tail_arithmetic),
    "compound-quartet": (11, _case_compound_quartet),
    "identification-contrast": (12, _case_identification_contrast),
    "desk-scale-substitutes": (13, _case_desk_scale_substitutes),
}

CASE_ORDER = tuple(_CASES)


def run_case(name: str, seed: int = 0) -> CaseResult:
    if name not in _CASES:
        raise ValueError(f"unknown case {name!r}")
    criterion, fn = _CASES[name]
    passed, detail = fn(seed)
    return CaseResult(name, criterion, bool(passed), detail)


def write_report_csv(path, results: list[CaseResult]) -> None:
    """Pass/fail table: case,criterion,result,detail (commas in detail -> ';')."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("case,criterion,result,detail\n")
        for r in results:
            detail = r.detail.replace(",", ";")
            fh.write(f"{r.name},{r.criterion},{'PASS' if r.passed else 'FAIL'},{detail}\n")


def read_report_csv(path) -> list[CaseResult]:
    results: list[CaseResult] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "case,criterion,result,detail":
            raise ValueError(f"unexpected header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",", 3)
            if len(parts) != 4 or parts[2] not in ("PASS", "FAIL"):
                raise ValueError(f"line {lineno}: malformed report row")
            results.append(CaseResult(parts[0], int(parts[1]), parts[2] == "PASS", parts[3]))
    return results
