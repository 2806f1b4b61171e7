"""The acceptance gate: every headline criterion, one test each.

Each test delegates to the matching `stochlab reproduce` case so the CLI and
the suite can never drift apart, prints its one-line verdict, and asserts the
case passed. Two cases fail by design of the underlying model rather than by
any looseness in this code, and the assertions are kept honest instead of
being widened until they pass:

* criterion 5 (fig45-regimes): fast switching concentrates the spectrum at
  the root-mean-square frequency ~38 cycles/day, not the harmonic mean 32
  the check expects, and slow switching cannot reach 95/100 two-peak
  recovery because sojourn randomness starves one regime in ~30% of runs.
* criterion 11 (compound-quartet): the closed-form negative-year probability
  is a Gaussian-annual convention (0.1115); the true annual law is binomial
  (0.0812), ~34 Monte Carlo standard errors away at 1e5 years, so the
  simulation cannot confirm all four quartet entries.

The companion tests at the bottom pin what the model actually does in those
two regimes, so the genuine behavior is still regression-guarded.
"""

import math

import numpy as np
import scipy.stats

from stochlab import oscillator, regime, reproduce, risk, spectral
from stochlab.rng import split_stream


def _check(name: str) -> None:
    r = reproduce.run_case(name, seed=0)
    print(f"[{'PASS' if r.passed else 'FAIL'}] criterion {r.criterion} "
          f"({r.name}): {r.detail}")
    assert r.passed, f"criterion {r.criterion} ({r.name}): {r.detail}"


def test_criterion_01_point_value():
    _check("point-value")


def test_criterion_02_interval():
    _check("interval")


def test_criterion_03_fft_oracle():
    _check("fft-oracle")


def test_criterion_04_fig3_recovery():
    _check("fig3-recovery")


def test_criterion_05_fig45_regimes():
    # fails honestly; see the module docstring and the companion tests
    _check("fig45-regimes")


def test_criterion_06_continuity():
    _check("continuity")


def test_criterion_07_statarb_triangle():
    _check("statarb-triangle")


def test_criterion_08_neutrality_leverage():
    _check("neutrality-leverage")


def test_criterion_09_rare_event_se():
    _check("rare-event-se")


def test_criterion_10_tail_arithmetic():
    _check("tail-arithmetic")


def test_criterion_11_compound_quartet():
    # fails honestly; see the module docstring and the companion tests
    _check("compound-quartet")


def test_criterion_12_identification_contrast():
    _check("identification-contrast")


def test_criterion_13_desk_scale_substitutes():
    _check("desk-scale-substitutes")


# -- what the model actually does where criteria 5 and 11 are miscalibrated --


def test_fast_switching_concentrates_at_rms_frequency():
    # mirrors the fig45 fast arm: the dominant bin sits at the RMS frequency
    # sqrt((24^2 + 48^2)/2) ~ 37.9, within +-1 bin, in >= 90/100 runs
    grid = reproduce._fig3_grid()
    spec = reproduce._regime_spec(30.0 / 86400.0, grid.dt / 10.0)
    rms = math.sqrt((24.0 ** 2 + 48.0 ** 2) / 2.0)
    hits = 0
    for i in range(100):
        ts, _ = regime.simulate_regime_oscillator(spec, grid,
                                                  reproduce._src(0, 5, 100 + i))
        peak = spectral.dominant_frequencies(spectral.periodogram(ts), 1)
        hits += abs(float(peak.frequencies[0]) - rms) <= 1.5
    assert hits >= 90


def test_slow_switching_two_peak_recovery_rate():
    # mirrors the fig45 slow arm at the same substreams: two-peak recovery
    # tops out near 70/100, far under the 95 the criterion wants, but well
    # above chance; the frozen floor guards against regressions
    grid = reproduce._fig3_grid()
    spec = reproduce._regime_spec(4.0 / 24.0, grid.dt)
    hits = 0
    for i in range(100):
        ts, _ = regime.simulate_regime_oscillator(spec, grid,
                                                  reproduce._src(0, 5, i))
        peaks = spectral.separated_peaks(spectral.periodogram(ts), 2,
                                         min_separation=12.0)
        lo, hi = sorted(peaks.frequencies)
        hits += abs(lo - 24.0) <= 1.0 and abs(hi - 48.0) <= 1.0
    assert 60 <= hits < 95


def test_negative_year_probability_is_binomial_not_gaussian():
    # the quartet's formula value is the Gaussian convention; the simulated
    # frequency matches the exact binomial tail and sits ~30+ SEs below it
    spec = risk.BinaryStrategySpec(0.55, 0.02, -0.02, days_per_year=250)
    stats = risk.compound_return_stats(spec)
    exact = float(scipy.stats.binom.cdf(126, 250, 0.55))
    mc = risk.mc_compound_return(spec, 100_000, reproduce._src(0, 11))
    se = math.sqrt(exact * (1.0 - exact) / 100_000)
    assert abs(mc.frac_negative - exact) < 3 * se
    assert (stats.p_negative_year - exact) / se > 10.0
