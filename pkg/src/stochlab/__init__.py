"""Seeded simulation and analysis toolkit.

Simulators for noisy and regime-switching harmonic oscillators, spectral
recovery tools, a contrarian long-short backtest engine with closed-form
profit expectations, rare-event and compound-return analytics, and a
supply-demand identification demonstrator, all on one deterministic
counter-based random stream. The `stochlab` CLI front-end lives in
stochlab.cli; end-to-end reproduction recipes live in stochlab.reproduce.
"""

from . import (
    cli,
    config,
    identification,
    kernels,
    normal,
    oscillator,
    regime,
    reproduce,
    risk,
    rng,
    series,
    spectral,
    statarb,
)
from .kernels import available_backends, backend
from .normal import gaussian_upper_tail, norm_ppf
from .oscillator import OscillatorParams, evaluate, prediction_interval
from .regime import MarkovSwitchSpec, RegimeOscillatorSpec, simulate_regime_oscillator
from .reproduce import CASE_ORDER, run_case
from .rng import RandomSource, gaussian_draws, split_stream, uniform_draws
from .series import SampleGrid, TimeSeries, make_grid, read_series_csv, write_series_csv
from .spectral import dft_reference, dominant_frequencies, fft, periodogram
from .statarb import LeadLagModel, ReturnPanel, backtest, expected_profit_leadlag
from .risk import BinaryStrategySpec, compound_return_stats, mc_compound_return, rare_event_se
from .identification import MarketParams, simulate_market, two_stage_least_squares

__version__ = "0.1.0"

__all__ = [
    "cli", "config", "identification", "kernels", "normal", "oscillator",
    "regime", "reproduce", "risk", "rng", "series", "spectral", "statarb",
    "available_backends", "backend",
    "gaussian_upper_tail", "norm_ppf",
    "OscillatorParams", "evaluate", "prediction_interval",
    "MarkovSwitchSpec", "RegimeOscillatorSpec", "simulate_regime_oscillator",
    "CASE_ORDER", "run_case",
    "RandomSource", "gaussian_draws", "split_stream", "uniform_draws",
    "SampleGrid", "TimeSeries", "make_grid", "read_series_csv", "write_series_csv",
    "dft_reference", "dominant_frequencies", "fft", "periodogram",
    "LeadLagModel", "ReturnPanel", "backtest", "expected_profit_leadlag",
    "BinaryStrategySpec", "compound_return_stats", "mc_compound_return", "rare_event_se",
    "MarketParams", "simulate_market", "two_stage_least_squares",
    "__version__",
]
