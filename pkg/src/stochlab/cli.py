"""Command-line front door.

Subcommands: oscillate, regime, spectrum, statarb, risk (se-table | tail |
compound), identify, reproduce. Every run is deterministic given --seed, and
every emitted CSV parses back through the matching reader in this package.

Exit codes: 0 success, 1 validation error (bad flags, bad config, module
precondition violations), 2 runtime error (I/O failures, unexpected faults,
and `reproduce` runs with failing cases).

Precedence for parameters: built-in defaults, then the --config file, then
explicit command-line flags. Config files use the `key = value` grammar of
stochlab.config; keys are the flag names with dashes replaced by underscores.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import identification, oscillator, regime, reproduce, risk, spectral, statarb
from .config import ConfigError, load_config
from .normal import gaussian_upper_tail
from .rng import RandomSource
from .series import make_grid, read_series_csv, write_series_csv


@dataclass(frozen=True)
class _Param:
    name: str
    vtype: type
    default: object
    help: str
    flag: str | None = None  # defaults to --<name-with-dashes>
    negflag: bool = False    # boolean exposed as --no-<name>

    @property
    def cli_flag(self) -> str:
        if self.flag is not None:
            return self.flag
        if self.negflag:
            return "--no-" + self.name.replace("_", "-")
        return "--" + self.name.replace("_", "-")


_SCHEMAS: dict[str, list[_Param]] = {
    "oscillate": [
        _Param("A", float, 1.0, "amplitude"),
        _Param("omega", float, None, "angular frequency (rad per time unit)"),
        _Param("k", float, None, "spring constant (alternative to --omega)"),
        _Param("m", float, None, "mass (alternative to --omega)"),
        _Param("phi", float, 0.0, "phase at t=0 (rad)"),
        _Param("sigma", float, 0.0, "additive Gaussian noise std"),
        _Param("snr", float, None, "signal-to-noise ratio A^2/(2 sigma^2); overrides --sigma"),
        _Param("t0", float, 0.0, "grid start time"),
        _Param("dt", float, 1.0, "grid spacing"),
        _Param("n", int, 100, "number of samples"),
        _Param("seed", int, 0, "random seed"),
        _Param("out", str, None, "output series CSV path"),
    ],
    "regime": [
        _Param("A", float, 1.0, "initial amplitude"),
        _Param("phi", float, 0.0, "initial phase (rad)"),
        _Param("omega1", float, None, "regime-1 angular frequency"),
        _Param("omega2", float, None, "regime-2 angular frequency"),
        _Param("period1", float, None, "regime-1 period (alternative to --omega1)"),
        _Param("period2", float, None, "regime-2 period (alternative to --omega2)"),
        _Param("half_life", float, None, "regime sojourn half-life (time units)"),
        _Param("internal_dt", float, None, "switching grid step; defaults to --dt"),
        _Param("sigma", float, 0.0, "additive Gaussian noise std"),
        _Param("snr", float, None, "signal-to-noise ratio; overrides --sigma"),
        _Param("t0", float, 0.0, "grid start time"),
        _Param("dt", float, 1.0, "grid spacing"),
        _Param("n", int, 100, "number of samples"),
        _Param("seed", int, 0, "random seed"),
        _Param("out", str, None, "output series CSV path"),
        _Param("segments_out", str, None,
               "segments CSV path (default: <out> with a .segments.csv suffix)"),
    ],
    "spectrum": [
        _Param("in_path", str, None, "input series CSV", flag="--in"),
        _Param("out", str, None, "output periodogram CSV path"),
        _Param("peaks_out", str, None, "optional top-k peaks CSV path"),
        _Param("k", int, 5, "number of peaks to report"),
        _Param("min_separation", float, 0.0, "minimum frequency gap between reported peaks"),
        _Param("demean", bool, True, "keep the sample mean instead of removing it",
               negflag=True),
    ],
    "statarb": [
        _Param("panel", str, None, "returns panel CSV (mutually exclusive with model flags)"),
        _Param("n_assets", int, 10, "synthetic panel size"),
        _Param("T", int, 1000, "synthetic panel length (periods)"),
        _Param("mu", str, "0.0", "mean returns: one value or comma list of n-assets values"),
        _Param("beta", str, "1.0", "factor loadings: one value or comma list"),
        _Param("sigma_lambda", float, 1.0, "common factor std"),
        _Param("sigma_eps", float, 1.0, "idiosyncratic noise std"),
        _Param("k", int, 1, "signal lag (periods)"),
        _Param("theta", float, 2.0, "leverage parameter, >= 2"),
        _Param("seed", int, 0, "random seed"),
        _Param("out", str, None, "per-period backtest CSV path"),
        _Param("summary_out", str, None, "optional summary stats CSV path"),
    ],
    "risk se-table": [
        _Param("ps", str, "0.001,0.005,0.01,0.02,0.05,0.1", "comma list of event probabilities"),
        _Param("Ts", str, "100,250,1000,2500,10000", "comma list of sample sizes"),
        _Param("out", str, None, "output CSV path"),
    ],
    "risk tail": [
        _Param("loss", float, 0.25, "loss fraction of capital"),
        _Param("daily_std", float, 0.0052, "daily return std"),
        _Param("days", int, 3, "loss window length (trading days)"),
        _Param("theta", float, 8.0, "leverage parameter"),
        _Param("window_days", int, 3, "recurrence window (trading days)"),
        _Param("calendar_days", int, 365, "calendar days per year for recurrence"),
        _Param("out", str, None, "output CSV path"),
    ],
    "risk compound": [
        _Param("p_win", float, 0.55, "daily win probability"),
        _Param("r_win", float, 0.02, "win-day return"),
        _Param("r_loss", float, -0.02, "loss-day return"),
        _Param("days", int, 250, "trading days per year"),
        _Param("m", int, 2, "threshold count of negative years"),
        _Param("n_years", int, 10, "horizon for the >= m negative years probability"),
        _Param("mc_years", int, 0, "if > 0, append a Monte Carlo check over this many years"),
        _Param("seed", int, 0, "random seed for the Monte Carlo check"),
        _Param("out", str, None, "output CSV path"),
    ],
    "identify": [
        _Param("d0", float, 10.0, "demand intercept"),
        _Param("d1", float, -1.0, "demand price slope (< 0)"),
        _Param("d2", float, 0.5, "demand income slope"),
        _Param("s0", float, 2.0, "supply intercept"),
        _Param("s1", float, 1.0, "supply price slope (> 0)"),
        _Param("s2", float, 0.5, "supply cost slope"),
        _Param("sigma_d", float, 1.0, "demand shock std"),
        _Param("sigma_s", float, 1.0, "supply shock std"),
        _Param("y_mean", float, 0.0, "income mean"),
        _Param("y_std", float, 1.0, "income std"),
        _Param("c_mean", float, 0.0, "cost mean"),
        _Param("c_std", float, 1.0, "cost std"),
        _Param("T", int, 10000, "sample size"),
        _Param("seed", int, 0, "random seed"),
        _Param("data_out", str, None, "optional equilibrium data CSV path"),
        _Param("estimates_out", str, None, "estimates table CSV path"),
    ],
    "reproduce": [
        _Param("case", str, "all", "case name or 'all' (see --list)"),
        _Param("list", bool, False, "list case names and exit", flag="--list"),
        _Param("out", str, None, "report directory (report.csv is written here)"),
        _Param("seed", int, 0, "base seed for every stochastic case"),
    ],
}


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit 1, per the CLI contract."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _add_params(parser: argparse.ArgumentParser, leaf: str) -> None:
    for p in _SCHEMAS[leaf]:
        if p.vtype is bool:
            if p.negflag:
                parser.add_argument(p.cli_flag, dest=p.name, action="store_false",
                                    default=argparse.SUPPRESS, help=p.help)
            else:
                parser.add_argument(p.cli_flag, dest=p.name, action="store_true",
                                    default=argparse.SUPPRESS, help=p.help)
        else:
            parser.add_argument(p.cli_flag, dest=p.name, type=p.vtype,
                                default=argparse.SUPPRESS, metavar=p.name.upper(),
                                help=p.help)
    parser.add_argument("--config", default=None, metavar="FILE",
                        help="key = value config file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stochlab",
                     description="Simulation and analysis experiments, CSV in and out.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for leaf in ("oscillate", "regime", "spectrum", "statarb", "identify", "reproduce"):
        p = sub.add_parser(leaf, help=f"{leaf} experiment")
        _add_params(p, leaf)
        p.set_defaults(leaf=leaf)
    riskp = sub.add_parser("risk", help="rare-event and compounding analytics")
    actions = riskp.add_subparsers(dest="action", required=True, metavar="ACTION")
    for action in ("se-table", "tail", "compound"):
        ap = actions.add_parser(action)
        leaf = f"risk {action}"
        _add_params(ap, leaf)
        ap.set_defaults(leaf=leaf)
    return parser


def _coerce(param: _Param, value, origin: str):
    if param.vtype is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if param.vtype is int:
        if isinstance(value, bool):
            raise ConfigError(f"{origin}: {param.name} expects an integer")
        if isinstance(value, int):
            return value
        if isinstance(value, float) and value == int(value):
            return int(value)
        raise ConfigError(f"{origin}: {param.name} expects an integer")
    if param.vtype is bool:
        if isinstance(value, bool):
            return value
        raise ConfigError(f"{origin}: {param.name} expects true or false")
    if param.vtype is str:
        return str(value)
    if value is None or isinstance(value, param.vtype):
        return value
    raise ConfigError(f"{origin}: {param.name} has the wrong type")


def _merge_params(leaf: str, args: argparse.Namespace) -> tuple[dict, set]:
    """defaults <- config file <- explicit flags; returns (params, explicit keys)."""
    schema = {p.name: p for p in _SCHEMAS[leaf]}
    params = {p.name: p.default for p in schema.values()}
    explicit: set[str] = set()
    if args.config is not None:
        cfg = load_config(args.config)
        if cfg.command is not None and cfg.command != leaf:
            raise ConfigError(
                f"config is for command {cfg.command!r}, not {leaf!r}")
        for key, value in cfg.params.items():
            if key not in schema:
                raise ConfigError(f"unknown key {key!r} for command {leaf!r}")
            params[key] = _coerce(schema[key], value, args.config)
            explicit.add(key)
    for key, value in vars(args).items():
        if key in schema:
            params[key] = value
            explicit.add(key)
    return params, explicit


def _require(params: dict, name: str, flag: str):
    if params[name] is None:
        raise ValueError(f"{flag} is required")
    return params[name]


def _float_list(text: str, name: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise ValueError(f"--{name} must be a comma-separated list of numbers") from None
    if not values:
        raise ValueError(f"--{name} must be a comma-separated list of numbers")
    return values


def _broadcast(values: list[float], n: int, name: str) -> np.ndarray:
    if len(values) == 1:
        return np.full(n, values[0])
    if len(values) != n:
        raise ValueError(f"--{name} needs 1 or {n} values, got {len(values)}")
    return np.array(values)


def write_kv_csv(path, rows: list[tuple[str, float]]) -> None:
    """Two-column summary table: quantity,value."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("quantity,value\n")
        for name, value in rows:
            fh.write(f"{name},{float(value)!r}\n")


def read_kv_csv(path) -> dict[str, float]:
    out: dict[str, float] = {}
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != "quantity,value":
            raise ValueError(f"unexpected header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            name, _, value = line.partition(",")
            if not _:
                raise ValueError(f"line {lineno}: expected 2 fields")
            out[name] = float(value)
    return out


def _resolve_omega(params: dict, explicit: set) -> float:
    if params["omega"] is not None and (params["k"] is not None or params["m"] is not None):
        raise ValueError("--omega and --k/--m are mutually exclusive")
    if params["omega"] is not None:
        return params["omega"]
    if params["k"] is not None and params["m"] is not None:
        return oscillator.omega_from_spring(oscillator.SpringSpec(params["k"], params["m"]))
    raise ValueError("either --omega or both --k and --m are required")


def _resolve_sigma(params: dict, explicit: set, amplitude: float) -> float:
    if params["snr"] is not None:
        if "sigma" in explicit:
            raise ValueError("--sigma and --snr are mutually exclusive")
        return oscillator.sigma_for_snr(amplitude, params["snr"])
    return params["sigma"]


def _cmd_oscillate(params: dict, explicit: set) -> int:
    omega = _resolve_omega(params, explicit)
    sigma = _resolve_sigma(params, explicit, params["A"])
    out = _require(params, "out", "--out")
    osc = oscillator.OscillatorParams(params["A"], omega, params["phi"])
    grid = make_grid(params["t0"], params["dt"], params["n"])
    if sigma > 0.0:
        ts = oscillator.simulate_noisy(osc, grid, sigma, RandomSource(params["seed"]))
    else:
        ts = oscillator.simulate_deterministic(osc, grid)
    write_series_csv(out, ts)
    return 0


def _regime_omega(params: dict, which: int) -> float:
    omega = params[f"omega{which}"]
    period = params[f"period{which}"]
    if omega is not None and period is not None:
        raise ValueError(f"--omega{which} and --period{which} are mutually exclusive")
    if omega is not None:
        return omega
    if period is not None:
        if period <= 0.0:
            raise ValueError(f"--period{which} must be positive")
        return 2.0 * math.pi / period
    raise ValueError(f"either --omega{which} or --period{which} is required")


def _cmd_regime(params: dict, explicit: set) -> int:
    w1 = _regime_omega(params, 1)
    w2 = _regime_omega(params, 2)
    half_life = _require(params, "half_life", "--half-life")
    sigma = _resolve_sigma(params, explicit, params["A"])
    out = _require(params, "out", "--out")
    segments_out = params["segments_out"]
    if segments_out is None:
        root, ext = os.path.splitext(out)
        segments_out = f"{root}.segments{ext or '.csv'}"
    internal_dt = params["internal_dt"] if params["internal_dt"] is not None else params["dt"]
    switching = regime.MarkovSwitchSpec(
        regime.half_life_to_p(half_life, internal_dt), internal_dt)
    spec = regime.RegimeOscillatorSpec(params["A"], params["phi"], w1, w2,
                                       switching, sigma=sigma)
    grid = make_grid(params["t0"], params["dt"], params["n"])
    ts, path = regime.simulate_regime_oscillator(spec, grid, RandomSource(params["seed"]))
    write_series_csv(out, ts)
    regime.write_segments_csv(segments_out, path)
    return 0


def _cmd_spectrum(params: dict, explicit: set) -> int:
    in_path = _require(params, "in_path", "--in")
    out = _require(params, "out", "--out")
    ts = read_series_csv(in_path)
    pgram = spectral.periodogram(ts, demean=params["demean"])
    spectral.write_periodogram_csv(out, pgram)
    if params["peaks_out"] is not None:
        peaks = spectral.separated_peaks(pgram, params["k"], params["min_separation"])
        spectral.write_peaks_csv(params["peaks_out"], peaks)
    return 0


_STATARB_MODEL_KEYS = ("n_assets", "T", "mu", "beta", "sigma_lambda", "sigma_eps")


def _cmd_statarb(params: dict, explicit: set) -> int:
    out = _require(params, "out", "--out")
    closed_form = None
    if params["panel"] is not None:
        clash = sorted(set(_STATARB_MODEL_KEYS) & explicit)
        if clash:
            raise ValueError(
                "--panel and synthetic-model flags are mutually exclusive "
                f"(got {', '.join(clash)})")
        panel = statarb.read_panel_csv(params["panel"])
    else:
        n = params["n_assets"]
        model = statarb.LeadLagModel(
            _broadcast(_float_list(params["mu"], "mu"), n, "mu"),
            _broadcast(_float_list(params["beta"], "beta"), n, "beta"),
            sigma_lambda=params["sigma_lambda"],
            sigma_eps=params["sigma_eps"],
        )
        panel = statarb.simulate_leadlag(model, params["T"], RandomSource(params["seed"]))
        if params["k"] == 1:
            closed_form = statarb.expected_profit_leadlag(model)
    result = statarb.backtest(panel, k=params["k"], theta=params["theta"])
    statarb.write_backtest_csv(out, result)
    if params["summary_out"] is not None:
        stats = statarb.perf_stats(result.leveraged)
        rows = [
            ("periods", float(len(result.periods))),
            ("degenerate_periods", float(int(result.degenerate.sum()))),
            ("mean_leveraged", stats.mean),
            ("std_leveraged", stats.std),
            ("sharpe", stats.sharpe),
            ("mean_profit", float(result.profits.mean())),
        ]
        if closed_form is not None:
            rows.append(("expected_profit_closed_form", closed_form))
        write_kv_csv(params["summary_out"], rows)
    return 0


def _cmd_risk_se_table(params: dict, explicit: set) -> int:
    out = _require(params, "out", "--out")
    ps = _float_list(params["ps"], "ps")
    Ts = [int(t) for t in _float_list(params["Ts"], "Ts")]
    risk.write_se_table_csv(out, ps, Ts)
    return 0


def _cmd_risk_tail(params: dict, explicit: set) -> int:
    out = _require(params, "out", "--out")
    multiple = risk.sigma_multiple(params["loss"], params["daily_std"],
                                   params["days"], params["theta"])
    tail = gaussian_upper_tail(multiple)
    years = risk.recurrence_years(tail, params["window_days"], params["calendar_days"])
    write_kv_csv(out, [
        ("sigma_multiple", multiple),
        ("tail_probability", tail),
        ("recurrence_years", years),
    ])
    return 0


def _cmd_risk_compound(params: dict, explicit: set) -> int:
    out = _require(params, "out", "--out")
    spec = risk.BinaryStrategySpec(params["p_win"], params["r_win"], params["r_loss"],
                                   days_per_year=params["days"])
    stats = risk.compound_return_stats(spec, m=params["m"], n_years=params["n_years"])
    rows = [
        ("expected_annual_compound", stats.expected_annual_compound),
        ("annual_std", stats.annual_std),
        ("p_negative_year", stats.p_negative_year),
        ("p_at_least_m_of_n", stats.p_at_least_m_of_n),
    ]
    if params["mc_years"] > 0:
        mc = risk.mc_compound_return(spec, params["mc_years"], RandomSource(params["seed"]))
        rows += [
            ("mc_mean", mc.mean),
            ("mc_std", mc.std),
            ("mc_frac_negative", mc.frac_negative),
        ]
    write_kv_csv(out, rows)
    return 0


def _cmd_identify(params: dict, explicit: set) -> int:
    estimates_out = _require(params, "estimates_out", "--estimates-out")
    market = identification.MarketParams(
        d0=params["d0"], d1=params["d1"], d2=params["d2"],
        s0=params["s0"], s1=params["s1"], s2=params["s2"],
        sigma_d=params["sigma_d"], sigma_s=params["sigma_s"],
        y_mean=params["y_mean"], y_std=params["y_std"],
        c_mean=params["c_mean"], c_std=params["c_std"],
    )
    data = identification.simulate_market(market, params["T"], RandomSource(params["seed"]))
    if params["data_out"] is not None:
        identification.write_market_csv(params["data_out"], data)
    ols = identification.ols_slope(data)
    demand = identification.two_stage_least_squares(data, "demand")
    supply = identification.two_stage_least_squares(data, "supply")
    identification.write_estimates_csv(estimates_out, market, ols, demand, supply)
    return 0


def _cmd_reproduce(params: dict, explicit: set) -> int:
    if params["list"]:
        for name in reproduce.CASE_ORDER:
            print(name)
        return 0
    out_dir = _require(params, "out", "--out")
    if params["case"] == "all":
        names = list(reproduce.CASE_ORDER)
    elif params["case"] in reproduce.CASE_ORDER:
        names = [params["case"]]
    else:
        known = ", ".join(reproduce.CASE_ORDER)
        raise ValueError(f"unknown case {params['case']!r}; choose all or one of: {known}")
    os.makedirs(out_dir, exist_ok=True)
    results = []
    for name in names:
        result = reproduce.run_case(name, seed=params["seed"])
        results.append(result)
        print(f"[{'PASS' if result.passed else 'FAIL'}] {result.name}: {result.detail}")
    reproduce.write_report_csv(os.path.join(out_dir, "report.csv"), results)
    failed = sum(1 for r in results if not r.passed)
    print(f"{len(results) - failed}/{len(results)} cases passed"
          + (f", {failed} failed" if failed else ""))
    return 0 if failed == 0 else 2


_HANDLERS = {
    "oscillate": _cmd_oscillate,
    "regime": _cmd_regime,
    "spectrum": _cmd_spectrum,
    "statarb": _cmd_statarb,
    "risk se-table": _cmd_risk_se_table,
    "risk tail": _cmd_risk_tail,
    "risk compound": _cmd_risk_compound,
    "identify": _cmd_identify,
    "reproduce": _cmd_reproduce,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        params, explicit = _merge_params(args.leaf, args)
        return _HANDLERS[args.leaf](params, explicit)
    except (ConfigError, ValueError) as exc:
        sys.stderr.write(f"stochlab: error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"stochlab: i/o error: {exc}\n")
        return 2
    except Exception as exc:  # pragma: no cover - last-resort runtime contract
        sys.stderr.write(f"stochlab: runtime error: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
