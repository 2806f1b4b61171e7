"""Throughput comparison of the compiled and pure-python draw kernels.

Run from the repo root after an editable install:

    python3 benchmarks/bench_kernels.py

Two workloads: bulk normal draws (the hot path for every simulator) and an
end-to-end Monte Carlo of compound annual returns, which mixes draws with
numpy reductions and shows the realistic speedup rather than the kernel-only
one. Both backends produce bit-identical streams, so the benchmark also
asserts equality on a sample before timing.
"""

import time

import numpy as np

from stochlab import kernels, risk
from stochlab.rng import RandomSource


def _time(fn, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_normals(n: int = 2_000_000) -> None:
    kernels.use_backend("python")
    ref = RandomSource(1234).normals(4096)
    results = {}
    for name in kernels.available_backends():
        kernels.use_backend(name)
        assert np.array_equal(RandomSource(1234).normals(4096), ref)
        results[name] = _time(lambda: RandomSource(1234).normals(n))
    _report(f"normals x {n:,}", results, n)


def bench_mc_compound(n_years: int = 20_000) -> None:
    spec = risk.BinaryStrategySpec(0.55, 0.02, -0.02, days_per_year=250)
    results = {}
    for name in kernels.available_backends():
        kernels.use_backend(name)
        results[name] = _time(
            lambda: risk.mc_compound_return(spec, n_years, RandomSource(7)), repeats=3
        )
    _report(f"mc_compound_return x {n_years:,} years", results, n_years * 250)


def _report(label: str, results: dict, n_draws: int) -> None:
    print(f"\n{label}")
    for name, secs in results.items():
        rate = n_draws / secs / 1e6
        print(f"  {name:<9} {secs * 1e3:8.1f} ms   {rate:7.1f} M draws/s")
    if "compiled" in results and "python" in results:
        print(f"  speedup   {results['python'] / results['compiled']:.1f}x")


if __name__ == "__main__":
    print(f"available backends: {kernels.available_backends()}")
    bench_normals()
    bench_mc_compound()
    kernels.use_backend(kernels.available_backends()[0])
