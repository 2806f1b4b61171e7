"""Vectorized numpy implementation of the bulk draw kernels.

This is the fallback backend behind stochlab.kernels; stochlab/_kernels.pyx is
the compiled twin. The two must stay bit-identical: every floating-point
expression here is mirrored in the .pyx file with the same operation order
(no FMA on the compiled side, plain IEEE-754 double ops on both), and the
only transcendental in the draw path is an owned log so no libm variation
can leak in. test_kernels.py asserts exact equality when both are importable.

Draw pipeline, counter-based so any sub-range can be generated independently:

    bits(i)    = mix64(key + (i + 1) * GAMMA)          SplitMix64 stream
    uniform(i) = ((bits(i) >> 11) + 0.5) * 2**-53      strictly inside (0, 1)
    normal(i)  = ppf(uniform(i))                       Acklam inverse CDF
"""

import numpy as np

BACKEND = "python"

GAMMA = 0x9E3779B97F4A7C15
_MIX_M1 = 0xBF58476D1CE4E5B9
_MIX_M2 = 0x94D049BB133111EB
_MASK64 = 0xFFFFFFFFFFFFFFFF

_TWO_NEG53 = 1.0 / 9007199254740992.0  # 2**-53, exact

# Acklam's rational approximation to the standard normal inverse CDF.
# Relative error < 1.15e-9 over (0, 1); the analysis-grade refined quantile
# lives in stochlab.normal, this one is the frozen draw transform.
_P_LOW = 0.02425
_P_HIGH = 1.0 - _P_LOW
_A1 = -3.969683028665376e+01
_A2 = 2.209460984245205e+02
_A3 = -2.759285104469687e+02
_A4 = 1.383577518672690e+02
_A5 = -3.066479806614716e+01
_A6 = 2.506628277459239e+00
_B1 = -5.447609879822406e+01
_B2 = 1.615858368580409e+02
_B3 = -1.556989798598866e+02
_B4 = 6.680131188771972e+01
_B5 = -1.328068155288572e+01
_C1 = -7.784894002430293e-03
_C2 = -3.223964580411365e-01
_C3 = -2.400758277161838e+00
_C4 = -2.549732539343734e+00
_C5 = 4.374664141464968e+00
_C6 = 2.938163982698783e+00
_D1 = 7.784695709041462e-03
_D2 = 3.224671290700398e-01
_D3 = 2.445134137142996e+00
_D4 = 3.754408661907416e+00

# Owned natural log (draw path only): frexp split plus atanh series on the
# mantissa, fdlibm-style hi/lo ln2 so e*ln2_hi is exact for |e| < 2**11.
_SQRT_HALF = 0.7071067811865476
_LN2_HI = 6.93147180369123816490e-01
_LN2_LO = 1.90821492927058770002e-10
_LOG_C3 = 1.0 / 3.0
_LOG_C5 = 1.0 / 5.0
_LOG_C7 = 1.0 / 7.0
_LOG_C9 = 1.0 / 9.0
_LOG_C11 = 1.0 / 11.0
_LOG_C13 = 1.0 / 13.0
_LOG_C15 = 1.0 / 15.0
_LOG_C17 = 1.0 / 17.0


def bits(key, start, n):
    """Raw SplitMix64 outputs for counter positions start..start+n-1."""
    idx = np.arange(1, n + 1, dtype=np.uint64)
    idx += np.uint64(start & _MASK64)
    z = np.uint64(key & _MASK64) + idx * np.uint64(GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_M2)
    return z ^ (z >> np.uint64(31))


def uniforms(key, start, n):
    b = bits(key, start, n)
    return ((b >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_NEG53


def _log(x):
    m, e = np.frexp(x)
    small = m < _SQRT_HALF
    m = np.where(small, m + m, m)
    ef = e.astype(np.float64) - small.astype(np.float64)
    s = (m - 1.0) / (m + 1.0)
    t = s * s
    poly = _LOG_C17
    poly = poly * t + _LOG_C15
    poly = poly * t + _LOG_C13
    poly = poly * t + _LOG_C11
    poly = poly * t + _LOG_C9
    poly = poly * t + _LOG_C7
    poly = poly * t + _LOG_C5
    poly = poly * t + _LOG_C3
    lnm = (2.0 * s) * (1.0 + t * poly)
    return ef * _LN2_HI + (ef * _LN2_LO + lnm)


def _ppf_central(q):
    r = q * q
    num = ((((_A1 * r + _A2) * r + _A3) * r + _A4) * r + _A5) * r + _A6
    den = ((((_B1 * r + _B2) * r + _B3) * r + _B4) * r + _B5) * r + 1.0
    return (num * q) / den


def _ppf_tail(q):
    num = ((((_C1 * q + _C2) * q + _C3) * q + _C4) * q + _C5) * q + _C6
    den = (((_D1 * q + _D2) * q + _D3) * q + _D4) * q + 1.0
    return num / den


def normals(key, start, n):
    p = uniforms(key, start, n)
    out = np.empty(n, dtype=np.float64)

    lo = p < _P_LOW
    hi = p > _P_HIGH
    mid = ~(lo | hi)

    out[mid] = _ppf_central(p[mid] - 0.5)
    if lo.any():
        q = np.sqrt(-2.0 * _log(p[lo]))
        out[lo] = _ppf_tail(q)
    if hi.any():
        q = np.sqrt(-2.0 * _log(1.0 - p[hi]))
        out[hi] = -_ppf_tail(q)
    return out
