# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of stochlab._kernels_py.

Every floating-point expression mirrors the numpy fallback with the same
operation order; the build disables FMA contraction so both backends produce
bit-identical streams. Keep the two files in sync (test_kernels.py enforces
exact equality).
"""

import numpy as np

from libc.math cimport frexp, sqrt
from libc.stdint cimport uint64_t

BACKEND = "compiled"

cdef uint64_t _GAMMA = 0x9E3779B97F4A7C15U
cdef uint64_t _MIX_M1 = 0xBF58476D1CE4E5B9U
cdef uint64_t _MIX_M2 = 0x94D049BB133111EBU

cdef double _TWO_NEG53 = 1.0 / 9007199254740992.0

cdef double _P_LOW = 0.02425
cdef double _P_HIGH = 1.0 - 0.02425
cdef double _A1 = -3.969683028665376e+01
cdef double _A2 = 2.209460984245205e+02
cdef double _A3 = -2.759285104469687e+02
cdef double _A4 = 1.383577518672690e+02
cdef double _A5 = -3.066479806614716e+01
cdef double _A6 = 2.506628277459239e+00
cdef double _B1 = -5.447609879822406e+01
cdef double _B2 = 1.615858368580409e+02
cdef double _B3 = -1.556989798598866e+02
cdef double _B4 = 6.680131188771972e+01
cdef double _B5 = -1.328068155288572e+01
cdef double _C1 = -7.784894002430293e-03
cdef double _C2 = -3.223964580411365e-01
cdef double _C3 = -2.400758277161838e+00
cdef double _C4 = -2.549732539343734e+00
cdef double _C5 = 4.374664141464968e+00
cdef double _C6 = 2.938163982698783e+00
cdef double _D1 = 7.784695709041462e-03
cdef double _D2 = 3.224671290700398e-01
cdef double _D3 = 2.445134137142996e+00
cdef double _D4 = 3.754408661907416e+00

cdef double _SQRT_HALF = 0.7071067811865476
cdef double _LN2_HI = 6.93147180369123816490e-01
cdef double _LN2_LO = 1.90821492927058770002e-10
cdef double _LOG_C3 = 1.0 / 3.0
cdef double _LOG_C5 = 1.0 / 5.0
cdef double _LOG_C7 = 1.0 / 7.0
cdef double _LOG_C9 = 1.0 / 9.0
cdef double _LOG_C11 = 1.0 / 11.0
cdef double _LOG_C13 = 1.0 / 13.0
cdef double _LOG_C15 = 1.0 / 15.0
cdef double _LOG_C17 = 1.0 / 17.0


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * _MIX_M1
    z = (z ^ (z >> 27)) * _MIX_M2
    return z ^ (z >> 31)


cdef inline double _to_unit(uint64_t b) nogil:
    return (<double> (b >> 11) + 0.5) * _TWO_NEG53


cdef double _log(double x) nogil:
    cdef int e
    cdef double m, s, t, poly, lnm, ef
    m = frexp(x, &e)
    ef = e
    if m < _SQRT_HALF:
        m = m + m
        ef = ef - 1.0
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


cdef inline double _ppf_central(double q) nogil:
    cdef double r, num, den
    r = q * q
    num = ((((_A1 * r + _A2) * r + _A3) * r + _A4) * r + _A5) * r + _A6
    den = ((((_B1 * r + _B2) * r + _B3) * r + _B4) * r + _B5) * r + 1.0
    return (num * q) / den


cdef inline double _ppf_tail(double q) nogil:
    cdef double num, den
    num = ((((_C1 * q + _C2) * q + _C3) * q + _C4) * q + _C5) * q + _C6
    den = (((_D1 * q + _D2) * q + _D3) * q + _D4) * q + 1.0
    return num / den


cdef inline double _ppf(double p) nogil:
    cdef double q
    if p < _P_LOW:
        q = sqrt(-2.0 * _log(p))
        return _ppf_tail(q)
    elif p > _P_HIGH:
        q = sqrt(-2.0 * _log(1.0 - p))
        return -_ppf_tail(q)
    else:
        return _ppf_central(p - 0.5)


def bits(key, start, n):
    """Raw SplitMix64 outputs for counter positions start..start+n-1."""
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] view = out
    cdef uint64_t k = key & 0xFFFFFFFFFFFFFFFF
    cdef uint64_t s = start & 0xFFFFFFFFFFFFFFFF
    cdef Py_ssize_t i, m = n
    with nogil:
        for i in range(m):
            view[i] = _mix64(k + (s + <uint64_t> i + 1) * _GAMMA)
    return out


def uniforms(key, start, n):
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    cdef uint64_t k = key & 0xFFFFFFFFFFFFFFFF
    cdef uint64_t s = start & 0xFFFFFFFFFFFFFFFF
    cdef Py_ssize_t i, m = n
    with nogil:
        for i in range(m):
            view[i] = _to_unit(_mix64(k + (s + <uint64_t> i + 1) * _GAMMA))
    return out


def normals(key, start, n):
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    cdef uint64_t k = key & 0xFFFFFFFFFFFFFFFF
    cdef uint64_t s = start & 0xFFFFFFFFFFFFFFFF
    cdef Py_ssize_t i, m = n
    with nogil:
        for i in range(m):
            view[i] = _ppf(_to_unit(_mix64(k + (s + <uint64_t> i + 1) * _GAMMA)))
    return out
