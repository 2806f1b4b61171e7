"""Deterministic, splittable random source.

Reproducibility contract: a source is identified by (seed, stream_id), both
64-bit. Identical identifiers yield identical draw sequences on every
platform and backend; the generator is counter-based (SplitMix64 bits pushed
through an owned inverse normal CDF, see stochlab.kernels), so draws depend
only on the counter position, never on how earlier draws were batched.

Parallel work never shares a source. Independent streams come from
`split_stream(src, k)`: the child stream_id is mix64(stream_id ^ mix64(k)),
an injective map in k for a fixed parent (xor with a constant and mix64 are
both bijections on 64-bit words), SplitMix-style avalanche mixing.
"""

from __future__ import annotations

import numpy as np

from . import kernels

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = kernels.GAMMA


def _mix64(z: int) -> int:
    z &= _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


def _stream_key(seed: int, stream_id: int) -> int:
    a = _mix64((seed + _GAMMA) & _MASK64)
    b = _mix64((stream_id + 2 * _GAMMA) & _MASK64)
    return _mix64(a ^ b)


class RandomSource:
    """Stateful cursor over one (seed, stream_id) draw stream.

    Single-owner: one consumer advances the cursor sequentially. For
    parallel or order-independent work, derive substreams via split_stream.
    """

    __slots__ = ("seed", "stream_id", "_key", "_pos")

    def __init__(self, seed: int, stream_id: int = 0):
        if not 0 <= seed <= _MASK64:
            raise ValueError("seed must fit in 64 bits")
        if not 0 <= stream_id <= _MASK64:
            raise ValueError("stream_id must fit in 64 bits")
        self.seed = seed
        self.stream_id = stream_id
        self._key = _stream_key(seed, stream_id)
        self._pos = 0

    def __repr__(self):
        return f"RandomSource(seed={self.seed}, stream_id={self.stream_id})"

    @property
    def position(self) -> int:
        """Number of draws consumed so far."""
        return self._pos

    def uniforms(self, count: int) -> np.ndarray:
        """count doubles, strictly inside (0, 1)."""
        if count < 0:
            raise ValueError("count must be nonnegative")
        out = kernels.uniforms(self._key, self._pos, count)
        self._pos += count
        return out

    def normals(self, count: int) -> np.ndarray:
        """count standard normal draws (inverse-CDF of the uniform stream)."""
        if count < 0:
            raise ValueError("count must be nonnegative")
        out = kernels.normals(self._key, self._pos, count)
        self._pos += count
        return out


def gaussian_draws(src: RandomSource, count: int, mean: float = 0.0,
                   std: float = 1.0) -> np.ndarray:
    """count draws from N(mean, std^2), consuming count positions of src.

    std = 0 returns the constant mean (positions are still consumed so the
    stream layout does not depend on parameter values).
    """
    if std < 0.0:
        raise ValueError("std must be nonnegative")
    z = src.normals(count)
    if std == 0.0:
        return np.full(count, float(mean))
    return mean + std * z


def uniform_draws(src: RandomSource, count: int) -> np.ndarray:
    """count uniforms on (0, 1), consuming count positions of src."""
    return src.uniforms(count)


def split_stream(src: RandomSource, k: int) -> RandomSource:
    """Child source with stream_id = mix64(src.stream_id ^ mix64(k)).

    Deterministic in (src.stream_id, k) alone: does not consume or depend on
    the parent's cursor, so split(s, k) always names the same stream. The map
    is injective in k for a fixed parent. One corner: mix64(0) = 0, so on the
    stream-0 parent k = 0 names the parent itself; draw from either the parent
    or its children, not both, or start k at 1.
    """
    if not 0 <= k <= _MASK64:
        raise ValueError("k must fit in 64 bits")
    child = _mix64(src.stream_id ^ _mix64(k))
    return RandomSource(src.seed, child)
