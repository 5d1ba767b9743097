"""Counter-keyed splittable random streams.

One master seed governs an experiment; the stream for replicate ``r`` is
derived by hashing ``(seed, r)`` (splitmix64 fold-in) into an xoshiro256++
state, so any replicate is reproducible in isolation and results cannot
depend on worker scheduling. This module is the pure-Python reference
implementation; ``_kernels`` mirrors it bit-for-bit in compiled form.

Draw protocol per replicate (fixed, relied upon by the Monte Carlo engine
and by realization replay): first the Poisson count, then the block of
colatitude variables, then the block of longitude variables.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["SplitStream", "POISSON_INVERSION_CUTOFF"]

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

# Inversion sampling below this mean, transformed rejection (PTRS) above.
POISSON_INVERSION_CUTOFF = 30.0


def _mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK
    return z ^ (z >> 31)


def _derive_state(seed: int, replicate: int) -> list[int]:
    key = _mix64((seed & _MASK) ^ _mix64((replicate & _MASK) + _GOLDEN))
    state = []
    st = key
    for _ in range(4):
        st = (st + _GOLDEN) & _MASK
        state.append(_mix64(st))
    if not any(state):
        state[0] = _GOLDEN
    return state


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class SplitStream:
    """xoshiro256++ stream keyed by (master seed, replicate index)."""

    def __init__(self, seed: int, replicate: int = 0):
        self.seed = int(seed)
        self.replicate = int(replicate)
        self._s = _derive_state(self.seed, self.replicate)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        out = (_rotl((s0 + s3) & _MASK, 23) + s0) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return out

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform_block(self, n: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        out = np.empty(n)
        span = high - low
        for i in range(n):
            out[i] = low + span * self.uniform()
        return out

    def poisson(self, mean: float) -> int:
        if mean < 0:
            raise ValueError("Poisson mean must be nonnegative")
        if mean == 0.0:
            return 0
        if mean < POISSON_INVERSION_CUTOFF:
            return self._poisson_inversion(mean)
        return self._poisson_ptrs(mean)

    def _poisson_inversion(self, mean: float) -> int:
        # Knuth: multiply uniforms until the product drops below exp(-mean).
        floor_p = math.exp(-mean)
        k = 0
        p = 1.0
        while True:
            p *= self.uniform()
            if p <= floor_p:
                return k
            k += 1

    def _poisson_ptrs(self, mean: float) -> int:
        # Hormann's transformed rejection with squeeze (PTRS), mean >= 10.
        slam = math.sqrt(mean)
        loglam = math.log(mean)
        b = 0.931 + 2.53 * slam
        a = -0.059 + 0.02483 * b
        invalpha = 1.1239 + 1.1328 / (b - 3.4)
        vr = 0.9277 - 3.6224 / (b - 2.0)
        while True:
            u = self.uniform() - 0.5
            v = self.uniform()
            us = 0.5 - abs(u)
            k = int(math.floor((2.0 * a / us + b) * u + mean + 0.43))
            if us >= 0.07 and v <= vr:
                return k
            if k < 0 or (us < 0.013 and v > us):
                continue
            if (math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)) <= (
                -mean + k * loglam - math.lgamma(k + 1.0)
            ):
                return k
