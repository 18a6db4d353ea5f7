"""Inline counter-free PRNG for the numba kernels.

xoshiro256++ with splitmix64 seeding. State lives in a caller-owned
uint64[4] array, so kernels stay deterministic for a given seed no matter
how the surrounding code schedules work across processes or threads.
"""

import numpy as np
from numba import njit, uint64, float64

_U64 = uint64
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


@njit(uint64(uint64, uint64), inline="always", cache=True)
def _rotl(x, k):
    return _U64((x << k) | (x >> (_U64(64) - k)))


@njit(cache=True)
def seed_state(seed):
    """splitmix64 expansion of a 64-bit seed into xoshiro256 state."""
    s = np.empty(4, dtype=np.uint64)
    z = _U64(seed)
    for i in range(4):
        z = _U64(z + _U64(0x9E3779B97F4A7C15))
        w = z
        w = _U64((w ^ (w >> _U64(30))) * _U64(0xBF58476D1CE4E5B9))
        w = _U64((w ^ (w >> _U64(27))) * _U64(0x94D049BB133111EB))
        s[i] = _U64(w ^ (w >> _U64(31)))
    return s


@njit(uint64(uint64[:]), inline="always", cache=True)
def next_u64(s):
    out = _U64(_rotl(_U64(s[0] + s[3]), _U64(23)) + s[0])
    t = _U64(s[1] << _U64(17))
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], _U64(45))
    return out


@njit(float64(uint64[:]), inline="always", cache=True)
def next_double(s):
    """Uniform on [0, 1)."""
    return float64(next_u64(s) >> _U64(11)) * _INV53


def derive_seed(rng: np.random.Generator) -> np.uint64:
    """Draw a kernel seed from a numpy Generator (advances the stream)."""
    return rng.integers(0, 2**64, dtype=np.uint64)
