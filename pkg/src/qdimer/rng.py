"""Counter-based random streams for reproducible parallel ensembles.

Every trajectory owns a stream addressed by (master_seed, traj_index). The
t-th variate of a stream is a pure function of (master_seed, traj_index, t)
-- a SplitMix-style generator whose state is the counter itself -- so
ensembles can be evaluated in any order, sliced across threads, or replayed
one trajectory at a time with bit-identical results. No generator object is
ever shared or mutated.

All helpers are numba-jitted and callable both from kernels and from plain
Python.
"""

import numpy as np
from numba import njit

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.1102230246251565e-16  # 2**-53


@njit(cache=True, inline="always")
def mix64(z):
    """SplitMix64 finalizer: a bijective 64-bit mix."""
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def stream_key(master_seed, traj_index):
    """Derive the per-trajectory stream key from (master_seed, traj_index)."""
    return mix64(master_seed + _GAMMA * (traj_index + _ONE))


@njit(cache=True, inline="always")
def uniform(key, counter):
    """counter-th uniform of the stream, in [0, 1)."""
    return (mix64(key + _GAMMA * counter) >> _S11) * _INV53


@njit(cache=True, inline="always")
def uniform_open(key, counter):
    """counter-th uniform of the stream, strictly inside (0, 1)."""
    return ((mix64(key + _GAMMA * counter) >> _S11) + 0.5) * _INV53


@njit(cache=True, inline="always")
def normal_pair(key, counter):
    """Two independent standard normals via Box-Muller, consuming counters
    ``counter`` and ``counter + 1``."""
    u1 = uniform_open(key, counter)
    u2 = uniform_open(key, counter + _ONE)
    r = np.sqrt(-2.0 * np.log(u1))
    return r * np.cos(2.0 * np.pi * u2), r * np.sin(2.0 * np.pi * u2)


def uniform_stream(master_seed, traj_index, n, start=0):
    """First ``n`` uniforms of a stream as an array (reference/test helper)."""
    # jitted functions box uint64 returns as Python ints; re-cast so the
    # next call does not dispatch through int64 and overflow
    key = np.uint64(stream_key(np.uint64(master_seed), np.uint64(traj_index)))
    out = np.empty(n)
    for t in range(n):
        out[t] = uniform(key, np.uint64(start + t))
    return out
