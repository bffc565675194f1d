"""Counter-based pseudorandom streams.

Every random quantity in the package is a pure function of a 64-bit key and
a counter: ``combine(key, c) = mix64(key ^ mix64(c + GAMMA))`` where ``mix64``
is the SplitMix64 finalizer. Child keys are derived the same way, so trial
``t`` of an experiment always sees the same numbers no matter which thread
or block evaluates it.

Three interchangeable implementations exist: Python ints (scalar, used by the
single-instance library calls), numpy uint64 arrays (vectorized fallback) and
numba scalars (in :mod:`tailsort.kernels.numba_backend`). Tests pin them to
each other.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
M1 = 0xBF58476D1CE4E5B9
M2 = 0x94D049BB133111EB
INV_2_53 = 1.0 / (1 << 53)

# stream tags; trial keys of different experiment families never coincide
TAG_OCCUPANCY = 1
TAG_TRIE = 2
TAG_QUICKSORT = 3
TAG_NULL_ARM = 4
TAG_SKEW = 5


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * M1) & MASK64
    z = ((z ^ (z >> 27)) * M2) & MASK64
    return z ^ (z >> 31)


def combine(key: int, c: int) -> int:
    return mix64((key & MASK64) ^ mix64(c + GAMMA))


def trial_key(master_seed: int, tag: int, t: int) -> int:
    """Key of trial ``t`` in the stream family ``tag``."""
    return combine(combine(master_seed, tag), t)


def uniform(key: int, c: int) -> float:
    """Uniform double in [0, 1) with 53 random bits."""
    return (combine(key, c) >> 11) * INV_2_53


def bounded(key: int, c: int, size: int) -> int:
    """Index in ``range(size)`` as floor(u * size)."""
    j = int(uniform(key, c) * size)
    return min(j, size - 1)


# -- numpy (vectorized) ------------------------------------------------------

_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_NM1 = np.uint64(M1)
_NM2 = np.uint64(M2)
_NGAMMA = np.uint64(GAMMA)


def mix64_array(z):
    z = np.asarray(z, dtype=np.uint64)
    # wraparound is the point; numpy only warns for 0-d operands
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _NM1
        z = (z ^ (z >> _S27)) * _NM2
    return z ^ (z >> _S31)


def combine_array(key, c):
    """Broadcasting version of :func:`combine` over uint64 arrays."""
    key = np.asarray(key, dtype=np.uint64)
    c = np.asarray(c, dtype=np.uint64)
    with np.errstate(over="ignore"):
        c = c + _NGAMMA
    return mix64_array(key ^ mix64_array(c))


def uniform_array(key, c):
    return (combine_array(key, c) >> np.uint64(11)).astype(np.float64) * INV_2_53


def trial_keys(master_seed: int, tag: int, t0: int, t1: int):
    base = np.uint64(combine(master_seed, tag))
    return combine_array(base, np.arange(t0, t1, dtype=np.uint64))


def bucket_index_array(u, n: int):
    return np.minimum((u * n).astype(np.int64), n - 1)
