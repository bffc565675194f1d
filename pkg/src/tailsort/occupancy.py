"""Balls-into-bins occupancy vectors and the statistics built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rng


@dataclass(frozen=True, eq=False)
class OccupancyVector:
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 1 or len(c) == 0:
            raise ValueError("occupancy vector must be a nonempty 1-d array")
        if (c < 0).any():
            raise ValueError("occupancy counts must be nonnegative")
        object.__setattr__(self, "counts", c)

    @property
    def n(self) -> int:
        return len(self.counts)

    @property
    def balls(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other):
        if not isinstance(other, OccupancyVector):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)

    def __iter__(self):
        return iter(int(c) for c in self.counts)

    def __len__(self):
        return self.n


def _as_counts(b) -> np.ndarray:
    if isinstance(b, OccupancyVector):
        return b.counts
    return np.asarray(b, dtype=np.int64)


def bucket_of(x: float, n: int) -> int:
    """Bucket of key ``x`` among ``n`` buckets, clamped to ``n - 1`` at the top edge."""
    return min(int(x * n), n - 1)


def bucketize(keys: Sequence[float]) -> OccupancyVector:
    n = len(keys)
    if n < 1:
        raise ValueError("bucketize needs at least one key")
    idx = np.minimum((np.asarray(keys, dtype=np.float64) * n).astype(np.int64), n - 1)
    return OccupancyVector(np.bincount(idx, minlength=n))


def sample_occupancy(n: int, seed: int) -> OccupancyVector:
    """Throw ``n`` balls into ``n`` bins; ball ``i`` uses ``rng.uniform(seed, i)``.

    This is exactly ``bucketize(sorting.uniform_keys(n, seed))``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    u = rng.uniform_array(np.uint64(seed & rng.MASK64), np.arange(n, dtype=np.uint64))
    return OccupancyVector(np.bincount(rng.bucket_index_array(u, n), minlength=n))


def f_stat(b) -> int:
    c = _as_counts(b)
    return int((c * c).sum())


def g_stat(b) -> float:
    """Sum of B log2 B over nonempty bins."""
    c = _as_counts(b)
    c = c[c > 1]
    return math.fsum(int(x) * math.log2(int(x)) for x in c)


def s_counts(b) -> np.ndarray:
    """``out[i - 1] = |S_i|``, the number of bins holding at least ``i`` balls.

    Covers i = 1..max(n, max count), so every nonzero |S_i| is present.
    """
    c = _as_counts(b)
    n = len(c)
    top = max(n, int(c.max()) if len(c) else 0)
    hist = np.bincount(c, minlength=top + 1)
    # suffix sums: at_least[i] = #bins with count >= i
    at_least = np.cumsum(hist[::-1])[::-1]
    return at_least[1 : top + 1].astype(np.int64)


def weighted_s_sum(b) -> int:
    """Sum over i of i * |S_i|."""
    s = s_counts(b)
    return int((np.arange(1, len(s) + 1, dtype=np.int64) * s).sum())


def pair_sum(b) -> int:
    """Sum over bins of C(B_j + 1, 2)."""
    c = _as_counts(b)
    return int((c * (c + 1) // 2).sum())


def e_bound(i: int) -> float:
    """(e / i)^i, evaluated as exp(i (1 - ln i))."""
    if i < 1:
        raise ValueError("i must be a positive integer")
    return math.exp(i * (1.0 - math.log(i)))


def weighted_e_sum(terms: int) -> float:
    return math.fsum(i * e_bound(i) for i in range(1, terms + 1))


def left_half_count(b) -> int:
    c = _as_counts(b)
    return int(c[: len(c) // 2].sum())
