"""Sorting algorithms with exact operation counts.

Cost convention: one unit per key comparison and one per element write.
Bucket Sort pays ``n`` writes to distribute keys and ``n`` to scan them back
out, on top of whatever the inner sort reports for each bucket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import rng
from .occupancy import OccupancyVector, bucket_of

VARIANTS = ("b2", "blogb")


@dataclass(frozen=True)
class CostReport:
    comparisons: int = 0
    moves: int = 0

    @property
    def total_units(self) -> int:
        return self.comparisons + self.moves

    def __add__(self, other: "CostReport") -> "CostReport":
        return CostReport(self.comparisons + other.comparisons, self.moves + other.moves)


@dataclass(frozen=True)
class RecursionOccupancy:
    """List sizes routed to each depth-``depth`` node of a Quick Sort recursion tree.

    Node ``j`` is the node reached by following the binary digits of ``j``
    from the root (0 = smaller side). Pivots stay at the node that chose them.
    """

    depth: int
    counts: np.ndarray
    pivots_above: int = 0

    def left_subtree_empty(self) -> bool:
        if self.depth == 0:
            return False
        half = len(self.counts) // 2
        return not self.counts[:half].any()


def insertion_sort(keys: Sequence[float]) -> tuple[list[float], CostReport]:
    a = list(keys)
    comparisons = 0
    moves = 0
    for j in range(1, len(a)):
        key = a[j]
        i = j - 1
        while i >= 0:
            comparisons += 1
            if a[i] > key:
                a[i + 1] = a[i]
                moves += 1
                i -= 1
            else:
                break
        a[i + 1] = key
        moves += 1
    return a, CostReport(comparisons, moves)


def merge_sort(keys: Sequence[float]) -> tuple[list[float], CostReport]:
    """Top-down merge sort; the left half is ``keys[:m // 2]``."""
    counter = [0, 0]

    def rec(a):
        m = len(a)
        if m <= 1:
            return list(a)
        mid = m // 2
        left = rec(a[:mid])
        right = rec(a[mid:])
        out = []
        i = j = 0
        while i < len(left) and j < len(right):
            counter[0] += 1
            # ties go left: stable
            if right[j] < left[i]:
                out.append(right[j])
                j += 1
            else:
                out.append(left[i])
                i += 1
        out.extend(left[i:])
        out.extend(right[j:])
        counter[1] += m
        return out

    out = rec(list(keys))
    return out, CostReport(counter[0], counter[1])


def bucket_sort(keys: Sequence[float], variant: str = "b2") -> tuple[list[float], CostReport, OccupancyVector]:
    """Bucket Sort into ``n = len(keys)`` buckets of width ``1/n``.

    ``variant`` picks the inner sort: ``"b2"`` uses insertion sort,
    ``"blogb"`` uses merge sort.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    n = len(keys)
    if n < 1:
        raise ValueError("bucket_sort needs at least one key")
    inner = insertion_sort if variant == "b2" else merge_sort
    buckets: list[list[float]] = [[] for _ in range(n)]
    for x in keys:
        buckets[bucket_of(x, n)].append(x)
    cost = CostReport(0, n)
    out: list[float] = []
    for b in buckets:
        if b:
            s, c = inner(b)
            cost = cost + c
            out.extend(s)
    cost = cost + CostReport(0, n)
    occ = OccupancyVector(np.array([len(b) for b in buckets], dtype=np.int64))
    return out, cost, occ


def quick_sort_random(keys: Sequence[float], rng_seed: int, depth: int = 0) -> tuple[list[float], CostReport, RecursionOccupancy]:
    """Randomized Quick Sort that also records recursion-tree occupancy at ``depth``.

    The pivot of the ``c``-th call with at least two keys (preorder, smaller
    side first) is ``floor(u * size)`` with ``u = rng.uniform(pivot_key, c)``
    and ``pivot_key = rng.combine(rng_seed, 1)``. Each call costs ``size - 1``
    comparisons.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    pivot_key = rng.combine(rng_seed, 1)
    counts = np.zeros(1 << depth, dtype=np.int64)
    state = {"draws": 0, "cmp": 0, "moves": 0, "pivots": 0}

    def rec(a, level, node):
        size = len(a)
        if level == depth:
            counts[node] = size
        if size == 0:
            return []
        if level < depth:
            state["pivots"] += 1
        if size == 1:
            state["moves"] += 1
            return list(a)
        p = rng.bounded(pivot_key, state["draws"], size)
        state["draws"] += 1
        pivot = a[p]
        smaller, greater = [], []
        for i, x in enumerate(a):
            if i == p:
                continue
            state["cmp"] += 1
            if x < pivot:
                smaller.append(x)
            else:
                greater.append(x)
        state["moves"] += size  # size-1 partition writes plus the pivot's output write
        child = 2 * node if level < depth else 0
        left = rec(smaller, level + 1, child)
        right = rec(greater, level + 1, child + 1 if level < depth else 0)
        return left + [pivot] + right

    out = rec(list(keys), 0, 0)
    occ = RecursionOccupancy(depth, counts, state["pivots"])
    return out, CostReport(state["cmp"], state["moves"]), occ


def expected_quicksort_comparisons(n: int) -> float:
    """Mean key comparisons of randomized Quick Sort, 2(n+1)H_n - 4n."""
    h = math.fsum(1.0 / i for i in range(1, n + 1))
    return 2.0 * (n + 1) * h - 4.0 * n


def uniform_keys(n: int, seed: int) -> list[float]:
    """``n`` uniform keys; key ``i`` is ``rng.uniform(seed, i)``."""
    return rng.uniform_array(np.uint64(seed & rng.MASK64), np.arange(n, dtype=np.uint64)).tolist()
