"""Random infinite binary strings and minimal k-prefix parameters.

Strings are lazy: bit ``l`` of string ``i`` is bit ``63 - l % 64`` of the
word ``rng.combine(rng.combine(seed, i), l // 64)``, optionally overlaid by a
forced leading pattern. Nothing is materialized beyond what a comparison
actually reads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cmp_to_key

import numpy as np

from . import rng
from .errors import DepthCapExceeded
from .occupancy import OccupancyVector

DEFAULT_DEPTH_CAP = 4096


def _pattern_blocks(pattern: str) -> list[tuple[int, int]]:
    """Split a '0'/'1' pattern into (value, mask) pairs per 64-bit block."""
    out = []
    for start in range(0, len(pattern), 64):
        chunk = pattern[start : start + 64]
        width = len(chunk)
        value = int(chunk, 2) << (64 - width)
        mask = ((1 << width) - 1) << (64 - width)
        out.append((value, mask))
    return out


@dataclass(frozen=True)
class StringSet:
    n: int
    seed: int
    forced_prefixes: dict = field(default_factory=dict)
    depth_cap: int = DEFAULT_DEPTH_CAP

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a StringSet needs at least one string")
        if self.depth_cap < 1:
            raise ValueError("depth_cap must be positive")
        forced = {}
        for i, pat in dict(self.forced_prefixes).items():
            i = int(i)
            if not 0 <= i < self.n:
                raise ValueError(f"forced prefix for string {i} out of range")
            if set(pat) - {"0", "1"}:
                raise ValueError(f"forced prefix {pat!r} is not a bit pattern")
            if len(pat) >= self.depth_cap:
                raise ValueError("forced prefix must be shorter than the depth cap")
            forced[i] = pat
        object.__setattr__(self, "forced_prefixes", forced)
        object.__setattr__(self, "_overlay", {i: _pattern_blocks(p) for i, p in forced.items()})
        object.__setattr__(self, "_streams", [rng.combine(self.seed, i) for i in range(self.n)])

    @property
    def cap_blocks(self) -> int:
        return -(-self.depth_cap // 64)

    def word(self, i: int, block: int) -> int:
        w = rng.combine(self._streams[i], block)
        over = self._overlay.get(i)
        if over is not None and block < len(over):
            value, mask = over[block]
            w = (w & ~mask & rng.MASK64) | value
        return w

    def bit(self, i: int, pos: int) -> int:
        return (self.word(i, pos // 64) >> (63 - pos % 64)) & 1

    def prefix(self, i: int, length: int) -> str:
        return "".join(str(self.bit(i, p)) for p in range(length))

    def compare(self, i: int, j: int) -> tuple[int, int]:
        """Return (sign, lcp) of the lexicographic comparison of strings i and j."""
        for b in range(self.cap_blocks):
            wi = self.word(i, b)
            wj = self.word(j, b)
            x = wi ^ wj
            if x:
                common = 64 * b + 64 - x.bit_length()
                if common > self.depth_cap:
                    break
                return (-1 if wi < wj else 1), common
        raise DepthCapExceeded(f"strings {i} and {j} agree on more than {self.depth_cap} bits")

    def lexicographic_order(self) -> list[int]:
        return sorted(range(self.n), key=cmp_to_key(lambda a, b: self.compare(a, b)[0]))

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "seed": self.seed,
                "forced_prefixes": {str(k): v for k, v in sorted(self.forced_prefixes.items())},
                "depth_cap": self.depth_cap,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "StringSet":
        d = json.loads(text)
        return cls(
            n=d["n"],
            seed=d["seed"],
            forced_prefixes={int(k): v for k, v in d.get("forced_prefixes", {}).items()},
            depth_cap=d.get("depth_cap", DEFAULT_DEPTH_CAP),
        )


@dataclass(frozen=True, eq=False)
class PrefixLengths:
    lengths: np.ndarray
    k: int

    @property
    def total(self) -> int:
        return int(self.lengths.sum())

    @property
    def excess(self) -> int:
        return int((self.lengths - self.k).sum())


@dataclass(frozen=True, eq=False)
class DeltaTrace:
    deltas: np.ndarray
    k: int

    @property
    def total(self) -> int:
        return int(self.deltas.sum())


def lcp(L: StringSet, i: int, j: int) -> int:
    if i == j:
        raise ValueError("lcp needs two different strings")
    return L.compare(i, j)[1]


def default_k(n: int) -> int:
    """ceil(log2 n), the depth used for "the" excess path length."""
    return max(0, (n - 1).bit_length())


def minimal_prefix_lengths(L: StringSet, k: int) -> PrefixLengths:
    """Lengths of the minimal k-prefixes, max(k, 1 + max_j lcp(i, j)).

    Only lexicographic neighbours can attain the maximum, so one sort plus
    ``n - 1`` neighbour comparisons suffice. A lone string gets length ``k``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    order = L.lexicographic_order()
    best = np.full(L.n, -1, dtype=np.int64)
    for a, b in zip(order, order[1:]):
        common = L.compare(a, b)[1]
        best[a] = max(best[a], common)
        best[b] = max(best[b], common)
    return PrefixLengths(np.maximum(k, best + 1), k)


def excess_path_length(L: StringSet, k: int | None = None) -> int:
    if k is None:
        k = default_k(L.n)
    return minimal_prefix_lengths(L, k).excess


def external_path_length(L: StringSet) -> int:
    """p_0: the nonvoid external path length of the minimal trie."""
    return minimal_prefix_lengths(L, 0).excess


def node_occupancy(L: StringSet, depth: int) -> OccupancyVector:
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    counts = np.zeros(1 << depth, dtype=np.int64)
    for i in range(L.n):
        node = 0
        for pos in range(depth):
            node = (node << 1) | L.bit(i, pos)
        counts[node] += 1
    return OccupancyVector(counts)


def delta_trace(L: StringSet, k: int | None = None) -> DeltaTrace:
    """Increase of p_k as strings 0, 1, ..., n-1 are inserted one at a time.

    A new string can lengthen at most one earlier prefix: the one that is a
    prefix of the new string, which is necessarily a sorted neighbour.
    """
    if k is None:
        k = default_k(L.n)
    lengths = np.zeros(L.n, dtype=np.int64)
    sorted_ids: list[int] = []
    deltas = np.zeros(L.n, dtype=np.int64)
    for i in range(L.n):
        lo, hi = 0, len(sorted_ids)
        while lo < hi:
            mid = (lo + hi) // 2
            if L.compare(sorted_ids[mid], i)[0] < 0:
                lo = mid + 1
            else:
                hi = mid
        best = -1
        d = 0
        for pos in (lo - 1, lo):
            if 0 <= pos < len(sorted_ids):
                j = sorted_ids[pos]
                common = L.compare(i, j)[1]
                best = max(best, common)
                if lengths[j] <= common:
                    d += common + 1 - lengths[j]
                    lengths[j] = common + 1
        lengths[i] = max(k, best + 1)
        deltas[i] = d + lengths[i] - k
        sorted_ids.insert(lo, i)
    return DeltaTrace(deltas, k)


def shared_prefix_length(n: int, c: float) -> int:
    return math.ceil((c / 2 + 1) * n - 1e-9)


def adversarial_shared_prefix(n: int, c: float, seed: int, depth_cap: int = DEFAULT_DEPTH_CAP) -> StringSet:
    """Strings 0 and 1 share their first ceil((c/2 + 1) n) bits and then differ."""
    if n < 2:
        raise ValueError("need at least two strings")
    if c <= 0:
        raise ValueError("c must be positive")
    length = shared_prefix_length(n, c)
    base = StringSet(n, seed, depth_cap=depth_cap)
    common = base.prefix(0, length)
    return StringSet(n, seed, {0: common + "0", 1: common + "1"}, depth_cap=depth_cap)
