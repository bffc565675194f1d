"""Batched Monte Carlo kernels and the block-parallel driver around them.

The active backend is numba unless ``TAILSORT_BACKEND=numpy`` (or
``TAILSORT_DISABLE_NUMBA=1``) was set at import. Both backends are
importable by name for cross-checks and benchmarks.

Trials are split into fixed blocks whose size never depends on the thread
count, and block results are concatenated in trial order, so any number of
threads gives identical arrays.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numpy as np

from .. import rng
from .._jit import BACKEND, USE_NUMBA
from ..errors import DepthCapExceeded
from ..trie import DEFAULT_DEPTH_CAP
from . import numpy_backend

log = logging.getLogger(__name__)

if USE_NUMBA:
    from . import numba_backend as active
else:
    active = numpy_backend

_WORK_PER_BLOCK = 1 << 21


def get_backend(name: str | None = None):
    if name is None:
        return active
    if name == "numba":
        from . import numba_backend

        return numba_backend
    if name == "numpy":
        return numpy_backend
    raise ValueError(f"unknown backend {name!r}")


@lru_cache(maxsize=None)
def glog_table(n: int) -> np.ndarray:
    """``table[c] = c * log2(c)`` for c = 0..n (0 for c <= 1)."""
    t = np.zeros(n + 1, dtype=np.float64)
    for c in range(2, n + 1):
        t[c] = c * math.log2(c)
    t.setflags(write=False)
    return t


def block_size(per_trial_work: int) -> int:
    return max(1, _WORK_PER_BLOCK // max(1, per_trial_work))


def run_blocks(func, m: int, threads: int = 1, per_trial_work: int = 1, label: str = ""):
    """Evaluate ``func(t0, t1)`` over fixed blocks of ``range(m)`` and concatenate."""
    if m < 0:
        raise ValueError("trial count must be nonnegative")
    size = block_size(per_trial_work)
    blocks = [(a, min(m, a + size)) for a in range(0, m, size)]
    if not blocks:
        blocks = [(0, 0)]

    def one(ab):
        out = func(*ab)
        log.debug("%s trials %d..%d done", label, ab[0], ab[1])
        return out

    if threads <= 1 or len(blocks) == 1:
        results = [one(ab) for ab in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(one, blocks))
    return tuple(np.concatenate([r[i] for r in results]) for i in range(len(results[0])))


def _base(master_seed: int, tag: int) -> np.uint64:
    return np.uint64(rng.combine(master_seed, tag))


def occupancy_batch(n, master_seed, m, threads=1, tag=rng.TAG_OCCUPANCY, backend=None):
    """f, g and left-half count of ``m`` balls-into-bins trials."""
    be = get_backend(backend)
    base = _base(master_seed, tag)
    glog = glog_table(n)
    f, g, left = run_blocks(lambda a, b: be.occupancy_stats(n, base, a, b, glog), m, threads, n, "occupancy")
    return {"f": f, "g": g, "left": left}


def trie_batch(n, k, depth, master_seed, m, threads=1, depth_cap=DEFAULT_DEPTH_CAP, tag=rng.TAG_TRIE, backend=None):
    """p_k, p_0 and f, g of the depth-``depth`` node occupancy (``depth < 0`` skips it)."""
    if depth > 63:
        raise ValueError("node occupancy depth above 63 is not supported")
    be = get_backend(backend)
    base = _base(master_seed, tag)
    glog = glog_table(n)
    pk, p0, fc, gc, ok = run_blocks(
        lambda a, b: be.trie_stats(n, k, depth, base, a, b, depth_cap, glog), m, threads, 2 * n, "trie"
    )
    if not ok.all():
        raise DepthCapExceeded(f"{int((ok == 0).sum())} trials exceeded the depth cap {depth_cap}")
    return {"pk": pk, "p0": p0, "f": fc, "g": gc}


def delta_batch(n, k, master_seed, m, threads=1, depth_cap=DEFAULT_DEPTH_CAP, tag=rng.TAG_TRIE, backend=None):
    be = get_backend(backend)
    base = _base(master_seed, tag)
    deltas, ok = run_blocks(lambda a, b: be.delta_traces(n, k, base, a, b, depth_cap), m, threads, 4 * n, "delta")
    if not ok.all():
        raise DepthCapExceeded(f"{int((ok == 0).sum())} trials exceeded the depth cap {depth_cap}")
    return deltas.reshape(m, n)


def bucket_batch(n, variant, master_seed, m, threads=1, tag=rng.TAG_OCCUPANCY, backend=None):
    """Bucket Sort costs on the same keys the occupancy stream draws."""
    from ..sorting import VARIANTS

    be = get_backend(backend)
    base = _base(master_seed, tag)
    code = VARIANTS.index(variant)
    comps, moves, f = run_blocks(lambda a, b: be.bucket_cost(n, code, base, a, b), m, threads, 4 * n, "bucket")
    return {"comparisons": comps, "moves": moves, "f": f}


def quicksort_batch(n, depth, master_seed, m, threads=1, tag=rng.TAG_QUICKSORT, backend=None):
    be = get_backend(backend)
    base = _base(master_seed, tag)
    per = n * max(1, n.bit_length())
    comps, moves, z = run_blocks(lambda a, b: be.quicksort_stats(n, depth, base, a, b), m, threads, per, "quicksort")
    return {"comparisons": comps, "moves": moves, "event_z": z}


__all__ = [
    "BACKEND",
    "active",
    "get_backend",
    "glog_table",
    "run_blocks",
    "occupancy_batch",
    "trie_batch",
    "delta_batch",
    "bucket_batch",
    "quicksort_batch",
]
