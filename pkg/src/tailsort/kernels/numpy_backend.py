"""Fallback kernels without numba.

Occupancy and trie statistics are vectorized over a chunk of trials; the
inherently sequential kernels (sorting, incremental traces) loop over trials
and call the single-instance library functions, which share the counter
scheme and therefore return identical numbers.
"""

import numpy as np

from .. import rng as _rng
from .. import sorting as _sorting
from .. import trie as _trie

_CHUNK_ELEMS = 1 << 20


def _chunks(n, t0, t1):
    step = max(1, _CHUNK_ELEMS // max(n, 1))
    for a in range(t0, t1, step):
        yield a, min(t1, a + step)


def _row_counts(idx, width):
    rows = idx.shape[0]
    flat = idx + (np.arange(rows, dtype=np.int64) * width)[:, None]
    return np.bincount(flat.ravel(), minlength=rows * width).reshape(rows, width)


def _seq_sum(x):
    # cumsum accumulates left to right, matching the scalar loops of the numba kernels
    if x.shape[1] == 0:
        return np.zeros(x.shape[0], dtype=x.dtype)
    return np.cumsum(x, axis=1)[:, -1]


def clz64(x):
    """Leading zeros of each uint64 (64 for zero)."""
    x = np.asarray(x, dtype=np.uint64)
    hi = (x >> np.uint64(32)).astype(np.float64)
    lo = (x & np.uint64(0xFFFFFFFF)).astype(np.float64)
    bits_hi = np.frexp(hi)[1]
    bits_lo = np.frexp(lo)[1]
    bitlen = np.where(hi > 0, 32 + bits_hi, bits_lo)
    return (64 - bitlen).astype(np.int64)


def occupancy_stats(n, base, t0, t1, glog):
    base = np.uint64(base)
    balls = np.arange(n, dtype=np.uint64)
    fs, gs, ls = [], [], []
    for a, b in _chunks(n, t0, t1):
        keys = _rng.combine_array(base, np.arange(a, b, dtype=np.uint64))
        u = _rng.uniform_array(keys[:, None], balls[None, :])
        counts = _row_counts(_rng.bucket_index_array(u, n), n)
        fs.append((counts * counts).sum(axis=1))
        gs.append(_seq_sum(glog[counts]))
        ls.append(counts[:, : n // 2].sum(axis=1))
    return (
        np.concatenate(fs).astype(np.int64),
        np.concatenate(gs).astype(np.float64),
        np.concatenate(ls).astype(np.int64),
    )


def _trie_row_python(n, k, depth, seed, depth_cap, glog):
    L = _trie.StringSet(n, int(seed), depth_cap=depth_cap)
    lengths0 = _trie.minimal_prefix_lengths(L, 0).lengths
    pk = int(np.maximum(lengths0 - k, 0).sum())
    p0 = int(lengths0.sum())
    fc = 0
    gc = 0.0
    if depth >= 0:
        counts = _trie.node_occupancy(L, depth).counts
        fc = int((counts * counts).sum())
        gc = float(_seq_sum(glog[counts][None, :])[0])
    return pk, p0, fc, gc


def trie_stats(n, k, depth, base, t0, t1, depth_cap, glog):
    base = np.uint64(base)
    idx = np.arange(n, dtype=np.uint64)
    out = {key: [] for key in ("pk", "p0", "fc", "gc", "ok")}
    for a, b in _chunks(n, t0, t1):
        seeds = _rng.combine_array(base, np.arange(a, b, dtype=np.uint64))
        streams = _rng.combine_array(seeds[:, None], idx[None, :])
        w0 = _rng.combine_array(streams, np.uint64(0))
        w = np.sort(w0, axis=1)
        rows = w.shape[0]
        if n > 1:
            x = w[:, 1:] ^ w[:, :-1]
            common = clz64(x)
            pad = np.full((rows, 1), -1, dtype=np.int64)
            best = np.maximum(np.hstack([pad, common]), np.hstack([common, pad]))
            tied = (x == 0).any(axis=1) | (common > depth_cap).any(axis=1)
        else:
            best = np.full((rows, 1), -1, dtype=np.int64)
            tied = np.zeros(rows, dtype=bool)
        lengths = best + 1
        pk = np.maximum(lengths - k, 0).sum(axis=1)
        p0 = lengths.sum(axis=1)
        if depth >= 0:
            if depth == 0:
                node = np.zeros(w0.shape, dtype=np.int64)
            else:
                node = (w0 >> np.uint64(64 - depth)).astype(np.int64)
            counts = _row_counts(node, 1 << depth)
            fc = (counts * counts).sum(axis=1)
            gc = _seq_sum(glog[counts])
        else:
            fc = np.zeros(rows, dtype=np.int64)
            gc = np.zeros(rows, dtype=np.float64)
        ok = np.ones(rows, dtype=np.int64)
        for r in np.flatnonzero(tied):
            try:
                pk[r], p0[r], fc[r], gc[r] = _trie_row_python(n, k, depth, seeds[r], depth_cap, glog)
            except _trie.DepthCapExceeded:
                ok[r] = 0
                pk[r] = p0[r] = fc[r] = 0
                gc[r] = 0.0
        out["pk"].append(pk)
        out["p0"].append(p0)
        out["fc"].append(fc)
        out["gc"].append(gc)
        out["ok"].append(ok)
    return (
        np.concatenate(out["pk"]).astype(np.int64),
        np.concatenate(out["p0"]).astype(np.int64),
        np.concatenate(out["fc"]).astype(np.int64),
        np.concatenate(out["gc"]).astype(np.float64),
        np.concatenate(out["ok"]).astype(np.int64),
    )


def delta_traces(n, k, base, t0, t1, depth_cap):
    m = t1 - t0
    out = np.zeros((m, n), dtype=np.int64)
    ok = np.ones(m, dtype=np.int64)
    for r in range(m):
        seed = _rng.combine(int(base), t0 + r)
        try:
            out[r] = _trie.delta_trace(_trie.StringSet(n, seed, depth_cap=depth_cap), k).deltas
        except _trie.DepthCapExceeded:
            ok[r] = 0
    return out, ok


def bucket_cost(n, variant, base, t0, t1):
    name = _sorting.VARIANTS[variant]
    m = t1 - t0
    comps = np.zeros(m, dtype=np.int64)
    moves = np.zeros(m, dtype=np.int64)
    f = np.zeros(m, dtype=np.int64)
    for r in range(m):
        tkey = _rng.combine(int(base), t0 + r)
        _, cost, occ = _sorting.bucket_sort(_sorting.uniform_keys(n, tkey), name)
        comps[r] = cost.comparisons
        moves[r] = cost.moves
        f[r] = int((occ.counts**2).sum())
    return comps, moves, f


def quicksort_stats(n, depth, base, t0, t1):
    m = t1 - t0
    comps = np.zeros(m, dtype=np.int64)
    moves = np.zeros(m, dtype=np.int64)
    zflag = np.zeros(m, dtype=np.int64)
    for r in range(m):
        tkey = _rng.combine(int(base), t0 + r)
        keys = _sorting.uniform_keys(n, _rng.combine(tkey, 0))
        _, cost, occ = _sorting.quick_sort_random(keys, tkey, depth)
        comps[r] = cost.comparisons
        moves[r] = cost.moves
        zflag[r] = int(occ.left_subtree_empty())
    return comps, moves, zflag
