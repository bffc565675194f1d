"""numba kernels: one call evaluates trials ``t0 .. t1 - 1`` of an experiment.

Each kernel takes ``base`` = ``rng.combine(master_seed, tag)`` and derives
trial keys with the same counter scheme as :mod:`tailsort.rng`, so results
match the numpy backend and the single-instance library calls bit for bit.
"""

import numpy as np
from numba import njit

from .. import rng as _rng

_GAMMA = np.uint64(_rng.GAMMA)
_M1 = np.uint64(_rng.M1)
_M2 = np.uint64(_rng.M2)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_ONE = np.uint64(1)
_INV = _rng.INV_2_53

_opts = dict(cache=True, nogil=True)


@njit(**_opts)
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(**_opts)
def combine(key, c):
    return mix64(key ^ mix64(np.uint64(c) + _GAMMA))


@njit(**_opts)
def uniform(key, c):
    return np.float64(combine(key, c) >> _S11) * _INV


@njit(**_opts)
def clz64(x):
    if x == 0:
        return 64
    n = 0
    if x <= np.uint64(0x00000000FFFFFFFF):
        n += 32
        x = x << np.uint64(32)
    if x <= np.uint64(0x0000FFFFFFFFFFFF):
        n += 16
        x = x << np.uint64(16)
    if x <= np.uint64(0x00FFFFFFFFFFFFFF):
        n += 8
        x = x << np.uint64(8)
    if x <= np.uint64(0x0FFFFFFFFFFFFFFF):
        n += 4
        x = x << np.uint64(4)
    if x <= np.uint64(0x3FFFFFFFFFFFFFFF):
        n += 2
        x = x << np.uint64(2)
    if x <= np.uint64(0x7FFFFFFFFFFFFFFF):
        n += 1
    return n


# -- occupancy ---------------------------------------------------------------


@njit(**_opts)
def occupancy_stats(n, base, t0, t1, glog):
    m = t1 - t0
    f = np.zeros(m, dtype=np.int64)
    g = np.zeros(m, dtype=np.float64)
    left = np.zeros(m, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    half = n // 2
    for r in range(m):
        tkey = combine(base, t0 + r)
        counts[:] = 0
        for b in range(n):
            j = int(uniform(tkey, b) * n)
            if j > n - 1:
                j = n - 1
            counts[j] += 1
        fs = 0
        gs = 0.0
        ls = 0
        for j in range(n):
            c = counts[j]
            fs += c * c
            gs += glog[c]
            if j < half:
                ls += c
        f[r] = fs
        g[r] = gs
        left[r] = ls
    return f, g, left


# -- tries -------------------------------------------------------------------


@njit(**_opts)
def _compare(streams, w0, a, b, depth_cap):
    """(sign, lcp) for strings a, b; sign 0 flags the depth cap."""
    x = w0[a] ^ w0[b]
    if x != 0:
        common = clz64(x)
        if common > depth_cap:
            return 0, common
        return (-1 if w0[a] < w0[b] else 1), common
    blk = 1
    while 64 * blk <= depth_cap:
        wa = combine(streams[a], blk)
        wb = combine(streams[b], blk)
        x = wa ^ wb
        if x != 0:
            common = 64 * blk + clz64(x)
            if common > depth_cap:
                return 0, common
            return (-1 if wa < wb else 1), common
        blk += 1
    return 0, 64 * blk


@njit(**_opts)
def _load_strings(seed, n, streams, w0):
    for i in range(n):
        s = combine(seed, i)
        streams[i] = s
        w0[i] = combine(s, 0)


@njit(**_opts)
def _sorted_order(streams, w0, depth_cap):
    order = np.argsort(w0)
    n = len(order)
    tie = False
    for p in range(n - 1):
        if w0[order[p]] == w0[order[p + 1]]:
            tie = True
            break
    if tie:
        # insertion sort with the full comparator; ties in the first word are rare
        for p in range(1, n):
            cur = order[p]
            q = p - 1
            while q >= 0:
                sign, _ = _compare(streams, w0, order[q], cur, depth_cap)
                if sign == 0:
                    return order, False
                if sign > 0:
                    order[q + 1] = order[q]
                    q -= 1
                else:
                    break
            order[q + 1] = cur
    return order, True


@njit(**_opts)
def trie_stats(n, k, depth, base, t0, t1, depth_cap, glog):
    """Per trial: p_k, p_0, and f, g of the depth-``depth`` node occupancy.

    ``ok[r] == 0`` marks a trial that hit the depth cap.
    """
    m = t1 - t0
    pk = np.zeros(m, dtype=np.int64)
    p0 = np.zeros(m, dtype=np.int64)
    fc = np.zeros(m, dtype=np.int64)
    gc = np.zeros(m, dtype=np.float64)
    ok = np.ones(m, dtype=np.int64)
    streams = np.zeros(n, dtype=np.uint64)
    w0 = np.zeros(n, dtype=np.uint64)
    best = np.zeros(n, dtype=np.int64)
    nodes = 1 << depth if depth >= 0 else 1
    counts = np.zeros(nodes, dtype=np.int64)
    for r in range(m):
        seed = combine(base, t0 + r)
        _load_strings(seed, n, streams, w0)
        order, good = _sorted_order(streams, w0, depth_cap)
        if not good:
            ok[r] = 0
            continue
        best[:] = -1
        for p in range(n - 1):
            a = order[p]
            b = order[p + 1]
            sign, common = _compare(streams, w0, a, b, depth_cap)
            if sign == 0:
                ok[r] = 0
                break
            if common > best[a]:
                best[a] = common
            if common > best[b]:
                best[b] = common
        if ok[r] == 0:
            continue
        sk = 0
        s0 = 0
        for i in range(n):
            length = best[i] + 1
            s0 += length
            if length > k:
                sk += length - k
        pk[r] = sk
        p0[r] = s0
        if depth >= 0:
            counts[:] = 0
            for i in range(n):
                if depth == 0:
                    counts[0] += 1
                else:
                    counts[np.int64(w0[i] >> np.uint64(64 - depth))] += 1
            fs = 0
            gs = 0.0
            for j in range(nodes):
                c = counts[j]
                fs += c * c
                gs += glog[c]
            fc[r] = fs
            gc[r] = gs
    return pk, p0, fc, gc, ok


@njit(**_opts)
def delta_traces(n, k, base, t0, t1, depth_cap):
    m = t1 - t0
    out = np.zeros((m, n), dtype=np.int64)
    ok = np.ones(m, dtype=np.int64)
    streams = np.zeros(n, dtype=np.uint64)
    w0 = np.zeros(n, dtype=np.uint64)
    lengths = np.zeros(n, dtype=np.int64)
    ids = np.zeros(n, dtype=np.int64)
    for r in range(m):
        seed = combine(base, t0 + r)
        _load_strings(seed, n, streams, w0)
        size = 0
        failed = False
        for i in range(n):
            lo = 0
            hi = size
            while lo < hi:
                mid = (lo + hi) // 2
                sign, _ = _compare(streams, w0, ids[mid], i, depth_cap)
                if sign == 0:
                    failed = True
                    break
                if sign < 0:
                    lo = mid + 1
                else:
                    hi = mid
            if failed:
                break
            bst = -1
            d = 0
            for pos in range(lo - 1, lo + 1):
                if pos >= 0 and pos < size:
                    j = ids[pos]
                    sign, common = _compare(streams, w0, i, j, depth_cap)
                    if sign == 0:
                        failed = True
                        break
                    if common > bst:
                        bst = common
                    if lengths[j] <= common:
                        d += common + 1 - lengths[j]
                        lengths[j] = common + 1
            if failed:
                break
            li = bst + 1
            if li < k:
                li = k
            lengths[i] = li
            out[r, i] = d + li - k
            for pos in range(size, lo, -1):
                ids[pos] = ids[pos - 1]
            ids[lo] = i
            size += 1
        if failed:
            ok[r] = 0
    return out, ok


# -- sorting -----------------------------------------------------------------


@njit(**_opts)
def _insertion(a, lo, hi):
    comps = 0
    moves = 0
    for j in range(lo + 1, hi):
        key = a[j]
        i = j - 1
        while i >= lo:
            comps += 1
            if a[i] > key:
                a[i + 1] = a[i]
                moves += 1
                i -= 1
            else:
                break
        a[i + 1] = key
        moves += 1
    return comps, moves


@njit(**_opts)
def _merge(a, tmp, lo, hi):
    if hi - lo <= 1:
        return 0, 0
    mid = lo + (hi - lo) // 2
    c1, m1 = _merge(a, tmp, lo, mid)
    c2, m2 = _merge(a, tmp, mid, hi)
    comps = c1 + c2
    i = lo
    j = mid
    o = lo
    while i < mid and j < hi:
        comps += 1
        if a[j] < a[i]:
            tmp[o] = a[j]
            j += 1
        else:
            tmp[o] = a[i]
            i += 1
        o += 1
    while i < mid:
        tmp[o] = a[i]
        i += 1
        o += 1
    while j < hi:
        tmp[o] = a[j]
        j += 1
        o += 1
    for p in range(lo, hi):
        a[p] = tmp[p]
    return comps, m1 + m2 + (hi - lo)


@njit(**_opts)
def bucket_cost(n, variant, base, t0, t1):
    """Bucket Sort cost per trial on the keys of the occupancy stream.

    ``variant`` 0 = insertion sort inside buckets, 1 = merge sort.
    """
    m = t1 - t0
    comps = np.zeros(m, dtype=np.int64)
    moves = np.zeros(m, dtype=np.int64)
    f = np.zeros(m, dtype=np.int64)
    keys = np.zeros(n, dtype=np.float64)
    bidx = np.zeros(n, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    start = np.zeros(n + 1, dtype=np.int64)
    a = np.zeros(n, dtype=np.float64)
    tmp = np.zeros(n, dtype=np.float64)
    for r in range(m):
        tkey = combine(base, t0 + r)
        counts[:] = 0
        for b in range(n):
            u = uniform(tkey, b)
            keys[b] = u
            j = int(u * n)
            if j > n - 1:
                j = n - 1
            bidx[b] = j
            counts[j] += 1
        start[0] = 0
        fs = 0
        for j in range(n):
            start[j + 1] = start[j] + counts[j]
            fs += counts[j] * counts[j]
        fill = start.copy()
        for b in range(n):
            j = bidx[b]
            a[fill[j]] = keys[b]
            fill[j] += 1
        c = 0
        mv = 2 * n
        for j in range(n):
            if counts[j] > 1:
                if variant == 0:
                    cc, mm = _insertion(a, start[j], start[j + 1])
                else:
                    cc, mm = _merge(a, tmp, start[j], start[j + 1])
                c += cc
                mv += mm
        comps[r] = c
        moves[r] = mv
        f[r] = fs
    return comps, moves, f


@njit(**_opts)
def quicksort_stats(n, depth, base, t0, t1):
    """Per trial: comparisons, moves, and whether the left half of depth-``depth`` is empty."""
    m = t1 - t0
    comps = np.zeros(m, dtype=np.int64)
    moves = np.zeros(m, dtype=np.int64)
    zflag = np.zeros(m, dtype=np.int64)
    a = np.zeros(n, dtype=np.float64)
    tmp = np.zeros(n, dtype=np.float64)
    st_lo = np.zeros(2 * n + 2, dtype=np.int64)
    st_hi = np.zeros(2 * n + 2, dtype=np.int64)
    st_lv = np.zeros(2 * n + 2, dtype=np.int64)
    st_nd = np.zeros(2 * n + 2, dtype=np.int64)
    counts = np.zeros(1 << depth, dtype=np.int64)
    for r in range(m):
        tkey = combine(base, t0 + r)
        kkey = combine(tkey, 0)
        pkey = combine(tkey, 1)
        for b in range(n):
            a[b] = uniform(kkey, b)
        counts[:] = 0
        draws = 0
        c = 0
        mv = 0
        top = 0
        st_lo[0] = 0
        st_hi[0] = n
        st_lv[0] = 0
        st_nd[0] = 0
        top = 1
        while top > 0:
            top -= 1
            lo = st_lo[top]
            hi = st_hi[top]
            lv = st_lv[top]
            nd = st_nd[top]
            size = hi - lo
            if lv == depth:
                counts[nd] = size
            if size == 0:
                continue
            if size == 1:
                mv += 1
                continue
            p = int(uniform(pkey, draws) * size)
            if p > size - 1:
                p = size - 1
            draws += 1
            pivot = a[lo + p]
            ns = 0
            for q in range(lo, hi):
                if q - lo != p and a[q] < pivot:
                    tmp[ns] = a[q]
                    ns += 1
            o = ns + 1
            for q in range(lo, hi):
                if q - lo != p and not (a[q] < pivot):
                    tmp[o] = a[q]
                    o += 1
            tmp[ns] = pivot
            for q in range(size):
                a[lo + q] = tmp[q]
            c += size - 1
            mv += size
            # node ids are only tracked down to ``depth``
            child = 2 * nd if lv < depth else 0
            # right first so the smaller side is processed first (preorder)
            st_lo[top] = lo + ns + 1
            st_hi[top] = hi
            st_lv[top] = lv + 1
            st_nd[top] = child + 1 if lv < depth else 0
            top += 1
            st_lo[top] = lo
            st_hi[top] = lo + ns
            st_lv[top] = lv + 1
            st_nd[top] = child
            top += 1
        comps[r] = c
        moves[r] = mv
        z = 1
        if depth == 0:
            z = 0
        for j in range((1 << depth) // 2):
            if counts[j] != 0:
                z = 0
                break
        zflag[r] = z
    return comps, moves, zflag
