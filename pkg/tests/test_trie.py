import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_minimal_prefixes, trie_leaf_depths
from tailsort import kernels, rng
from tailsort.errors import DepthCapExceeded
from tailsort.occupancy import f_stat, g_stat
from tailsort.trie import (
    StringSet,
    adversarial_shared_prefix,
    default_k,
    delta_trace,
    excess_path_length,
    external_path_length,
    lcp,
    minimal_prefix_lengths,
    node_occupancy,
    shared_prefix_length,
)


def forced(*patterns, seed=0, cap=4096):
    return StringSet(len(patterns), seed, dict(enumerate(patterns)), depth_cap=cap)


def test_lcp_forced_examples():
    L = forced("0000", "0001")
    assert lcp(L, 0, 1) == 3
    L = forced("0", "1")
    assert lcp(L, 0, 1) == 0
    with pytest.raises(ValueError):
        lcp(L, 1, 1)


def test_lcp_random_pairs():
    m, t = 10**6, 10
    base = rng.combine(17, 99)
    streams = rng.combine_array(np.uint64(base), np.arange(2 * m, dtype=np.uint64)).reshape(m, 2)
    w = rng.combine_array(streams, np.uint64(0))
    x = w[:, 0] ^ w[:, 1]
    hits = np.count_nonzero(x < np.uint64(1 << (64 - t)))
    p = 2.0**-t
    assert abs(hits / m - p) <= 3 * math.sqrt(p * (1 - p) / m)


def test_minimal_prefix_examples():
    L = forced("0000", "0001", "1")
    assert list(minimal_prefix_lengths(L, 0).lengths) == [4, 4, 1]
    assert minimal_prefix_lengths(L, 0).total == 9
    assert list(minimal_prefix_lengths(L, 2).lengths) == [4, 4, 2]
    assert excess_path_length(L, 2) == 4

    B = forced("00", "01", "10", "11")
    assert list(minimal_prefix_lengths(B, 2).lengths) == [2, 2, 2, 2]
    assert excess_path_length(B, 2) == 0
    assert list(node_occupancy(B, 2)) == [1, 1, 1, 1]
    assert list(node_occupancy(B, 0)) == [4]


def test_singleton_needs_no_bits():
    L = StringSet(1, 5)
    assert external_path_length(L) == 0
    assert list(minimal_prefix_lengths(L, 3).lengths) == [3]


@settings(max_examples=40)
@given(st.lists(st.text("01", min_size=1, max_size=5), min_size=1, max_size=4, unique=True), st.integers(0, 3))
def test_characterization_matches_brute_force_minimum(patterns, k):
    # pad with a separating tail so the forced strings are distinct and finite for the search
    L = StringSet(len(patterns), 7, dict(enumerate(patterns)))
    longest = max(
        [1 + lcp(L, a, b) for a in range(L.n) for b in range(L.n) if a != b] + [k]
    )
    finite = [L.prefix(i, longest) for i in range(L.n)]
    assert list(minimal_prefix_lengths(L, k).lengths) == brute_minimal_prefixes(finite, k)


@pytest.mark.parametrize("n", [8, 64])
def test_sorted_neighbour_method_matches_explicit_trie(n):
    for seed in range(1000 if n == 8 else 300):
        L = StringSet(n, seed)
        depths = trie_leaf_depths(L.bit, n)
        got = minimal_prefix_lengths(L, 0).lengths
        assert list(got) == depths
        k = default_k(n)
        assert list(minimal_prefix_lengths(L, k).lengths) == [max(k, d) for d in depths]


@settings(max_examples=60)
@given(st.sampled_from([2, 4, 8, 16, 32]), st.integers(0, 2**63))
def test_per_sample_chain(n, seed):
    L = StringSet(n, seed)
    k = default_k(n)
    p0 = external_path_length(L)
    pk = excess_path_length(L, k)
    occ = node_occupancy(L, k)
    assert p0 >= n * math.log2(n)
    assert pk >= g_stat(occ) - 1e-9
    assert p0 <= n * math.log2(n) + pk
    assert g_stat(occ) <= f_stat(occ)


@settings(max_examples=30)
@given(st.integers(2, 24), st.integers(0, 2**63), st.integers(0, 6))
def test_appending_bits_beyond_minimal_prefixes(n, seed, k):
    L = StringSet(n, seed)
    pl = minimal_prefix_lengths(L, k)
    extra = {i: L.prefix(i, int(pl.lengths[i]) + 5) for i in range(n)}
    L2 = StringSet(n, seed + 1, extra)
    assert list(minimal_prefix_lengths(L2, k).lengths) == list(pl.lengths)


def test_prefix_free_result():
    L = StringSet(40, 3)
    pl = minimal_prefix_lengths(L, 2)
    pre = [L.prefix(i, int(pl.lengths[i])) for i in range(L.n)]
    for a in range(L.n):
        for b in range(L.n):
            if a != b:
                assert not pre[b].startswith(pre[a])


def test_delta_trace_examples():
    L = forced("0000", "0001")
    tr = delta_trace(L, 0)
    assert list(tr.deltas) == [0, 8]
    assert tr.total == external_path_length(L)


@settings(max_examples=40)
@given(st.integers(1, 40), st.integers(0, 2**63), st.integers(0, 6))
def test_delta_trace_telescopes(n, seed, k):
    L = StringSet(n, seed)
    tr = delta_trace(L, k)
    assert (tr.deltas >= 0).all()
    assert tr.total == excess_path_length(L, k)
    for i in range(1, n + 1):
        sub = StringSet(i, seed)
        assert tr.deltas[:i].sum() == excess_path_length(sub, k)


def test_delta_mean_bounded():
    d = kernels.delta_batch(256, 8, 4242, 10**4)
    assert d.mean(axis=0).max() <= 32


def test_adversarial_construction():
    L = adversarial_shared_prefix(4, 2, seed=9)
    assert shared_prefix_length(4, 2) == 8
    assert lcp(L, 0, 1) == 8
    assert external_path_length(L) >= 20
    assert L.prefix(0, 8) == StringSet(4, 9).prefix(0, 8)


def test_random_sets_rarely_share_long_prefixes():
    n, c, m = 32, 2, 10**5
    length = shared_prefix_length(n, c)
    assert math.comb(n, 2) * 2.0**-length < 1e-15
    out = kernels.trie_batch(n, 0, -1, 606, m)
    # p_0 >= 2 (length + 1) would be needed for a pair sharing `length` bits
    longest = kernels.trie_batch(n, length, -1, 606, m)["pk"]
    assert np.count_nonzero(longest > 0) == 0
    assert out["p0"].min() >= n * math.log2(n)


def test_depth_cap_exceeded():
    pat = "01" * 31 + "1"  # 63 forced bits shared by both strings
    for seed in range(200):
        L = StringSet(2, seed, {0: pat, 1: pat}, depth_cap=64)
        try:
            lcp(L, 0, 1)
        except DepthCapExceeded:
            break
    else:
        pytest.fail("no seed pushed the common prefix past the cap")
    with pytest.raises(DepthCapExceeded):
        minimal_prefix_lengths(L, 0)
    with pytest.raises(DepthCapExceeded):
        delta_trace(L, 0)


def test_string_set_json_round_trip():
    L = adversarial_shared_prefix(5, 1.5, seed=3)
    again = StringSet.from_json(L.to_json())
    assert again == L
    assert json.loads(L.to_json())["forced_prefixes"]["0"] == L.forced_prefixes[0]
    assert [again.word(i, 0) for i in range(5)] == [L.word(i, 0) for i in range(5)]


def test_string_set_validation():
    with pytest.raises(ValueError):
        StringSet(0, 1)
    with pytest.raises(ValueError):
        StringSet(2, 1, {0: "012"})
    with pytest.raises(ValueError):
        StringSet(2, 1, {5: "01"})


@pytest.mark.parametrize("n", [1, 2, 5, 16, 33])
def test_trie_kernel_matches_library(n):
    k = default_k(n)
    depth = k if n & (n - 1) == 0 else -1
    out = kernels.trie_batch(n, k, depth, 55, 25)
    base = rng.combine(55, rng.TAG_TRIE)
    for t in range(25):
        L = StringSet(n, rng.combine(base, t))
        assert out["pk"][t] == excess_path_length(L, k)
        assert out["p0"][t] == external_path_length(L)
        if depth >= 0:
            occ = node_occupancy(L, depth)
            assert out["f"][t] == f_stat(occ)
            assert out["g"][t] == pytest.approx(g_stat(occ), abs=1e-9)


def test_delta_kernel_matches_library():
    out = kernels.delta_batch(12, 4, 8, 15)
    base = rng.combine(8, rng.TAG_TRIE)
    for t in range(15):
        L = StringSet(12, rng.combine(base, t))
        assert list(out[t]) == list(delta_trace(L, 4).deltas)
