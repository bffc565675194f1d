import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from tailsort import kernels, rng
from tailsort.estimator import exact_f_distribution
from tailsort.occupancy import (
    OccupancyVector,
    bucketize,
    e_bound,
    f_stat,
    g_stat,
    pair_sum,
    s_counts,
    sample_occupancy,
    weighted_e_sum,
    weighted_s_sum,
)
from tailsort.sorting import uniform_keys

occupancies = st.lists(st.integers(0, 30), min_size=1, max_size=40)


def test_bucketize_examples():
    assert list(bucketize([0.0, 0.26, 0.30, 0.99])) == [1, 2, 0, 1]
    assert list(bucketize([0.42])) == [1]


def test_bucketize_first_bucket_mean():
    m = 10**5
    b0 = kernels.occupancy_batch(8, 4, m)  # only f/g/left are returned; use left half as a proxy below
    # E[B_0] = 1: count balls in bucket 0 directly from the streams
    base = rng.combine(4, rng.TAG_OCCUPANCY)
    keys = rng.combine_array(np.uint64(base), np.arange(m, dtype=np.uint64))
    u = rng.uniform_array(keys[:, None], np.arange(8, dtype=np.uint64)[None, :])
    first = (rng.bucket_index_array(u, 8) == 0).sum(axis=1)
    se = first.std(ddof=1) / math.sqrt(m)
    assert abs(first.mean() - 1.0) <= 3 * se
    assert b0["left"].mean() == pytest.approx(4.0, abs=0.05)


def test_sample_occupancy_matches_bucketize():
    for seed in range(20):
        assert sample_occupancy(13, seed) == bucketize(uniform_keys(13, seed))
    assert list(sample_occupancy(1, 5)) == [1]


def test_sample_occupancy_two_balls():
    m = 10**5
    f = kernels.occupancy_batch(2, 11, m)["f"]
    left = kernels.occupancy_batch(2, 11, m)["left"]
    # (2,0): left == 2, (1,1): f == 2, (0,2): left == 0 and f == 4
    observed = [np.count_nonzero(left == 2), np.count_nonzero(f == 2), np.count_nonzero((left == 0) & (f == 4))]
    p = stats.chisquare(observed, [m / 4, m / 2, m / 4]).pvalue
    assert p > 0.001


def test_sample_occupancy_f_law_n7():
    m = 10**6
    f = kernels.occupancy_batch(7, 21, m)["f"]
    dist = exact_f_distribution(7)
    values = sorted(dist.counts)
    observed = np.array([np.count_nonzero(f == v) for v in values], dtype=float)
    expected = np.array([dist.counts[v] / dist.total * m for v in values])
    assert observed.sum() == m
    # pool the sparse upper cells
    keep = expected >= 5
    obs, exp = observed[keep], expected[keep]
    if (~keep).any():
        obs[-1] += observed[~keep].sum()
        exp[-1] += expected[~keep].sum()
    assert stats.chisquare(obs, exp).pvalue > 0.001


def test_f_stat_examples():
    assert f_stat([3, 1, 0, 0]) == 10
    assert f_stat([1] * 9) == 9
    assert f_stat([9] + [0] * 8) == 81


def test_g_stat_examples():
    assert g_stat([1, 1, 1, 1]) == 0
    assert g_stat([4, 2, 1, 1]) == pytest.approx(10.0)


@given(occupancies)
def test_g_at_most_f(b):
    assert g_stat(b) <= f_stat(b)


def test_s_counts_examples():
    s = s_counts([2, 1, 0])
    assert list(s[:3]) == [2, 1, 0]
    s = s_counts([1] * 6)
    assert s[0] == 6 and not s[1:].any()
    assert pair_sum([2, 1, 0]) == 4 == weighted_s_sum([2, 1, 0])


@given(occupancies)
def test_double_counting_identity(b):
    assert pair_sum(b) == weighted_s_sum(b)
    s = s_counts(b)
    assert (np.diff(s) <= 0).all()


@given(st.integers(1, 64), st.integers(0, 2**63))
def test_f_from_s_counts(n, seed):
    b = sample_occupancy(n, seed)
    assert f_stat(b) == 2 * weighted_s_sum(b) - n
    assert s_counts(b).sum() == n


def test_e_bound_values():
    assert e_bound(1) == pytest.approx(math.e)
    assert e_bound(2) == pytest.approx(1.84726, abs=1e-5)
    assert e_bound(2) == pytest.approx((math.e / 2) ** 2, rel=1e-12)
    assert e_bound(10**6) == 0.0 or e_bound(10**6) < 1e-300
    with pytest.raises(ValueError):
        e_bound(0)


def test_weighted_e_sum_below_ten():
    total = weighted_e_sum(60)
    assert total == pytest.approx(9.798, abs=1e-3)
    assert total < 10
    tail = math.fsum(i * e_bound(i) for i in range(61, 400))
    assert tail < 1e-40


@pytest.mark.parametrize("n", [16, 256])
def test_mean_f_matches_2n_minus_1(n):
    f = kernels.occupancy_batch(n, 8, 2 * 10**5)["f"]
    se = f.std(ddof=1) / math.sqrt(len(f))
    assert abs(f.mean() - (2 * n - 1)) <= 3 * se


def test_s_i_expectation_bound():
    n, m = 256, 10**5
    base = rng.combine(3, rng.TAG_OCCUPANCY)
    keys = rng.combine_array(np.uint64(base), np.arange(m, dtype=np.uint64))
    sums = np.zeros(10)
    sq = np.zeros(10)
    step = 4096
    for a in range(0, m, step):
        u = rng.uniform_array(keys[a : a + step, None], np.arange(n, dtype=np.uint64)[None, :])
        idx = rng.bucket_index_array(u, n)
        rows = idx.shape[0]
        counts = np.bincount((idx + (np.arange(rows) * n)[:, None]).ravel(), minlength=rows * n).reshape(rows, n)
        s = np.stack([(counts >= i).sum(axis=1) for i in range(1, 11)], axis=1)
        sums += s.sum(axis=0)
        sq += (s.astype(float) ** 2).sum(axis=0)
    mean = sums / m
    se = np.sqrt((sq / m - mean**2) / m)
    for i in range(1, 11):
        assert mean[i - 1] <= n * e_bound(i) + 3 * se[i - 1]


def test_occupancy_vector_validation():
    with pytest.raises(ValueError):
        OccupancyVector(np.array([-1, 2]))
    with pytest.raises(ValueError):
        OccupancyVector(np.array([], dtype=np.int64))
    v = OccupancyVector([1, 2])
    assert v.n == 2 and v.balls == 3 and v == OccupancyVector(np.array([1, 2]))
