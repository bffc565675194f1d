"""Monte Carlo tail estimation, exact small-n oracles and distribution tests.

Trial ``t`` of any experiment draws only from keys derived from
``(master_seed, t)``, and successes are reduced by summation, so every result
is a pure function of (experiment, trials, seed).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from statistics import NormalDist

import numpy as np
from scipy import stats

from . import kernels, rng
from .errors import SizeError
from .trie import DEFAULT_DEPTH_CAP, default_k

KINDS = ("f_tail", "g_tail", "excess_tail", "p0_tail", "t_b2_tail", "t_blogb_tail", "qs_event_z")
TRIE_KINDS = ("excess_tail", "p0_tail")
EXACT_MAX_N = 12
_PILOT_SALT = 0x9170


@dataclass(frozen=True)
class Experiment:
    kind: str
    n: int
    threshold: float
    k: int | None = None
    depth: int | None = None
    c: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if not math.isfinite(self.threshold):
            raise ValueError("threshold must be finite")

    def to_record(self, trials: int, master_seed: int) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "k": self.k,
            "depth": self.depth,
            "threshold": self.threshold,
            "c": self.c,
            "m": trials,
            "master_seed": master_seed,
        }

    @classmethod
    def from_record(cls, record: dict) -> tuple["Experiment", int, int]:
        e = cls(
            kind=record["kind"],
            n=record["n"],
            threshold=record["threshold"],
            k=record.get("k"),
            depth=record.get("depth"),
            c=record.get("c"),
        )
        return e, record["m"], record["master_seed"]


@dataclass(frozen=True)
class TailEstimate:
    trials: int
    successes: int
    p_hat: float
    ci_low: float
    ci_high: float
    rate_hat: float
    censored: bool

    @property
    def rate_ci(self) -> tuple[float, float]:
        """(-ln ci_high, -ln ci_low); the upper end is inf when ci_low is 0."""
        lo = -math.log(self.ci_high) if self.ci_high > 0 else math.inf
        hi = -math.log(self.ci_low) if self.ci_low > 0 else math.inf
        return lo + 0.0, hi + 0.0


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("need at least one trial")
    z = NormalDist().inv_cdf(0.5 + level / 2)
    p = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))
    lo = max(0.0, center - half)
    hi = min(1.0, center + half)
    # guard rounding at the extremes so the interval always holds p
    return min(lo, p), max(hi, p)


def tail_estimate(successes: int, trials: int) -> TailEstimate:
    """Wilson 95% interval; with no successes, the rule-of-three bound 3/m and rate ln(m/3)."""
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    p = successes / trials
    lo, hi = wilson_interval(successes, trials)
    if successes == 0:
        hi = min(1.0, 3.0 / trials)
        return TailEstimate(trials, 0, 0.0, 0.0, hi, math.log(trials / 3.0), True)
    return TailEstimate(trials, successes, p, lo, hi, 0.0 - math.log(p), False)


def _k_for(e: Experiment) -> int:
    return default_k(e.n) if e.k is None else e.k


def _depth_for(e: Experiment) -> int:
    return default_k(e.n) if e.depth is None else e.depth


def sample_statistic(
    e: Experiment, trials: int, master_seed: int, threads: int = 1, depth_cap: int = DEFAULT_DEPTH_CAP
) -> np.ndarray:
    """The per-trial statistic whose upper tail ``e`` asks about."""
    kind, n = e.kind, e.n
    if kind in ("f_tail", "g_tail"):
        out = kernels.occupancy_batch(n, master_seed, trials, threads)
        return out["f"] if kind == "f_tail" else out["g"]
    if kind in TRIE_KINDS:
        out = kernels.trie_batch(n, _k_for(e), -1, master_seed, trials, threads, depth_cap)
        return out["pk"] if kind == "excess_tail" else out["p0"]
    if kind in ("t_b2_tail", "t_blogb_tail"):
        variant = "b2" if kind == "t_b2_tail" else "blogb"
        out = kernels.bucket_batch(n, variant, master_seed, trials, threads)
        return out["comparisons"] + out["moves"]
    out = kernels.quicksort_batch(n, _depth_for(e), master_seed, trials, threads)
    return out["event_z"]


def estimate_tail(
    e: Experiment, m: int, master_seed: int, threads: int = 1, depth_cap: int = DEFAULT_DEPTH_CAP
) -> TailEstimate:
    if m < 1:
        raise ValueError("m must be at least 1")
    values = sample_statistic(e, m, master_seed, threads, depth_cap)
    return tail_estimate(int(np.count_nonzero(values >= e.threshold)), m)


def pilot_mean(
    kind: str, n: int, trials: int, master_seed: int, threads: int = 1, k: int | None = None
) -> float:
    """Sample mean of the statistic on a stream independent of the tail runs."""
    e = Experiment(kind, n, 0.0, k=k)
    seed = rng.combine(master_seed, _PILOT_SALT)
    return float(np.mean(sample_statistic(e, trials, seed, threads)))


# -- exact oracle ------------------------------------------------------------


@dataclass(frozen=True)
class ExactDistribution:
    """Exact law of f over ``n`` uniform keys; ``counts[v]`` assignments out of ``n**n``."""

    n: int
    counts: dict

    @property
    def total(self) -> int:
        return self.n**self.n

    @property
    def support(self) -> dict:
        return {v: Fraction(c, self.total) for v, c in sorted(self.counts.items())}

    def mean(self) -> Fraction:
        return sum((Fraction(v * c, self.total) for v, c in self.counts.items()), Fraction(0))

    def tail(self, threshold) -> Fraction:
        """Pr[f >= threshold]."""
        return Fraction(sum(c for v, c in self.counts.items() if v >= threshold), self.total)

    def as_rationals(self) -> dict:
        """``{value: "count/n**n"}`` with the denominator left unreduced."""
        return {v: f"{c}/{self.total}" for v, c in sorted(self.counts.items())}


def exact_f_distribution(n: int) -> ExactDistribution:
    """Dynamic program over buckets: state (balls left, partial f) -> number of assignments."""
    if not 1 <= n <= EXACT_MAX_N:
        raise SizeError(f"exact oracle supports 1 <= n <= {EXACT_MAX_N}, got {n}")
    layer = {(n, 0): 1}
    for bucket in range(n):
        nxt: dict = {}
        last = bucket == n - 1
        for (left, partial), ways in layer.items():
            choices = (left,) if last else range(left + 1)
            for b in choices:
                key = (left - b, partial + b * b)
                nxt[key] = nxt.get(key, 0) + ways * math.comb(left, b)
        layer = nxt
    return ExactDistribution(n, {f: w for (left, f), w in sorted(layer.items()) if left == 0})


# -- distribution equality ---------------------------------------------------


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p_value: float
    cells: int


def merge_cells(a_counts: np.ndarray, b_counts: np.ndarray, min_expected: float = 5.0):
    """Merge adjacent support values until every expected count is at least ``min_expected``."""
    ra, rb = a_counts.sum(), b_counts.sum()
    total = ra + rb
    cells_a, cells_b = [], []
    acc_a = acc_b = 0
    for x, y in zip(a_counts, b_counts):
        acc_a += x
        acc_b += y
        col = acc_a + acc_b
        if min(ra, rb) * col / total >= min_expected:
            cells_a.append(acc_a)
            cells_b.append(acc_b)
            acc_a = acc_b = 0
    if acc_a or acc_b:
        if cells_a:
            cells_a[-1] += acc_a
            cells_b[-1] += acc_b
        else:
            cells_a.append(acc_a)
            cells_b.append(acc_b)
    return np.array(cells_a, dtype=np.int64), np.array(cells_b, dtype=np.int64)


def two_sample_chi_square(a: np.ndarray, b: np.ndarray) -> ChiSquareResult:
    a = np.asarray(a)
    b = np.asarray(b)
    support = np.union1d(a, b)
    ca = np.searchsorted(support, a)
    cb = np.searchsorted(support, b)
    ha = np.bincount(ca, minlength=len(support))
    hb = np.bincount(cb, minlength=len(support))
    ha, hb = merge_cells(ha, hb)
    k = len(ha)
    if k < 2:
        return ChiSquareResult(0.0, 0, 1.0, k)
    table = np.vstack([ha, hb]).astype(np.float64)
    expected = table.sum(axis=1, keepdims=True) * table.sum(axis=0, keepdims=True) / table.sum()
    statistic = float(((table - expected) ** 2 / expected).sum())
    df = k - 1
    return ChiSquareResult(statistic, df, float(stats.chi2.sf(statistic, df)), k)


def skewed_occupancy_f(n: int, trials: int, master_seed: int, bias: float = 0.55) -> np.ndarray:
    """f of depth-log2 n node occupancy when every string's first bit is 1 w.p. ``bias``.

    A deliberately broken generator for power checks of the equality test.
    """
    depth = default_k(n)
    keys = rng.trial_keys(master_seed, rng.TAG_SKEW, 0, trials)
    idx = np.arange(n, dtype=np.uint64)
    w = rng.combine_array(keys[:, None], idx[None, :])
    low = (w >> np.uint64(64 - depth + 1)).astype(np.int64) if depth > 1 else np.zeros(w.shape, np.int64)
    top = (rng.uniform_array(keys[:, None], idx[None, :] + np.uint64(n)) < bias).astype(np.int64)
    node = (top << (depth - 1)) | low
    flat = node + (np.arange(trials, dtype=np.int64) * n)[:, None]
    counts = np.bincount(flat.ravel(), minlength=trials * n).reshape(trials, n)
    return (counts * counts).sum(axis=1)


def distribution_equality_test(
    n: int, m: int, master_seed: int, threads: int = 1, arm_b: str = "trie", depth_cap: int = DEFAULT_DEPTH_CAP
) -> ChiSquareResult:
    """Two-sample chi-square test of f(bucket occupancy) against f of a second arm.

    ``arm_b`` is ``"trie"`` (depth-log2 n trie node occupancy), ``"bucket"``
    (a second, independent bucket stream) or ``"skewed"`` (biased first bit).
    """
    if n < 1 or n & (n - 1):
        raise ValueError("n must be a power of two")
    a = kernels.occupancy_batch(n, master_seed, m, threads)["f"]
    if arm_b == "trie":
        b = kernels.trie_batch(n, default_k(n), default_k(n), master_seed, m, threads, depth_cap)["f"]
    elif arm_b == "bucket":
        b = kernels.occupancy_batch(n, master_seed, m, threads, tag=rng.TAG_NULL_ARM)["f"]
    elif arm_b == "skewed":
        b = skewed_occupancy_f(n, m, master_seed)
    else:
        raise ValueError(f"unknown arm {arm_b!r}")
    return two_sample_chi_square(a, b)


# -- scans -------------------------------------------------------------------

ANALYTIC_MEANS = {"f_tail": lambda n: 2.0 * n - 1.0}


def rate_scan(
    kind: str,
    n_list,
    c: float,
    m: int,
    master_seed: int,
    threads: int = 1,
    pilot_factor: int = 10,
    k: int | None = None,
) -> list[dict]:
    """Tail rate at threshold mu + c n for each n, with two normalizations.

    mu is 2n - 1 for f and a pilot sample mean (``pilot_factor * m`` trials on an
    independent stream) for every other statistic.
    """
    rows = []
    for n in n_list:
        if kind in ANALYTIC_MEANS:
            mu = ANALYTIC_MEANS[kind](n)
            pilot = False
        else:
            mu = pilot_mean(kind, n, pilot_factor * m, master_seed, threads, k)
            pilot = True
        e = Experiment(kind, n, mu + c * n, k=k, c=c)
        est = estimate_tail(e, m, master_seed, threads)
        lg = math.log2(n) if n > 1 else 0.0
        sq = math.sqrt(n) * lg
        rate_lo, rate_hi = est.rate_ci
        rows.append(
            {
                "kind": kind,
                "n": n,
                "c": c,
                "mu": mu,
                "pilot_mean": pilot,
                "threshold": e.threshold,
                "trials": m,
                "successes": est.successes,
                "p_hat": est.p_hat,
                "ci_low": est.ci_low,
                "ci_high": est.ci_high,
                "rate_hat": est.rate_hat,
                "rate_ci_low": rate_lo,
                "rate_ci_high": rate_hi,
                "rate_per_sqrt_n_log_n": est.rate_hat / sq if sq > 0 else math.nan,
                "rate_per_n": est.rate_hat / n,
                "censored": est.censored,
            }
        )
    return rows


@dataclass
class DeltaDominationReport:
    n: int
    k: int
    runs: int
    pooled: int
    mean_excess: float
    max_delta: int
    rows: list = field(default_factory=list)

    @property
    def flagged(self) -> list:
        return [r["tau"] for r in self.rows if r["flagged"]]


def delta_domination_experiment(
    n: int, k: int | None, m: int, master_seed: int, threads: int = 1, tau_max: int = 8,
    depth_cap: int = DEFAULT_DEPTH_CAP,
) -> DeltaDominationReport:
    """Pooled frequencies of Delta >= 16 (tau + 2) against 2^-tau."""
    if k is None:
        k = default_k(n)
    deltas = kernels.delta_batch(n, k, master_seed, m, threads, depth_cap)
    pooled = deltas.ravel()
    total = pooled.size
    report = DeltaDominationReport(
        n, k, m, total, float(deltas.sum(axis=1).mean()), int(pooled.max(initial=0))
    )
    for tau in range(tau_max + 1):
        level = 16 * (tau + 2)
        hits = int(np.count_nonzero(pooled >= level))
        freq = hits / total
        bound = 2.0**-tau
        se = math.sqrt(bound * (1 - bound) / total)
        report.rows.append(
            {
                "tau": tau,
                "level": level,
                "hits": hits,
                "frequency": freq,
                "bound": bound,
                "std_error": se,
                "flagged": freq > bound + 3 * se,
            }
        )
    return report
