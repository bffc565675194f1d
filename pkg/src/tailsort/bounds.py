"""Closed-form tail bounds, evaluated in log space.

The five Chernoff forms for a sum X of independent (or negatively
associated) indicators with mean at most ``mu``:

    ch1  Pr[X >= (1+d) mu] <= exp(-mu * f(d))                 d > 0
    ch2  Pr[X >= (1+d) mu] <= exp(-mu d^2 / 3)                0 < d <= 1
    ch3  Pr[X >= (1+d) mu] <= exp(-mu d / 3)                  d >= 1
    ch4  Pr[X >= (1+d) mu] <= exp(-mu d ln(d) / 2)            d >= e
    ch5  Pr[X <= (1-d) mu] <= exp(-mu d^2 / 3)                0 < d <= 1

with f(d) = (1+d) ln(1+d) - d. ch5 is the only lower-tail form.

Quick Sort's large-deviation tail (McDiarmid and Hayward) is
``n^(-2 eps (ln ln n - ln(1/eps) + O(log log log n)))``; the hidden term has no
stated constant, so it is not evaluated here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

VARIANTS = ("ch1", "ch2", "ch3", "ch4", "ch5")
UPPER_TAIL = ("ch1", "ch2", "ch3", "ch4")


@dataclass(frozen=True)
class BoundQuery:
    variant: str
    mu: float
    delta: float


def cramer_f(delta: float) -> float:
    """(1 + d) ln(1 + d) - d for d > -1."""
    if delta <= -1:
        raise DomainError("cramer_f is defined for delta > -1")
    return (1.0 + delta) * math.log1p(delta) - delta


# relative slack on closed domain edges, so a printed constant like 2.71828 still counts as e
EDGE_RTOL = 1e-6


def _at_least(d: float, edge: float) -> bool:
    return d >= edge * (1 - EDGE_RTOL)


def _at_most(d: float, edge: float) -> bool:
    return d <= edge * (1 + EDGE_RTOL)


def _check_domain(q: BoundQuery) -> None:
    if q.variant not in VARIANTS:
        raise DomainError(f"unknown variant {q.variant!r}")
    if not q.mu > 0:
        raise DomainError("mu must be positive")
    d = q.delta
    ok = {
        "ch1": d > 0,
        "ch2": 0 < d and _at_most(d, 1.0),
        "ch3": _at_least(d, 1.0),
        "ch4": _at_least(d, math.e),
        "ch5": 0 < d and _at_most(d, 1.0),
    }[q.variant]
    if not ok:
        raise DomainError(f"delta={d} outside the domain of {q.variant}")


def log_chernoff_bound(q: BoundQuery) -> float:
    _check_domain(q)
    mu, d = q.mu, q.delta
    if q.variant == "ch1":
        return -mu * cramer_f(d)
    if q.variant in ("ch2", "ch5"):
        return -mu * d * d / 3.0
    if q.variant == "ch3":
        return -mu * d / 3.0
    return -mu * d * math.log(d) / 2.0


def chernoff_bound(q: BoundQuery) -> float:
    return math.exp(log_chernoff_bound(q))


def excess_threshold(c: float, n: int) -> float:
    """Deviation (8c + 16) n at which the excess-path-length bound applies."""
    return (8.0 * c + 16.0) * n


def log_excess_tail_bound(c: float, n: int) -> float:
    if not c > 0:
        raise DomainError("c must be positive")
    return -((c - 1.0 - math.log(c)) / 4.0) * n


def excess_tail_bound(c: float, n: int) -> float:
    """exp(-((c - 1 - ln c) / 4) n), a bound on Pr[p_{log n} >= (8c + 16) n]."""
    return math.exp(log_excess_tail_bound(c, n))


def rate(p_hat: float) -> float:
    """-ln p; the rate of a tail with probability ``p_hat``."""
    if not 0 < p_hat <= 1:
        raise DomainError("rate needs 0 < p_hat <= 1")
    return 0.0 - math.log(p_hat)
