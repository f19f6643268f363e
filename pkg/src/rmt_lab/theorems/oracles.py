"""Exact reference values for small coordinate-row models and the
normal tail.

Rows of a coordinate model are ``sqrt(n) e_i`` with ``i`` uniform, so
``A*A = n diag(c_1, ..., c_n)`` where ``c_j`` counts how often coordinate
``j`` was drawn; every statistic of the singular values is a function of
the multinomial count vector.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np


def coupon_all_covered_probability(n: int, N: int) -> float:
    """``P{every coordinate drawn at least once}`` in ``N`` uniform draws
    from ``n``, by inclusion-exclusion in exact rational arithmetic."""
    total = sum(Fraction((-1) ** i * math.comb(n, i)) * Fraction(n - i, n) ** N
                for i in range(n + 1))
    return float(total)


def _compositions(N, n):
    """All count vectors ``(c_1..c_n)`` with sum ``N``."""
    for bars in combinations_with_replacement(range(N + 1), n - 1):
        edges = (0,) + bars + (N,)
        yield tuple(edges[i + 1] - edges[i] for i in range(n))


def coordinate_expected_max_deviation(n: int, N: int) -> float:
    """``E max_j |s_j(A) - sqrt(N)|`` for ``N`` coordinate rows in dimension
    ``n``, with ``s_j = sqrt(n c_j)``. Enumerates all compositions, so only
    for small ``n`` and ``N``."""
    if math.comb(N + n - 1, n - 1) > 2_000_000:
        raise ValueError("too many compositions for exact enumeration")
    log_total = N * math.log(n)
    acc = []
    root = math.sqrt(N)
    for c in _compositions(N, n):
        logp = math.lgamma(N + 1) - sum(math.lgamma(x + 1) for x in c) - log_total
        dev = max(abs(math.sqrt(n * x) - root) for x in c)
        acc.append(math.exp(logp) * dev)
    return math.fsum(acc)


def normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def normal_two_sided_tail(t: float) -> float:
    """``P{|g| > t}`` for a standard normal ``g``."""
    return math.erfc(t / math.sqrt(2.0))


def deviation_from_one_check(z):
    """For nonnegative ``Z``: ``E|Z^2-1| >= max(E|Z-1|, (E|Z-1|)^2)``.

    Holds for any distribution, in particular for the empirical one.
    Returns ``(E|Z^2-1|, E|Z-1|, holds)``.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("Z must be nonnegative")
    lhs = float(np.mean(np.abs(z * z - 1.0)))
    d = float(np.mean(np.abs(z - 1.0)))
    return lhs, d, lhs >= max(d, d * d) * (1 - 1e-12)
