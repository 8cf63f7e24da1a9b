"""Independent reference implementations used to cross-check the fast paths.

Everything here is deliberately naive: dense linear algebra, exact rational
arithmetic or plain recursion.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def dense_matrix(diag, hopping: float = 1.0) -> np.ndarray:
    d = np.asarray(diag, dtype=float)
    n = d.size
    return np.diag(d) + hopping * (np.eye(n, k=1) + np.eye(n, k=-1))


def dense_eigenvalues(diag, hopping: float = 1.0) -> np.ndarray:
    """Eigenvalues with -inf for singular sites (Dirichlet split)."""
    d = np.asarray(diag, dtype=float)
    sing = np.isneginf(d)
    out = [-math.inf] * int(sing.sum())
    idx = np.flatnonzero(sing)
    edges = [-1] + list(idx) + [d.size]
    for a, b in zip(edges, edges[1:]):
        if b > a + 1:
            out.extend(np.linalg.eigvalsh(dense_matrix(d[a + 1:b], hopping)))
    return np.sort(np.array(out))


def dense_count(diag, E, hopping: float = 1.0) -> int:
    return int(np.count_nonzero(dense_eigenvalues(diag, hopping) < E))


def dense_logdet(diag, E, hopping: float = 1.0):
    d = np.asarray(diag, dtype=float)
    return np.linalg.slogdet(dense_matrix(d, hopping) - E * np.eye(d.size))


def dense_green(diag, E, i, j, hopping: float = 1.0) -> float:
    d = np.asarray(diag, dtype=float)
    rhs = np.zeros(d.size)
    rhs[j] = 1.0
    return float(np.linalg.solve(dense_matrix(d, hopping) - E * np.eye(d.size), rhs)[i])


def exact_orbit(x: Fraction, p: int, q: int, n: int) -> list[Fraction]:
    a = Fraction(p, q)
    return [(x + j * a) % 1 for j in range(n)]


def fibonacci(k: int) -> int:
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def brute_choose_scale(n: int, denominators) -> tuple[int, int, int]:
    """Scan every denominator and every s; same tie-break as the fast path."""
    best = None
    for q in sorted(set(denominators)):
        if q > n:
            continue
        for s in range(1, n // q + 2):
            r = n - s * q
            if r * r <= n:
                key = (q, -abs(r), r)
                if best is None or key > best[0]:
                    best = (key, (q, s, r))
    return best[1]


def paths_recursive(intervals: dict, inner: tuple[int, int], m: int, mus: dict,
                    cutoff: float, weight: float = 0.0, prefix=()):
    """All terminating paths from m with weight <= cutoff, by plain recursion."""
    prefix = prefix + (m,)
    if not inner[0] <= m <= inner[1]:
        return [(prefix, weight)]
    n1, n2 = intervals[m]
    out = []
    for nxt in (n1 - 1, n2 + 1):
        w = weight + mus[m] * (abs(nxt - m) - 1)
        if w <= cutoff:
            out.extend(paths_recursive(intervals, inner, nxt, mus, cutoff, w, prefix))
    return out


def max_monic_at_points(roots: np.ndarray, points: np.ndarray) -> np.ndarray:
    """max_j |prod_i (x_j - z_i)| for each row of roots."""
    vals = np.prod(points[None, :, None] - roots[:, None, :], axis=-1)
    return np.max(np.abs(vals), axis=-1)
