"""Brute-force series oracles built on exact integer walk counts.

These exist for the test surface: slow, transparent implementations that the
Krylov machinery is checked against. Walk counts are exact arbitrary-
precision integers (entry [k][i][j] of a :class:`WalkTable` is the number of
length-k walks from i to j); floating point enters only when a count is
divided by k! or scaled by alpha^k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from netcomm.graph import Graph

__all__ = ["WalkTable", "walk_table", "truncated_exp_series", "truncated_resolvent_series"]

_SIZE_CAP = 200


@dataclass(frozen=True)
class WalkTable:
    """counts[k][i][j] = number of length-k walks from i to j, exact ints."""

    counts: list[list[list[int]]]
    k_max: int

    def power(self, k: int) -> list[list[int]]:
        """A^k as nested lists of Python ints."""
        if not 0 <= k <= self.k_max:
            raise ValueError(f"walk length {k} outside tabulated range 0..{self.k_max}")
        return self.counts[k]


def walk_table(g: Graph, k_max: int) -> WalkTable:
    """Tabulate A^0 .. A^k_max by exact neighbor-sum propagation."""
    if g.n > _SIZE_CAP:
        raise ValueError(f"walk counting capped at n <= {_SIZE_CAP}, got n = {g.n}")
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    n = g.n
    nbrs = [list(map(int, g.neighbors(i))) for i in range(n)]
    counts: list[list[list[int]]] = [[[1 if i == j else 0 for j in range(n)] for i in range(n)]]
    for _ in range(k_max):
        prev = counts[-1]
        nxt = [[sum(prev[t][j] for t in nbrs[i]) for j in range(n)] for i in range(n)]
        counts.append(nxt)
    return WalkTable(counts=counts, k_max=k_max)


def truncated_exp_series(g: Graph, k_max: int) -> np.ndarray:
    """Partial sum of the walk series I + A + A^2/2! + ... + A^k_max/k_max!."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    table = walk_table(g, k_max)
    n = g.n
    out = np.zeros((n, n), dtype=np.float64)
    for k in range(k_max + 1):
        fact = math.factorial(k)
        ak = table.counts[k]
        for i in range(n):
            row = ak[i]
            for j in range(n):
                if row[j]:
                    # int/int division rounds once, keeping huge counts exact
                    out[i, j] += row[j] / fact
    return out


def truncated_resolvent_series(g: Graph, alpha: float, k_max: int) -> np.ndarray:
    """Partial geometric series I + alpha*A + alpha^2 A^2 + ... up to k_max.

    Requires alpha * lambda_1 < 1, the condition under which the full series
    converges to the resolvent inverse.
    """
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if g.n > _SIZE_CAP:
        raise ValueError(f"series capped at n <= {_SIZE_CAP}, got n = {g.n}")
    if alpha > 0 and g.n:
        lam1 = float(np.linalg.eigvalsh(g.adjacency().toarray())[-1])
        if alpha * lam1 >= 1.0:
            raise ValueError(
                f"series diverges: alpha*lambda_1 = {alpha * lam1:.4f} >= 1"
            )
    table = walk_table(g, k_max)
    n = g.n
    out = np.zeros((n, n), dtype=np.float64)
    for k in range(k_max + 1):
        scale = alpha**k
        if scale == 0.0 and k > 0:
            break
        ak = table.counts[k]
        for i in range(n):
            row = ak[i]
            for j in range(n):
                if row[j]:
                    out[i, j] += row[j] * scale
    return out
