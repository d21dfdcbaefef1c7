"""Similarity metrics between node rankings.

Two complementary views: Pearson correlation of rank positions (global
agreement over all nodes, or within an agreed top set) and the intersection
distance, a prefix-set measure that weighs disagreement near the top more
heavily. Correlations restricted to a top percentage are undefined when the
two rankings do not even agree on which nodes make up the top set; that case
is reported as None (rendered ``--`` in tables) rather than a number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from netcomm.centrality import Ranking

__all__ = [
    "RankComparison",
    "intersection_distance",
    "isim_curve",
    "rank_correlation",
    "top_percent_correlation",
    "top_k_correlation",
    "percent_cutoff",
    "compare_rankings",
]


@dataclass(frozen=True)
class RankComparison:
    """Bundle of similarity metrics between two rankings.

    cc_top and isim_top are keyed by the requested percentage; a None
    correlation means the two top sets differed. isim_curve, when present,
    holds isim_k for every k = 1..n.
    """

    cc_full: float
    cc_top: dict[float, float | None]
    isim_full: float
    isim_top: dict[float, float]
    isim_curve: np.ndarray | None = None


def _check_pair(x: Ranking, y: Ranking) -> int:
    if x.n != y.n:
        raise ValueError(f"rankings cover {x.n} and {y.n} nodes; node sets must match")
    return x.n


def percent_cutoff(n: int, p: float) -> int:
    """Top-p% prefix length: ceil(p*n/100), at least 1."""
    if not 0.0 < p <= 100.0:
        raise ValueError("percentage must lie in (0, 100]")
    return max(1, math.ceil(p * n / 100.0))


def isim_curve(x: Ranking, y: Ranking) -> np.ndarray:
    """Intersection distance at every prefix length k = 1..n.

    Entry k-1 is (1/k) * sum_{i=1..k} |X_i symdiff Y_i| / (2i) where X_i, Y_i
    are the top-i node sets. Runs in O(n) by updating the symmetric
    difference incrementally.
    """
    n = _check_pair(x, y)
    in_x: set[int] = set()
    in_y: set[int] = set()
    delta = 0
    acc = 0.0
    out = np.empty(n, dtype=np.float64)
    for i in range(1, n + 1):
        a = int(x.order[i - 1])
        b = int(y.order[i - 1])
        in_x.add(a)
        delta += -1 if a in in_y else 1
        in_y.add(b)
        delta += -1 if b in in_x else 1
        acc += delta / (2.0 * i)
        out[i - 1] = acc / i
    return out


def intersection_distance(x: Ranking, y: Ranking, k: int) -> float:
    """Intersection distance between the top-k prefixes of two rankings.

    0 when the rankings list identical prefixes at every depth up to k,
    1 when the top-k sequences are entirely disjoint.
    """
    n = _check_pair(x, y)
    if not 1 <= k <= n:
        raise ValueError(f"cutoff {k} out of range 1..{n}")
    in_x: set[int] = set()
    in_y: set[int] = set()
    delta = 0
    acc = 0.0
    for i in range(1, k + 1):
        a = int(x.order[i - 1])
        b = int(y.order[i - 1])
        in_x.add(a)
        delta += -1 if a in in_y else 1
        in_y.add(b)
        delta += -1 if b in in_x else 1
        acc += delta / (2.0 * i)
    return acc / k


def rank_correlation(x: Ranking, y: Ranking) -> float:
    """Pearson correlation between the two rank-position vectors.

    Each node contributes the pair (position in x, position in y); since
    positions are a permutation of 0..n-1, this is a Spearman-type statistic
    on the deterministic tie-broken positions.
    """
    n = _check_pair(x, y)
    if n < 2:
        raise ValueError("correlation undefined for fewer than 2 nodes")
    return float(np.corrcoef(x.positions(), y.positions())[0, 1])


def top_k_correlation(x: Ranking, y: Ranking, k: int) -> float | None:
    """Pearson correlation of positions within the top-k set, or None.

    None when the two rankings disagree about which k nodes form the top set
    (the within-set positions would not be comparable). k = 1 with equal top
    nodes gives 1.0 by convention.
    """
    n = _check_pair(x, y)
    if not 1 <= k <= n:
        raise ValueError(f"cutoff {k} out of range 1..{n}")
    top_x = x.order[:k]
    top_y = y.order[:k]
    if set(map(int, top_x)) != set(map(int, top_y)):
        return None
    if k == 1:
        return 1.0
    pos_y = {int(node): i for i, node in enumerate(top_y)}
    within_y = np.array([pos_y[int(node)] for node in top_x], dtype=np.float64)
    return float(np.corrcoef(np.arange(k, dtype=np.float64), within_y)[0, 1])


def top_percent_correlation(x: Ranking, y: Ranking, p: float) -> float | None:
    """top_k_correlation at the top-p% cutoff ceil(p*n/100)."""
    return top_k_correlation(x, y, percent_cutoff(_check_pair(x, y), p))


def compare_rankings(
    x: Ranking,
    y: Ranking,
    percents: tuple[float, ...] = (10.0, 1.0),
    include_curve: bool = False,
) -> RankComparison:
    """All similarity metrics between two rankings at the given percentages."""
    n = _check_pair(x, y)
    curve = isim_curve(x, y)
    cc_top: dict[float, float | None] = {}
    isim_top: dict[float, float] = {}
    for p in percents:
        k = percent_cutoff(n, p)
        cc_top[p] = top_k_correlation(x, y, k)
        isim_top[p] = float(curve[k - 1])
    return RankComparison(
        cc_full=rank_correlation(x, y),
        cc_top=cc_top,
        isim_full=float(curve[n - 1]),
        isim_top=isim_top,
        isim_curve=curve if include_curve else None,
    )
