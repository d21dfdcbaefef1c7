"""Shared fixtures: reference graphs, random corpora, dense helpers."""

from __future__ import annotations

import numpy as np
import pytest

from netcomm.datasets import karate_club
from netcomm.graph import (
    Graph,
    generate_pref,
    generate_reference,
    generate_smallw,
)


@pytest.fixture(scope="session")
def karate() -> Graph:
    return karate_club()


@pytest.fixture(scope="session")
def path3() -> Graph:
    return generate_reference("path", 3)


@pytest.fixture(scope="session")
def k2() -> Graph:
    return generate_reference("complete", 2)


@pytest.fixture(scope="session")
def k4() -> Graph:
    return generate_reference("complete", 4)


def empty_graph(n: int) -> Graph:
    return Graph.from_edge_arrays(n, np.array([], dtype=np.int64), np.array([], dtype=np.int64))


def loop_graph() -> Graph:
    """Triangle with a self-loop on node 0."""
    u = np.array([0, 0, 1, 0])
    v = np.array([1, 2, 2, 0])
    return Graph.from_edge_arrays(3, u, v)


def two_triangles() -> Graph:
    """Disconnected graph: two K3 components, degenerate lambda_1."""
    u = np.array([0, 0, 1, 3, 3, 4])
    v = np.array([1, 2, 2, 4, 5, 5])
    return Graph.from_edge_arrays(6, u, v)


def core_pendant_graph() -> Graph:
    """Dense K10 core plus 5 pendants on node 0: large spectral gap and a
    strict eigenvector peak (no automorphic ties at the top)."""
    edges = [(i, j) for i in range(10) for j in range(i + 1, 10)]
    edges += [(0, 10 + i) for i in range(5)]
    u = np.array([e[0] for e in edges])
    v = np.array([e[1] for e in edges])
    return Graph.from_edge_arrays(15, u, v)


def reference_corpus() -> dict[str, Graph]:
    return {
        "k2": generate_reference("complete", 2),
        "k4": generate_reference("complete", 4),
        "k6": generate_reference("complete", 6),
        "star10": generate_reference("star", 10),
        "path7": generate_reference("path", 7),
        "cycle12": generate_reference("cycle", 12),
        "ring40": generate_reference("ring_lattice", 40, 2),
    }


def random_corpus(max_n: int = 500) -> dict[str, Graph]:
    """Small random instances used by the oracle-equivalence suites."""
    out: dict[str, Graph] = {}
    for d, seed in ((1, 0), (2, 1), (3, 2)):
        n = 120 + 60 * d
        if n <= max_n:
            out[f"pref{n}d{d}"] = generate_pref(n, d, seed)
    for p, seed in ((0.0, 3), (0.1, 4), (0.3, 5)):
        out[f"smallw200p{p}"] = generate_smallw(200, 1, p, seed)
    return out


def dense_adjacency(g: Graph) -> np.ndarray:
    return g.adjacency().toarray()
