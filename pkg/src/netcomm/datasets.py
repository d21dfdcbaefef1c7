"""Bundled example datasets."""

from __future__ import annotations

from importlib import resources

from netcomm.graph import Graph, load_matrix_market

__all__ = ["karate_club"]


def karate_club() -> Graph:
    """Zachary's karate club network: 34 nodes, 78 edges, standard labeling."""
    ref = resources.files("netcomm.data").joinpath("karate.mtx")
    with ref.open("rb") as fh:
        return load_matrix_market(fh)
