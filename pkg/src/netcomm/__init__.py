"""Communicability-based centrality for sparse undirected networks.

Core surface:

- :mod:`netcomm.graph` — immutable CSR graph, ingestion, generators
- :mod:`netcomm.krylov` — Lanczos machinery: exp(A)v, quadrature, CG, eigs
- :mod:`netcomm.centrality` — node scores and whole-network indices
- :mod:`netcomm.compare` — ranking similarity metrics
- :mod:`netcomm.reference` — exact walk-count series oracles
- :mod:`netcomm.service` — FastAPI app exposing the above
- :mod:`netcomm.cli` — command-line client
"""

from netcomm.graph import Graph, GraphFormatError

__all__ = ["Graph", "GraphFormatError", "__version__"]

__version__ = "0.1.0"
