"""Sparse symmetric graph container, ingestion, and synthetic generators.

The central type is :class:`Graph`, an immutable unweighted undirected graph
held in CSR form. Everything downstream (matrix-vector products, Lanczos,
centrality scores) consumes this one representation. Construction goes
through :meth:`Graph.from_edge_arrays`, which symmetrizes, deduplicates and
sorts the edge set, so two graphs with the same edge set are bit-identical
regardless of input order.
"""

from __future__ import annotations

import hashlib
import io
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable

import numpy as np
import scipy.io
import scipy.sparse as sp

__all__ = [
    "Graph",
    "GraphFormatError",
    "load_matrix_market",
    "load_edge_list",
    "dump_edges",
    "generate_pref",
    "generate_smallw",
    "generate_reference",
    "parse_generator_spec",
    "generate_from_spec",
]

REFERENCE_KINDS = ("complete", "star", "path", "cycle", "ring_lattice")


class GraphFormatError(ValueError):
    """Raised when an input file or generator spec cannot be parsed."""


# =====================================================================
# Graph container
# =====================================================================


@dataclass(frozen=True)
class Graph:
    """Unweighted undirected graph in CSR layout.

    Attributes
    ----------
    indptr : ndarray of int64, shape (n + 1,)
        CSR row pointers.
    indices : ndarray of int64
        Column indices, sorted within each row. Every off-diagonal edge is
        stored twice (both directions); a self-loop is stored once.
    m : int
        Number of undirected edges; a self-loop counts as one edge.
    has_loops : bool
        Whether any self-loop is present.
    """

    indptr: np.ndarray
    indices: np.ndarray
    m: int
    has_loops: bool

    def __post_init__(self) -> None:
        self.indptr.flags.writeable = False
        self.indices.flags.writeable = False

    @property
    def n(self) -> int:
        """Number of nodes."""
        return len(self.indptr) - 1

    @cached_property
    def _csr(self) -> sp.csr_array:
        data = np.ones(len(self.indices), dtype=np.float64)
        return sp.csr_array((data, self.indices, self.indptr), shape=(self.n, self.n))

    def adjacency(self) -> sp.csr_array:
        """Adjacency matrix as a float64 scipy CSR array with unit entries."""
        return self._csr

    def degrees(self) -> np.ndarray:
        """Per-node degree as an int64 vector; a self-loop counts once."""
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        """Sorted neighbor ids of node ``i`` (includes ``i`` on a loop)."""
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    @cached_property
    def fingerprint(self) -> str:
        """12-hex-digit digest of (n, indptr, indices); stable graph identity."""
        h = hashlib.sha256()
        h.update(np.int64(self.n).tobytes())
        h.update(self.indptr.tobytes())
        h.update(self.indices.tobytes())
        return h.hexdigest()[:12]

    def canonical_edges(self) -> np.ndarray:
        """Edges as an (m, 2) int64 array with u <= v, sorted lexicographically."""
        u = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        v = self.indices
        keep = u <= v
        return np.column_stack((u[keep], v[keep]))

    @staticmethod
    def from_edge_arrays(n: int, u: Iterable[int], v: Iterable[int]) -> "Graph":
        """Build a graph from parallel endpoint arrays.

        Input edges may appear in any order and direction and may contain
        duplicates; the result is the canonical symmetrized, deduplicated
        form. Raises :class:`GraphFormatError` on out-of-range endpoints.

        Parameters
        ----------
        n : int
            Number of nodes (ids are 0..n-1).
        u, v : array-like of int
            Edge endpoints.
        """
        if n < 0:
            raise GraphFormatError("node count must be nonnegative")
        ua = np.asarray(list(u) if not isinstance(u, np.ndarray) else u, dtype=np.int64)
        va = np.asarray(list(v) if not isinstance(v, np.ndarray) else v, dtype=np.int64)
        if ua.shape != va.shape:
            raise GraphFormatError("endpoint arrays differ in length")
        if ua.size:
            lo = min(ua.min(), va.min())
            hi = max(ua.max(), va.max())
            if lo < 0 or hi >= n:
                bad = int(lo) if lo < 0 else int(hi)
                raise GraphFormatError(f"node index {bad} out of range 0..{n - 1}")
        # Symmetrize, then dedup via row-major edge keys. n^2 fits int64
        # comfortably for any graph this package targets.
        uu = np.concatenate((ua, va))
        vv = np.concatenate((va, ua))
        key = np.unique(uu * np.int64(n) + vv) if n > 0 else np.empty(0, np.int64)
        rows = key // n if n > 0 else key
        cols = key % n if n > 0 else key
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        np.cumsum(indptr, out=indptr)
        n_loops = int(np.count_nonzero(rows == cols))
        m = (len(key) - n_loops) // 2 + n_loops
        return Graph(indptr=indptr, indices=cols, m=m, has_loops=n_loops > 0)


# =====================================================================
# Serialization
# =====================================================================


def dump_edges(g: Graph) -> str:
    """Canonical edge dump: sorted ``u v`` lines, 0-based, u <= v.

    Self-loops appear as ``u u``. Note the format carries no node count, so
    isolated nodes above the largest referenced id are not representable.
    """
    pairs = g.canonical_edges()
    return "".join(f"{u} {v}\n" for u, v in pairs)


def load_edge_list(source: str | os.PathLike | IO, base: int = 0) -> Graph:
    """Read a whitespace-separated ``u v`` edge list.

    Parameters
    ----------
    source : path or file-like
        Path to the file, or an open text/binary stream, or a string of
        edge-list content when it contains a newline.
    base : {0, 1}
        Index base of the node ids in the file.

    Returns
    -------
    Graph
        Canonical graph over nodes 0..max(id)-base. Duplicate edges and both
        orientations collapse to one undirected edge. Lines starting with
        ``#`` and blank lines are skipped.
    """
    if base not in (0, 1):
        raise GraphFormatError("base must be 0 or 1")
    text = _read_text(source)
    us: list[int] = []
    vs: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer node id in {line!r}") from None
        a -= base
        b -= base
        if a < 0 or b < 0:
            raise GraphFormatError(f"line {lineno}: node id below base {base}")
        us.append(a)
        vs.append(b)
    n = max(max(us, default=-1), max(vs, default=-1)) + 1
    return Graph.from_edge_arrays(n, us, vs)


def load_matrix_market(source: str | os.PathLike | IO) -> Graph:
    """Read a Matrix Market coordinate file as an undirected graph.

    Accepts pattern/real/integer fields with symmetric or general symmetry.
    Values are discarded (any stored entry is an edge); self-loops are kept.
    A general-symmetry file whose nonzero pattern is not symmetric is
    rejected, naming the first offending entry.
    """
    data = _read_bytes(source)
    buf = io.BytesIO(data)
    try:
        nrows, ncols, _, fmt, fieldkind, symm = scipy.io.mminfo(buf)
    except Exception as exc:
        raise GraphFormatError(f"not a readable Matrix Market file: {exc}") from None
    if fmt != "coordinate":
        raise GraphFormatError("only coordinate (sparse) Matrix Market files are supported")
    if fieldkind not in ("pattern", "real", "integer"):
        raise GraphFormatError(f"unsupported Matrix Market field {fieldkind!r}")
    if symm not in ("symmetric", "general"):
        raise GraphFormatError(f"unsupported Matrix Market symmetry {symm!r}")
    if nrows != ncols:
        raise GraphFormatError(f"matrix is {nrows}x{ncols}, not square")
    buf.seek(0)
    try:
        mat = scipy.io.mmread(buf)
    except Exception as exc:
        raise GraphFormatError(f"malformed Matrix Market body: {exc}") from None
    coo = sp.coo_array(mat)
    if symm == "general":
        pattern = sp.csr_array(
            (np.ones(len(coo.row), dtype=np.int8), (coo.row, coo.col)), shape=(nrows, ncols)
        )
        pattern.sum_duplicates()
        diff = (pattern != pattern.T).multiply(pattern).tocoo()
        if diff.nnz:
            at = np.lexsort((diff.col, diff.row))[0]
            i, j = int(diff.row[at]), int(diff.col[at])
            raise GraphFormatError(
                f"general matrix has asymmetric pattern: entry ({i + 1}, {j + 1}) "
                f"has no ({j + 1}, {i + 1}) counterpart"
            )
    return Graph.from_edge_arrays(nrows, coo.row, coo.col)


def _read_text(source: str | os.PathLike | IO) -> str:
    if hasattr(source, "read"):
        raw = source.read()
        return raw.decode() if isinstance(raw, bytes) else raw
    if isinstance(source, str) and "\n" in source:
        return source
    with open(source, "r", encoding="utf-8") as fh:
        return fh.read()


def _read_bytes(source: str | os.PathLike | IO) -> bytes:
    if hasattr(source, "read"):
        raw = source.read()
        return raw.encode() if isinstance(raw, str) else raw
    with open(source, "rb") as fh:
        return fh.read()


# =====================================================================
# Generators
# =====================================================================


def generate_pref(n: int, d: int = 2, seed: int = 0) -> Graph:
    """Preferential-attachment (scale-free) graph.

    Starts from a complete graph on d+1 nodes; each subsequent node attaches
    to d distinct existing nodes, chosen with probability proportional to
    current degree (sampling from the repeated-endpoints list, rejecting
    duplicates). Minimum degree is therefore d. Randomness comes from numpy's
    PCG64 generator, so a given (n, d, seed) is reproducible everywhere.

    Parameters
    ----------
    n : int
        Node count, n >= d + 1.
    d : int
        Edges added per new node, d >= 1.
    seed : int
        PCG64 seed.
    """
    if d < 1:
        raise GraphFormatError("pref requires d >= 1")
    if n < d + 1:
        raise GraphFormatError("pref requires n >= d + 1")
    rng = np.random.default_rng(seed)
    us: list[int] = []
    vs: list[int] = []
    for i in range(d + 1):
        for j in range(i + 1, d + 1):
            us.append(i)
            vs.append(j)
    # One slot per edge endpoint; sampling a slot uniformly is sampling a
    # node degree-proportionally.
    repeated: list[int] = []
    for i in range(d + 1):
        repeated.extend([i] * d)
    # Uniform floats drawn in bulk; floor(r * len) indexes the current list.
    pool = rng.random(4 * max(1, (n - d - 1)) * d)
    pos = 0
    for src in range(d + 1, n):
        targets: list[int] = []
        while len(targets) < d:
            if pos == len(pool):
                pool = rng.random(len(pool))
                pos = 0
            t = repeated[int(pool[pos] * len(repeated))]
            pos += 1
            if t not in targets:
                targets.append(t)
        for t in targets:
            us.append(src)
            vs.append(t)
        repeated.extend(targets)
        repeated.extend([src] * d)
    return Graph.from_edge_arrays(n, us, vs)


def generate_smallw(n: int, d: int = 1, p: float = 0.1, seed: int = 0) -> Graph:
    """Small-world graph: ring lattice of radius d plus random shortcuts.

    Every node is joined to its d nearest neighbors on each side of a ring;
    then each node, independently with probability p, gains one shortcut to a
    uniformly random node. Shortcut draws that produce self-loops or existing
    edges are dropped, so the expected shortcut count is slightly below n*p.
    PCG64 randomness, reproducible by (n, d, p, seed).
    """
    if d < 1:
        raise GraphFormatError("smallw requires d >= 1")
    if n <= 2 * d:
        raise GraphFormatError("smallw requires n > 2d")
    if not 0.0 <= p <= 1.0:
        raise GraphFormatError("smallw requires 0 <= p <= 1")
    rng = np.random.default_rng(seed)
    base = np.arange(n, dtype=np.int64)
    us = [np.repeat(base, d)]
    vs = [((base[:, None] + np.arange(1, d + 1)) % n).reshape(-1)]
    chosen = np.nonzero(rng.random(n) < p)[0]
    if len(chosen):
        targets = rng.integers(0, n, size=len(chosen))
        keep = targets != chosen
        us.append(chosen[keep].astype(np.int64))
        vs.append(targets[keep].astype(np.int64))
    return Graph.from_edge_arrays(n, np.concatenate(us), np.concatenate(vs))


def generate_reference(kind: str, n: int, d: int = 1) -> Graph:
    """Deterministic reference graph.

    Parameters
    ----------
    kind : {'complete', 'star', 'path', 'cycle', 'ring_lattice'}
        Family. ``star`` puts the hub at node 0; ``ring_lattice`` joins each
        node to its d nearest neighbors per side.
    n : int
        Node count; n >= 2, and n >= 3 for cycles, n > 2d for ring lattices.
    d : int
        Radius for ``ring_lattice``; ignored elsewhere.
    """
    if kind not in REFERENCE_KINDS:
        raise GraphFormatError(f"unknown reference graph kind {kind!r}")
    if n < 2:
        raise GraphFormatError("reference graphs require n >= 2")
    if kind == "complete":
        iu = np.triu_indices(n, k=1)
        return Graph.from_edge_arrays(n, iu[0], iu[1])
    if kind == "star":
        spokes = np.arange(1, n, dtype=np.int64)
        return Graph.from_edge_arrays(n, np.zeros(n - 1, dtype=np.int64), spokes)
    if kind == "path":
        base = np.arange(n - 1, dtype=np.int64)
        return Graph.from_edge_arrays(n, base, base + 1)
    if kind == "cycle":
        if n < 3:
            raise GraphFormatError("cycle requires n >= 3")
        base = np.arange(n, dtype=np.int64)
        return Graph.from_edge_arrays(n, base, (base + 1) % n)
    # ring_lattice
    if d < 1:
        raise GraphFormatError("ring_lattice requires d >= 1")
    if n <= 2 * d:
        raise GraphFormatError("ring_lattice requires n > 2d")
    base = np.arange(n, dtype=np.int64)
    u = np.repeat(base, d)
    v = ((base[:, None] + np.arange(1, d + 1)) % n).reshape(-1)
    return Graph.from_edge_arrays(n, u, v)


# =====================================================================
# Generator spec strings ("pref:n=1000,d=2" etc.)
# =====================================================================

_SPEC_PARAMS = {
    "pref": {"n": int, "d": int},
    "smallw": {"n": int, "d": int, "p": float},
    "ring": {"n": int, "d": int},
    "ring_lattice": {"n": int, "d": int},
    "complete": {"n": int},
    "star": {"n": int},
    "path": {"n": int},
    "cycle": {"n": int},
}


def parse_generator_spec(spec: str) -> tuple[str, dict]:
    """Parse ``family:key=value,...`` into (family, params).

    ``ring`` is an alias for ``ring_lattice``. Unknown families, unknown
    keys, malformed values, and a missing ``n`` all raise
    :class:`GraphFormatError`.
    """
    name, _, rest = spec.partition(":")
    name = name.strip().lower()
    if name not in _SPEC_PARAMS:
        raise GraphFormatError(f"unknown generator family {name!r} in spec {spec!r}")
    schema = _SPEC_PARAMS[name]
    params: dict = {}
    if rest.strip():
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in schema:
                raise GraphFormatError(f"bad parameter {item.strip()!r} in spec {spec!r}")
            try:
                params[key] = schema[key](value.strip())
            except ValueError:
                raise GraphFormatError(f"bad value for {key!r} in spec {spec!r}") from None
    if "n" not in params:
        raise GraphFormatError(f"spec {spec!r} is missing n")
    return ("ring_lattice" if name == "ring" else name), params


def generate_from_spec(spec: str, seed: int = 0) -> Graph:
    """Build the graph described by a spec string; see parse_generator_spec."""
    name, params = parse_generator_spec(spec)
    if name == "pref":
        return generate_pref(params["n"], params.get("d", 2), seed)
    if name == "smallw":
        return generate_smallw(params["n"], params.get("d", 1), params.get("p", 0.1), seed)
    if name == "ring_lattice":
        return generate_reference("ring_lattice", params["n"], params.get("d", 1))
    return generate_reference(name, params["n"])
