"""Sparse symmetric matrix-function kernels.

Everything here works through matrix-vector products with the adjacency
matrix of an immutable :class:`~netcomm.graph.Graph`:

- :func:`lanczos` — tridiagonal reduction with full reorthogonalization
- :func:`expm_multiply` — restarted Krylov evaluation of exp(beta*A) v
- :func:`quadrature_diag` — Gauss-rule estimates of e_i' f(A) e_i
- :func:`dominant_eigs` — the two largest eigenvalues and the Perron vector
- :func:`cg_solve_resolvent` — conjugate gradients for (I - alpha*A) x = b
- :func:`dense_oracle` — full eigendecomposition reference for small graphs

All routines are deterministic: fixed inputs give bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from netcomm.graph import Graph

__all__ = [
    "KrylovConfig",
    "LanczosDecomposition",
    "SpectralEstimate",
    "MatrixExp",
    "MatrixResolvent",
    "ConvergenceError",
    "spmv",
    "lanczos",
    "expm_multiply",
    "quadrature_diag",
    "dominant_eigs",
    "cg_solve_resolvent",
    "dense_oracle",
]

# Fixed seed for the dominant_eigs start vector; results must be
# bit-reproducible across runs and machines.
_EIGS_SEED = 0x5EED


class ConvergenceError(RuntimeError):
    """An iteration failed to reach its tolerance.

    Attributes
    ----------
    result : ndarray
        Last iterate, usable for diagnostics.
    achieved : float
        Relative update norm or residual actually reached.
    """

    def __init__(self, message: str, result: np.ndarray, achieved: float):
        super().__init__(message)
        self.result = result
        self.achieved = achieved


@dataclass(frozen=True)
class KrylovConfig:
    """Tunables for the Krylov kernels.

    tolerance applies to the relative update norm of restarted evaluations
    and to relative residuals of linear solves. quadrature_steps is the
    Lanczos step count per node when estimating diagonal entries.
    """

    restart_length: int = 10
    max_restarts: int = 50
    tolerance: float = 1e-12
    quadrature_steps: int = 5

    def validate(self) -> None:
        if self.restart_length < 1 or self.max_restarts < 1 or self.quadrature_steps < 1:
            raise ValueError("restart_length, max_restarts, quadrature_steps must be positive")
        if not 0.0 < self.tolerance < 1.0:
            raise ValueError("tolerance must lie in (0, 1)")


@dataclass(frozen=True)
class MatrixExp:
    """The function x -> exp(beta * x), applied to a symmetric matrix."""

    beta: float = 1.0

    def __post_init__(self) -> None:
        if self.beta <= 0:
            raise ValueError("beta must be positive")

    def apply(self, eigs: np.ndarray) -> np.ndarray:
        return np.exp(self.beta * np.asarray(eigs, dtype=np.float64))


@dataclass(frozen=True)
class MatrixResolvent:
    """The function x -> 1 / (1 - alpha * x), defined while alpha * x < 1."""

    alpha: float

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ValueError("alpha must satisfy 0 < alpha < 1/lambda_1")

    def apply(self, eigs: np.ndarray) -> np.ndarray:
        eigs = np.asarray(eigs, dtype=np.float64)
        denom = 1.0 - self.alpha * eigs
        if np.any(denom <= 0.0):
            raise ValueError(
                "resolvent undefined at alpha*lambda >= 1; "
                "alpha must satisfy 0 < alpha < 1/lambda_1"
            )
        return 1.0 / denom


@dataclass(frozen=True)
class LanczosDecomposition:
    """k-step Lanczos factorization A V = V T + residual_norm * v_next e_k'.

    basis is n-by-k column-orthonormal; alpha and beta hold the diagonal and
    off-diagonal of the tridiagonal T. invariant_subspace marks a breakdown:
    the Krylov space is exactly A-invariant, residual_norm is zero and the
    factorization is exact (possibly with fewer than the requested steps).
    """

    basis: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    residual_norm: float
    next_vector: np.ndarray | None
    invariant_subspace: bool

    @property
    def steps(self) -> int:
        return len(self.alpha)

    def tridiagonal(self) -> np.ndarray:
        """Dense k-by-k tridiagonal T."""
        t = np.diag(self.alpha)
        k = self.steps
        if k > 1:
            t[np.arange(k - 1), np.arange(1, k)] = self.beta
            t[np.arange(1, k), np.arange(k - 1)] = self.beta
        return t


@dataclass(frozen=True)
class SpectralEstimate:
    """Largest two eigenvalues and dominant eigenvector of an adjacency matrix.

    v1 has unit 2-norm and is oriented so its entry sum is nonnegative, which
    for connected graphs yields the entrywise-nonnegative Perron vector.
    lambda2 is NaN for single-node graphs. degenerate marks lambda1 with
    multiplicity above one (disconnected graphs); it is a valid outcome, not
    an error.
    """

    lambda1: float
    lambda2: float
    v1: np.ndarray
    converged: bool
    iterations: int
    degenerate: bool = False

    @property
    def spectral_gap(self) -> float:
        return self.lambda1 - self.lambda2


def spmv(g: Graph, x: np.ndarray) -> np.ndarray:
    """Adjacency matrix-vector product A x."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise ValueError(f"vector has shape {x.shape}, expected ({g.n},)")
    return g.adjacency() @ x


def _breakdown_threshold(g: Graph) -> float:
    # True invariant subspaces leave residuals at roundoff scale; genuine
    # small betas on these graphs sit far above max-degree * 1e-13.
    max_deg = int(g.degrees().max()) if g.n else 0
    return 1e-13 * max(1.0, float(max_deg))


def lanczos(
    g: Graph,
    v0: np.ndarray,
    k: int,
    deflate: np.ndarray | None = None,
) -> LanczosDecomposition:
    """k-step Lanczos with full reorthogonalization.

    Parameters
    ----------
    g : Graph
    v0 : ndarray
        Nonzero start vector.
    k : int
        Requested steps, 1 <= k <= n. Breakdown returns fewer steps with
        invariant_subspace set.
    deflate : ndarray, optional
        Rows are unit vectors to project out of every iterate (used to find
        interior eigenvalues after the dominant pair is known).

    Returns
    -------
    LanczosDecomposition
    """
    n = g.n
    v0 = np.asarray(v0, dtype=np.float64)
    if v0.shape != (n,):
        raise ValueError(f"start vector has shape {v0.shape}, expected ({n},)")
    if not 1 <= k <= n:
        raise ValueError(f"step count {k} out of range 1..{n}")
    nv = float(np.linalg.norm(v0))
    if nv == 0.0:
        raise ValueError("start vector must be nonzero")
    a_mat = g.adjacency()
    btol = _breakdown_threshold(g)

    q = v0 / nv
    if deflate is not None and len(deflate):
        q = q - deflate.T @ (deflate @ q)
        nq = np.linalg.norm(q)
        if nq <= btol:
            raise ValueError("start vector lies in the deflated subspace")
        q = q / nq

    basis = np.empty((k, n), dtype=np.float64)
    alphas = np.empty(k, dtype=np.float64)
    betas = np.empty(max(k - 1, 0), dtype=np.float64)
    residual = 0.0
    nxt: np.ndarray | None = None
    exhausted = False
    steps = 0
    for j in range(k):
        basis[j] = q
        w = a_mat @ q
        alphas[j] = q @ w
        # Two reorthogonalization sweeps keep the basis orthonormal to
        # roundoff; the three-term recurrence alone drifts.
        for _ in range(2):
            w -= basis[: j + 1].T @ (basis[: j + 1] @ w)
            if deflate is not None and len(deflate):
                w -= deflate.T @ (deflate @ w)
        b = float(np.linalg.norm(w))
        steps = j + 1
        if b <= btol:
            exhausted = True
            break
        if j < k - 1:
            betas[j] = b
            q = w / b
        else:
            residual = b
            nxt = w / b
    return LanczosDecomposition(
        basis=basis[:steps].T.copy(),
        alpha=alphas[:steps].copy(),
        beta=betas[: steps - 1].copy(),
        residual_norm=0.0 if exhausted else residual,
        next_vector=None if exhausted else nxt,
        invariant_subspace=exhausted,
    )


def _f_tridiag_e1(alphas: np.ndarray, offdiag: np.ndarray, fn) -> np.ndarray:
    """First column of f(T) for tridiagonal T, via its eigendecomposition."""
    if len(alphas) == 1:
        return fn.apply(np.asarray(alphas))
    eigs, vecs = scipy.linalg.eigh_tridiagonal(alphas, offdiag)
    return vecs @ (fn.apply(eigs) * vecs[0])


def expm_multiply(
    g: Graph,
    v: np.ndarray,
    beta: float = 1.0,
    cfg: KrylovConfig | None = None,
) -> np.ndarray:
    """Evaluate exp(beta * A) v by a restarted Lanczos method.

    Each cycle runs restart_length Lanczos steps (full reorthogonalization
    within the cycle) from the previous cycle's residual direction. Cycles
    are chained through the subdiagonal block of an accumulated
    block-lower-triangular Hessenberg matrix H; because H is block lower
    triangular, the leading entries of exp(beta*H) e_1 are frozen once
    computed, so each cycle contributes exactly its own basis block times the
    new coefficients and never needs the discarded bases again. Iteration
    stops when the norm of a cycle's correction drops below
    tolerance * ||result||, or immediately on breakdown, which means the
    evaluation is exact.

    Raises
    ------
    ConvergenceError
        If max_restarts cycles do not reach the tolerance; the exception
        carries the last iterate and the achieved relative update norm.
    """
    if cfg is None:
        cfg = KrylovConfig()
    cfg.validate()
    n = g.n
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (n,):
        raise ValueError(f"vector has shape {v.shape}, expected ({n},)")
    if beta <= 0:
        raise ValueError("beta must be positive")
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        raise ValueError("start vector must be nonzero")
    a_mat = g.adjacency()
    btol = _breakdown_threshold(g)
    m = cfg.restart_length

    q = v / nv
    # Per-cycle tridiagonal pieces plus the coupling coefficient that chains
    # each cycle to the one before it.
    cycles: list[tuple[np.ndarray, np.ndarray, float]] = []
    x = np.zeros(n, dtype=np.float64)
    rel_update = math.inf
    total = 0
    for cycle in range(cfg.max_restarts):
        block = np.empty((m, n), dtype=np.float64)
        alphas = np.empty(m, dtype=np.float64)
        offdiag = np.empty(m, dtype=np.float64)
        exhausted = False
        steps = 0
        b = 0.0
        for j in range(m):
            block[j] = q
            w = a_mat @ q
            alphas[j] = q @ w
            for _ in range(2):
                w -= block[: j + 1].T @ (block[: j + 1] @ w)
            b = float(np.linalg.norm(w))
            steps = j + 1
            if b <= btol:
                exhausted = True
                break
            offdiag[j] = b
            q = w / b
        cycles.append((alphas[:steps], offdiag[: steps - 1], b))
        total += steps
        h_mat = np.zeros((total, total), dtype=np.float64)
        at = 0
        for idx, (al, off, _) in enumerate(cycles):
            k = len(al)
            h_mat[at : at + k, at : at + k] = np.diag(al)
            if k > 1:
                h_mat[at + np.arange(k - 1), at + np.arange(1, k)] = off
                h_mat[at + np.arange(1, k), at + np.arange(k - 1)] = off
            if idx > 0:
                h_mat[at, at - 1] = cycles[idx - 1][2]
            at += k
        coeffs = nv * scipy.linalg.expm(beta * h_mat)[:, 0]
        update = block[:steps].T @ coeffs[total - steps : total]
        x = x + update
        upd_norm = float(np.linalg.norm(update))
        x_norm = float(np.linalg.norm(x))
        rel_update = upd_norm / max(x_norm, np.finfo(np.float64).tiny)
        if exhausted or rel_update <= cfg.tolerance:
            return x
    raise ConvergenceError(
        f"expm_multiply: update norm {rel_update:.3e} above tolerance "
        f"{cfg.tolerance:.1e} after {cfg.max_restarts} restarts",
        result=x,
        achieved=rel_update,
    )


def quadrature_diag(
    g: Graph,
    i: int,
    fn: MatrixExp | MatrixResolvent,
    cfg: KrylovConfig | None = None,
) -> float:
    """Gauss-rule estimate of the diagonal entry [f(A)]_ii.

    Runs quadrature_steps Lanczos steps from e_i and evaluates
    e_1' f(T_k) e_1; the Ritz values act as quadrature nodes. Breakdown makes
    the estimate exact. For f = exp the estimate is nondecreasing in k.
    """
    if cfg is None:
        cfg = KrylovConfig()
    cfg.validate()
    if not 0 <= i < g.n:
        raise ValueError(f"node {i} out of range 0..{g.n - 1}")
    e_i = np.zeros(g.n, dtype=np.float64)
    e_i[i] = 1.0
    dec = lanczos(g, e_i, min(cfg.quadrature_steps, g.n))
    return float(_f_tridiag_e1(dec.alpha, dec.beta, fn)[0])


def _ritz_top(alphas: np.ndarray, betas: np.ndarray, residual: float):
    """Top-two Ritz values, their residual bounds, and the top Ritz weights."""
    if len(alphas) == 1:
        return float(alphas[0]), math.nan, 0.0 if residual == 0 else abs(residual), math.inf, np.ones(1)
    eigs, vecs = scipy.linalg.eigh_tridiagonal(np.asarray(alphas), np.asarray(betas))
    r1 = abs(residual * vecs[-1, -1])
    r2 = abs(residual * vecs[-1, -2])
    return float(eigs[-1]), float(eigs[-2]), r1, r2, vecs[:, -1]


def _lanczos_extreme(
    g: Graph,
    v0: np.ndarray,
    tol: float,
    max_steps: int,
    deflate: np.ndarray | None,
):
    """Grow a Lanczos factorization until the top two Ritz pairs settle.

    Returns (theta1, theta2, v1, converged, steps); theta2 is NaN when the
    space exhausts after a single step.
    """
    n = g.n
    a_mat = g.adjacency()
    btol = _breakdown_threshold(g)
    q = np.asarray(v0, dtype=np.float64)
    if deflate is not None and len(deflate):
        q = q - deflate.T @ (deflate @ q)
    nq = float(np.linalg.norm(q))
    if nq <= btol:
        raise ValueError("start vector lies in the deflated subspace")
    q = q / nq

    basis = np.empty((max_steps, n), dtype=np.float64)
    alphas = np.empty(max_steps, dtype=np.float64)
    betas = np.empty(max_steps, dtype=np.float64)
    steps = 0
    exhausted = False
    check_at = 32
    converged = False
    residual = 0.0
    while steps < max_steps:
        basis[steps] = q
        w = a_mat @ q
        alphas[steps] = q @ w
        for _ in range(2):
            w -= basis[: steps + 1].T @ (basis[: steps + 1] @ w)
            if deflate is not None and len(deflate):
                w -= deflate.T @ (deflate @ w)
        b = float(np.linalg.norm(w))
        steps += 1
        if b <= btol:
            exhausted = True
            residual = 0.0
            break
        betas[steps - 1] = b
        residual = b
        q = w / b
        if steps >= check_at or steps == max_steps:
            check_at = min(max_steps, check_at * 2)
            t1, t2, r1, r2, _ = _ritz_top(alphas[:steps], betas[: steps - 1], residual)
            scale = max(1.0, abs(t1))
            if r1 <= tol * scale and (math.isnan(t2) or r2 <= tol * scale):
                converged = True
                break
    t1, t2, r1, r2, top_vec = _ritz_top(
        alphas[:steps], betas[: steps - 1], 0.0 if exhausted else residual
    )
    if exhausted:
        converged = True
    else:
        scale = max(1.0, abs(t1))
        converged = converged or (
            r1 <= tol * scale and (math.isnan(t2) or r2 <= tol * scale)
        )
    v1 = basis[:steps].T @ top_vec
    nrm = float(np.linalg.norm(v1))
    if nrm > 0:
        v1 = v1 / nrm
    return t1, t2, v1, converged, steps


def dominant_eigs(
    g: Graph,
    tol: float = 1e-10,
    max_steps: int | None = None,
) -> SpectralEstimate:
    """Largest two adjacency eigenvalues and the dominant eigenvector.

    A first Lanczos pass (full reorthogonalization, deterministic seeded
    start) targets lambda_1 and v_1; a second pass deflated against v_1
    recovers lambda_2 even when lambda_1 is degenerate, as on disconnected
    graphs. The converged flag is honest: graphs whose relative spectral gap
    is far below tol may exhaust max_steps first and report converged=False.

    Parameters
    ----------
    g : Graph
        Nonempty graph.
    tol : float
        Relative residual tolerance on both Ritz pairs.
    max_steps : int, optional
        Basis size cap per pass; defaults to min(n, 512).
    """
    n = g.n
    if n == 0:
        raise ValueError("graph has no nodes")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if n == 1:
        lam = float(g.adjacency().toarray()[0, 0])
        return SpectralEstimate(
            lambda1=lam, lambda2=math.nan, v1=np.ones(1), converged=True, iterations=0
        )
    if max_steps is None:
        max_steps = min(n, 512)
    max_steps = max(2, min(max_steps, n))
    rng = np.random.default_rng(_EIGS_SEED)
    v0 = rng.standard_normal(n)

    t1, t2_main, v1, conv1, it1 = _lanczos_extreme(g, v0, tol, max_steps, None)
    sign = float(v1.sum())
    if sign < 0 or (sign == 0 and len(v1) and v1[np.argmax(np.abs(v1))] < 0):
        v1 = -v1

    # Second pass, orthogonal to v1: sees lambda_1 again iff it is a
    # multiple eigenvalue, otherwise its top Ritz value estimates lambda_2.
    v0b = rng.standard_normal(n)
    try:
        t1_defl, _, _, conv2, it2 = _lanczos_extreme(
            g, v0b, tol, max_steps, v1[None, :]
        )
    except ValueError:
        t1_defl, conv2, it2 = -math.inf, True, 0

    lambda2 = t1_defl if (math.isnan(t2_main) or t1_defl > t2_main) else t2_main
    if lambda2 == -math.inf:
        lambda2 = t2_main
    lambda2 = min(lambda2, t1)
    degenerate = abs(t1 - lambda2) <= max(tol, 1e-12) * max(1.0, abs(t1))
    return SpectralEstimate(
        lambda1=t1,
        lambda2=lambda2,
        v1=v1,
        converged=bool(conv1 and conv2),
        iterations=it1 + it2,
        degenerate=bool(degenerate),
    )


def cg_solve_resolvent(
    g: Graph,
    alpha: float,
    b: np.ndarray,
    tol: float = 1e-12,
) -> np.ndarray:
    """Solve (I - alpha*A) x = b by conjugate gradients.

    The system is positive definite exactly when 0 < alpha < 1/lambda_1
    (alpha = 0 is the identity). Negative curvature encountered during the
    iteration means alpha is out of range and raises ValueError naming that
    constraint. Convergence criterion: ||residual|| <= tol * ||b||.
    """
    n = g.n
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (n,):
        raise ValueError(f"vector has shape {b.shape}, expected ({n},)")
    if alpha < 0:
        raise ValueError("alpha must satisfy 0 < alpha < 1/lambda_1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    a_mat = g.adjacency()
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return np.zeros(n, dtype=np.float64)

    x = np.zeros(n, dtype=np.float64)
    r = b.copy()
    p = r.copy()
    rs = float(r @ r)
    limit = 2 * n + 50
    for _ in range(limit):
        ap = p - alpha * (a_mat @ p)
        p_ap = float(p @ ap)
        if p_ap <= 0.0:
            raise ValueError(
                "system is not positive definite: "
                "alpha must satisfy 0 < alpha < 1/lambda_1"
            )
        gamma = rs / p_ap
        x += gamma * p
        r -= gamma * ap
        rs_new = float(r @ r)
        if math.sqrt(rs_new) <= tol * b_norm:
            return x
        p = r + (rs_new / rs) * p
        rs = rs_new
    raise ConvergenceError(
        f"cg_solve_resolvent: residual {math.sqrt(rs) / b_norm:.3e} above "
        f"tolerance {tol:.1e} after {limit} iterations",
        result=x,
        achieved=math.sqrt(rs) / b_norm,
    )


def dense_oracle(
    g: Graph,
    fn: MatrixExp | MatrixResolvent,
    cap: int = 3000,
) -> np.ndarray:
    """f(A) as a dense matrix via full symmetric eigendecomposition.

    Reference implementation for validation and for small-graph exact paths;
    refuses graphs above the cap (the cost is Theta(n^3) time, Theta(n^2)
    memory).
    """
    if g.n > cap:
        raise ValueError(f"dense oracle capped at n <= {cap}, got n = {g.n}")
    a_dense = g.adjacency().toarray()
    eigs, vecs = np.linalg.eigh(a_dense)
    return (vecs * fn.apply(eigs)) @ vecs.T
