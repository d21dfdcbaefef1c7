"""Request/response models for the analysis service.

Graphs travel by value: a request either carries file content (edge list or
Matrix Market text) or names a generator spec plus seed, so the service holds
no state between calls. Non-finite floats (an undefined correlation, the
C/m ratio of an edgeless graph, the missing second eigenvalue of a one-node
graph) are represented as null, never as NaN/Infinity literals.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

MethodName = Literal["exp-total", "exp-subgraph", "res-total", "res-subgraph"]


class KrylovSettings(BaseModel):
    """Mirror of the numeric tunables accepted by every computation."""

    tol: float = Field(default=1e-12, gt=0, lt=1)
    restart: int = Field(default=10, ge=1)
    max_restarts: int = Field(default=50, ge=1)
    quad_steps: int = Field(default=5, ge=1)


class GraphSource(BaseModel):
    """A graph shipped by value: inline file content or a generator call."""

    kind: Literal["edge_list", "matrix_market", "generator"]
    content: str | None = None
    base: Literal[0, 1] = 0
    spec: str | None = None
    seed: int = 0


class GraphInfo(BaseModel):
    n: int
    m: int
    has_loops: bool
    fingerprint: str


class ReportPayload(BaseModel):
    """Network-level communicability indices for one kernel."""

    kernel: Literal["exp", "resolvent"]
    n: int
    m: int
    C: float
    EE: float
    C_over_n: float
    C_over_m: float | None
    EE_over_n: float
    lambda1: float
    lambda2: float | None
    upper_bound: float | None
    bounds_ok: bool
    spectral_converged: bool
    log_normalized_C: float | None
    beta: float | None = None
    alpha: float | None = None
    alpha_fraction: float | None = None


class GenerateRequest(BaseModel):
    spec: str
    seed: int = 0


class GenerateResponse(BaseModel):
    graph: GraphInfo
    spec: str
    seed: int
    edge_list: str


class CentralityRequest(BaseModel):
    graph: GraphSource
    method: MethodName = "exp-total"
    beta: float = 1.0
    alpha_fraction: float = 0.85
    alpha: float | None = None
    settings: KrylovSettings = KrylovSettings()
    include_report: bool = False


class CentralityResponse(BaseModel):
    graph: GraphInfo
    method: MethodName
    params: dict[str, float | None]
    scores: list[float]
    ranking: list[int]
    report: ReportPayload | None = None


class CompareRequest(BaseModel):
    graph: GraphSource
    method_a: MethodName = "exp-total"
    method_b: MethodName = "exp-subgraph"
    beta: float = 1.0
    alpha_fraction: float = 0.85
    alpha: float | None = None
    settings: KrylovSettings = KrylovSettings()
    percents: list[float] = [10.0, 1.0]
    top_k: int | None = Field(default=None, ge=1)
    include_curve: bool = False


class CompareResponse(BaseModel):
    graph: GraphInfo
    method_a: MethodName
    method_b: MethodName
    cc_full: float
    cc_top: dict[str, float | None]
    isim_full: float
    isim_top: dict[str, float]
    top_k: int | None = None
    cc_top_k: float | None = None
    isim_top_k: float | None = None
    isim_curve: list[float] | None = None


class ReportRequest(BaseModel):
    graph: GraphSource
    kernel: Literal["exp", "resolvent"] = "exp"
    beta: float = 1.0
    alpha_fraction: float = 0.85
    alpha: float | None = None
    settings: KrylovSettings = KrylovSettings()


class ReportResponse(BaseModel):
    graph: GraphInfo
    report: ReportPayload


class BenchRequest(BaseModel):
    graph: GraphSource
    method: MethodName = "exp-total"
    repetitions: int = Field(default=3, ge=1)


class BenchRun(BaseModel):
    load_seconds: float
    lambda1_seconds: float
    kernel_seconds: float
    total_seconds: float


class BenchResponse(BaseModel):
    graph: GraphInfo
    method: MethodName
    runs: list[BenchRun]


class HealthResponse(BaseModel):
    status: Literal["ok"]
    version: str


class ErrorDetail(BaseModel):
    """Body of every non-2xx response, under the ``detail`` key."""

    kind: Literal["input", "convergence"]
    message: str


class Stat(BaseModel):
    """Mean and sample standard deviation over replicated runs."""

    mean: float
    std: float | None = None


class GenerateSidecar(BaseModel):
    """Metadata written next to a generated edge-list file."""

    spec: str
    seed: int
    n: int
    m: int
    has_loops: bool
    fingerprint: str


class CompareAggregate(BaseModel):
    """Replication averages for a ranking comparison.

    Entries are None when the underlying metric was undefined in at least
    one replicate (top-k sets that disagree have no correlation).
    """

    cc_full: Stat
    cc_top: dict[str, Stat | None]
    isim_full: Stat
    isim_top: dict[str, Stat]
    cc_top_k: Stat | None = None
    isim_top_k: Stat | None = None
    isim_curve_mean: list[float] | None = None
    isim_curve_std: list[float] | None = None


class CompareReplication(BaseModel):
    """Comparison replicated over seeds of one generator spec."""

    spec: str
    seeds: list[int]
    replicates: list[CompareResponse]
    aggregate: CompareAggregate


class ReportReplication(BaseModel):
    """Network report replicated over seeds of one generator spec.

    The aggregate maps numeric report fields to statistics; fields that
    were None in any replicate aggregate to None.
    """

    spec: str
    seeds: list[int]
    replicates: list[ReportResponse]
    aggregate: dict[str, Stat | None]
