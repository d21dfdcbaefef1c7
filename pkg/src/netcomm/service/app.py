"""FastAPI application exposing the analysis toolkit.

Every endpoint is stateless: the graph arrives in the request (content or
generator spec), results leave in the response. Input problems map to
HTTP 400 with ``detail.kind == "input"``; numerical non-convergence maps to
HTTP 500 with ``detail.kind == "convergence"``.
"""

from __future__ import annotations

import io
import math
import time

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

import netcomm
from netcomm import centrality, compare
from netcomm.graph import (
    Graph,
    GraphFormatError,
    dump_edges,
    generate_from_spec,
    load_edge_list,
    load_matrix_market,
)
from netcomm.krylov import ConvergenceError, KrylovConfig, dominant_eigs
from netcomm.service import schemas

__all__ = ["create_app", "build_graph", "compute_scores"]


def build_graph(src: schemas.GraphSource) -> Graph:
    """Realize a GraphSource into a Graph."""
    if src.kind == "generator":
        if not src.spec:
            raise GraphFormatError("generator source needs a spec")
        return generate_from_spec(src.spec, src.seed)
    if src.content is None:
        raise GraphFormatError(f"{src.kind} source needs file content")
    if src.kind == "edge_list":
        return load_edge_list(io.StringIO(src.content), base=src.base)
    return load_matrix_market(io.BytesIO(src.content.encode()))


def _settings_to_config(s: schemas.KrylovSettings) -> KrylovConfig:
    return KrylovConfig(
        restart_length=s.restart,
        max_restarts=s.max_restarts,
        tolerance=s.tol,
        quadrature_steps=s.quad_steps,
    )


def compute_scores(
    g: Graph,
    method: schemas.MethodName,
    beta: float,
    alpha_fraction: float,
    alpha: float | None,
    cfg: KrylovConfig,
) -> centrality.ScoreVector:
    """Dispatch a method name to the corresponding centrality computation."""
    if method == "exp-total":
        return centrality.total_communicability(g, beta=beta, cfg=cfg)
    if method == "exp-subgraph":
        return centrality.subgraph_centrality(g, beta=beta, cfg=cfg)
    if method == "res-total":
        return centrality.katz_total(g, alpha_fraction=alpha_fraction, cfg=cfg, alpha=alpha)
    if method == "res-subgraph":
        return centrality.katz_subgraph(g, alpha_fraction=alpha_fraction, cfg=cfg, alpha=alpha)
    raise GraphFormatError(f"unknown method {method!r}")


def _graph_info(g: Graph) -> schemas.GraphInfo:
    return schemas.GraphInfo(n=g.n, m=g.m, has_loops=g.has_loops, fingerprint=g.fingerprint)


def _finite(x: float | None) -> float | None:
    if x is None or not math.isfinite(x):
        return None
    return float(x)


def _report_payload(rep: centrality.NetworkReport) -> schemas.ReportPayload:
    try:
        log_c = centrality.log_normalized_c(rep.C, rep.n)
    except ValueError:
        log_c = None
    return schemas.ReportPayload(
        kernel=rep.kernel,
        n=rep.n,
        m=rep.m,
        C=rep.C,
        EE=rep.EE,
        C_over_n=rep.C_over_n,
        C_over_m=_finite(rep.C_over_m),
        EE_over_n=rep.EE_over_n,
        lambda1=rep.lambda1,
        lambda2=_finite(rep.lambda2),
        upper_bound=_finite(rep.upper_bound),
        bounds_ok=rep.bounds_ok,
        spectral_converged=rep.spectral_converged,
        log_normalized_C=log_c,
        beta=rep.beta,
        alpha=rep.alpha,
        alpha_fraction=rep.alpha_fraction,
    )


def _params_payload(params: dict) -> dict[str, float | None]:
    return {k: _finite(v) for k, v in params.items()}


def create_app() -> FastAPI:
    app = FastAPI(title="netcomm", version=netcomm.__version__)

    @app.exception_handler(GraphFormatError)
    @app.exception_handler(ValueError)
    async def _input_error(request: Request, exc: Exception) -> JSONResponse:
        detail = schemas.ErrorDetail(kind="input", message=str(exc))
        return JSONResponse(status_code=400, content={"detail": detail.model_dump()})

    @app.exception_handler(ConvergenceError)
    async def _convergence_error(request: Request, exc: ConvergenceError) -> JSONResponse:
        detail = schemas.ErrorDetail(kind="convergence", message=str(exc))
        return JSONResponse(status_code=500, content={"detail": detail.model_dump()})

    @app.get("/health", response_model=schemas.HealthResponse)
    async def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=netcomm.__version__)

    @app.post("/generate", response_model=schemas.GenerateResponse)
    async def generate(req: schemas.GenerateRequest) -> schemas.GenerateResponse:
        g = generate_from_spec(req.spec, req.seed)
        return schemas.GenerateResponse(
            graph=_graph_info(g), spec=req.spec, seed=req.seed, edge_list=dump_edges(g)
        )

    @app.post("/centrality", response_model=schemas.CentralityResponse)
    async def centrality_endpoint(req: schemas.CentralityRequest) -> schemas.CentralityResponse:
        g = build_graph(req.graph)
        cfg = _settings_to_config(req.settings)
        sv = compute_scores(g, req.method, req.beta, req.alpha_fraction, req.alpha, cfg)
        ranking = centrality.rank(sv)
        report = None
        if req.include_report:
            kernel = "exp" if req.method.startswith("exp") else "resolvent"
            report = _report_payload(
                centrality.network_report(
                    g,
                    kernel=kernel,
                    beta=req.beta,
                    alpha_fraction=req.alpha_fraction,
                    alpha=req.alpha,
                    cfg=cfg,
                )
            )
        return schemas.CentralityResponse(
            graph=_graph_info(g),
            method=req.method,
            params=_params_payload(sv.params),
            scores=[float(s) for s in sv.scores],
            ranking=[int(i) for i in ranking.order],
            report=report,
        )

    @app.post("/compare", response_model=schemas.CompareResponse)
    async def compare_endpoint(req: schemas.CompareRequest) -> schemas.CompareResponse:
        g = build_graph(req.graph)
        cfg = _settings_to_config(req.settings)
        rank_a = centrality.rank(
            compute_scores(g, req.method_a, req.beta, req.alpha_fraction, req.alpha, cfg)
        )
        rank_b = centrality.rank(
            compute_scores(g, req.method_b, req.beta, req.alpha_fraction, req.alpha, cfg)
        )
        result = compare.compare_rankings(
            rank_a, rank_b, tuple(req.percents), include_curve=req.include_curve
        )
        cc_top_k = None
        isim_top_k = None
        if req.top_k is not None:
            cc_top_k = compare.top_k_correlation(rank_a, rank_b, req.top_k)
            isim_top_k = compare.intersection_distance(rank_a, rank_b, req.top_k)
        return schemas.CompareResponse(
            graph=_graph_info(g),
            method_a=req.method_a,
            method_b=req.method_b,
            cc_full=result.cc_full,
            cc_top={f"{p:g}": v for p, v in result.cc_top.items()},
            isim_full=result.isim_full,
            isim_top={f"{p:g}": v for p, v in result.isim_top.items()},
            top_k=req.top_k,
            cc_top_k=cc_top_k,
            isim_top_k=isim_top_k,
            isim_curve=(
                [float(v) for v in result.isim_curve] if result.isim_curve is not None else None
            ),
        )

    @app.post("/report", response_model=schemas.ReportResponse)
    async def report_endpoint(req: schemas.ReportRequest) -> schemas.ReportResponse:
        g = build_graph(req.graph)
        cfg = _settings_to_config(req.settings)
        rep = centrality.network_report(
            g,
            kernel=req.kernel,
            beta=req.beta,
            alpha_fraction=req.alpha_fraction,
            alpha=req.alpha,
            cfg=cfg,
        )
        return schemas.ReportResponse(graph=_graph_info(g), report=_report_payload(rep))

    @app.post("/bench", response_model=schemas.BenchResponse)
    async def bench_endpoint(req: schemas.BenchRequest) -> schemas.BenchResponse:
        runs = []
        g = None
        for _ in range(req.repetitions):
            t0 = time.perf_counter()
            g = build_graph(req.graph)
            t1 = time.perf_counter()
            dominant_eigs(g)
            t2 = time.perf_counter()
            cfg = KrylovConfig()
            compute_scores(g, req.method, 1.0, 0.85, None, cfg)
            t3 = time.perf_counter()
            runs.append(
                schemas.BenchRun(
                    load_seconds=t1 - t0,
                    lambda1_seconds=t2 - t1,
                    kernel_seconds=t3 - t2,
                    total_seconds=t3 - t0,
                )
            )
        assert g is not None
        return schemas.BenchResponse(graph=_graph_info(g), method=req.method, runs=runs)

    return app
