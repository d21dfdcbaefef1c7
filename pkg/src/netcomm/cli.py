"""Command line front end for the analysis service.

The CLI is a thin client: every command builds a request, sends it to the
HTTP service (in-process by default, remote with --server), and formats the
response as CSV or JSON. No numerical work happens here.

Exit codes: 0 success, 1 input error, 2 numerical non-convergence.
"""

from __future__ import annotations

import asyncio
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import click
import httpx
import numpy as np

import netcomm
from netcomm.service import schemas
from netcomm.service.app import create_app

__all__ = ["ExperimentConfig", "ServiceClient", "main"]

METHODS = ("exp-total", "exp-subgraph", "res-total", "res-subgraph")


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved options for one command invocation.

    Captures the graph source, solver parameters, replication plan and
    output destination so a run can be validated as a whole before any
    request is sent.
    """

    input_path: str | None = None
    generate_spec: str | None = None
    base: int = 0
    method: str = "exp-total"
    method_b: str | None = None
    beta: float = 1.0
    alpha_fraction: float = 0.85
    alpha: float | None = None
    tol: float = 1e-12
    restart: int = 10
    max_restarts: int = 50
    quad_steps: int = 5
    seeds: tuple[int, ...] = (0,)
    reps: int = 1
    top_percents: tuple[float, ...] = (10.0, 1.0)
    fmt: str = "csv"
    out: str | None = None
    server: str | None = None

    def validate(self) -> None:
        if (self.input_path is None) == (self.generate_spec is None):
            raise ValueError("exactly one of --input and --generate is required")
        if self.reps < 1:
            raise ValueError("replication count must be at least 1")
        if len(self.seeds) != self.reps:
            raise ValueError(
                f"got {len(self.seeds)} seeds for {self.reps} replications; "
                "lengths must match"
            )
        if self.input_path is not None and self.reps != 1:
            raise ValueError("replication requires --generate; a file is a single graph")
        for p in self.top_percents:
            if not 0.0 < p <= 100.0:
                raise ValueError(f"top percentage {p} must lie in (0, 100]")

    def settings_payload(self) -> dict[str, Any]:
        return {
            "tol": self.tol,
            "restart": self.restart,
            "max_restarts": self.max_restarts,
            "quad_steps": self.quad_steps,
        }

    def graph_payload(self, seed: int) -> dict[str, Any]:
        if self.generate_spec is not None:
            return {"kind": "generator", "spec": self.generate_spec, "seed": seed}
        assert self.input_path is not None
        try:
            data = Path(self.input_path).read_bytes()
        except OSError as exc:
            raise ValueError(f"cannot read {self.input_path}: {exc}") from exc
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ValueError(f"{self.input_path} is not UTF-8 text: {exc}") from exc
        kind = "matrix_market" if text.startswith("%%MatrixMarket") else "edge_list"
        return {"kind": kind, "content": text, "base": self.base}


def _resolve_replication(
    seeds: str | None, reps: int | None
) -> tuple[tuple[int, ...], int]:
    """Turn --seeds/--reps into an explicit seed list and count."""
    if seeds is not None:
        parsed = _parse_int_list(seeds, "--seeds")
        return parsed, reps if reps is not None else len(parsed)
    n = reps if reps is not None else 1
    return tuple(range(max(n, 0))), n


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        values = tuple(int(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise ValueError(f"{flag} expects comma-separated integers: {exc}") from exc
    if not values:
        raise ValueError(f"{flag} must list at least one value")
    return values


def _parse_percent_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise ValueError(f"--top-percents expects comma-separated numbers: {exc}") from exc
    if not values:
        raise ValueError("--top-percents must list at least one value")
    return values


# ---------------------------------------------------------------------------
# service client


class ServiceClient:
    """Sends requests in-process (ASGI) or to a remote server."""

    def __init__(self, server: str | None = None) -> None:
        self.server = server
        self._app = None if server else create_app()

    def post(self, path: str, payload: dict[str, Any]) -> tuple[int, Any]:
        if self.server is not None:
            with httpx.Client(base_url=self.server, timeout=None) as client:
                resp = client.post(path, json=payload)
                return resp.status_code, resp.json()
        return asyncio.run(self._post_local(path, payload))

    async def _post_local(self, path: str, payload: dict[str, Any]) -> tuple[int, Any]:
        transport = httpx.ASGITransport(app=self._app)
        async with httpx.AsyncClient(transport=transport, base_url="http://service") as client:
            resp = await client.post(path, json=payload)
            return resp.status_code, resp.json()


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _call(client: ServiceClient, path: str, payload: dict[str, Any]) -> dict[str, Any]:
    """POST and return the body, translating errors into exit codes."""
    try:
        status, body = client.post(path, payload)
    except (httpx.HTTPError, ValueError) as exc:
        _fail(f"service request failed: {exc}", 1)
    if status == 200:
        return body
    detail = body.get("detail") if isinstance(body, dict) else None
    if isinstance(detail, dict) and "kind" in detail:
        code = 2 if detail["kind"] == "convergence" else 1
        _fail(str(detail.get("message", f"service error {status}")), code)
    _fail(f"service error {status}: {json.dumps(detail or body)}", 1)
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# output formatting


def _fmt_value(x: Any) -> str:
    """Scientific notation with 6 significant digits; '--' when undefined."""
    if x is None:
        return "--"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    if isinstance(x, float) and not math.isfinite(x):
        return "--"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.5e}"


def _csv(lines: Sequence[Sequence[Any]]) -> str:
    return "\n".join(",".join(str(cell) for cell in row) for row in lines) + "\n"


def _json_text(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


def _percent_key(p: float) -> str:
    return f"{p:g}"


def _stat(values: Sequence[float]) -> schemas.Stat:
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1)) if len(values) > 1 else None
    return schemas.Stat(mean=mean, std=std)


def _stat_optional(values: Sequence[float | None]) -> schemas.Stat | None:
    if any(v is None for v in values):
        return None
    return _stat([float(v) for v in values])  # type: ignore[arg-type]


def _stat_row(name: str, stat: schemas.Stat | None) -> list[str]:
    if stat is None:
        return [name, "--", "--"]
    return [name, _fmt_value(stat.mean), _fmt_value(stat.std)]


# ---------------------------------------------------------------------------
# click plumbing


class _Cli(click.Group):
    """Group whose usage errors exit 1, reserving exit code 2 for
    numerical non-convergence."""

    def main(self, *args: Any, **kwargs: Any) -> Any:  # type: ignore[override]
        kwargs.setdefault("standalone_mode", False)
        try:
            return super().main(*args, **kwargs)
        except click.exceptions.Exit as exc:
            sys.exit(exc.exit_code)
        except click.ClickException as exc:
            exc.show()
            sys.exit(1)
        except click.Abort:
            click.echo("aborted", err=True)
            sys.exit(1)
        except ValueError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)


def _apply(options: Sequence[Callable]) -> Callable:
    def deco(f: Callable) -> Callable:
        for opt in reversed(options):
            f = opt(f)
        return f

    return deco


_INPUT_OPTS = [
    click.option("--input", "input_path", type=click.Path(), default=None,
                 help="Graph file (Matrix Market or edge list)."),
    click.option("--generate", "generate_spec", default=None,
                 help='Generator spec, e.g. "pref:n=1000,d=2".'),
    click.option("--base", type=click.IntRange(0, 1), default=0, show_default=True,
                 help="Node id base of an input edge list."),
]

_SOLVER_OPTS = [
    click.option("--beta", type=float, default=1.0, show_default=True,
                 help="Inverse-temperature scaling of the exponential."),
    click.option("--alpha-fraction", type=float, default=0.85, show_default=True,
                 help="Resolvent parameter as a fraction of 1/lambda_1."),
    click.option("--alpha", type=float, default=None,
                 help="Explicit resolvent parameter (overrides the fraction)."),
    click.option("--tol", type=float, default=1e-12, show_default=True,
                 help="Relative stopping tolerance of the iteration."),
    click.option("--restart", type=click.IntRange(min=1), default=10, show_default=True,
                 help="Krylov steps per restart cycle."),
    click.option("--max-restarts", type=click.IntRange(min=1), default=50,
                 show_default=True, help="Restart cycle budget."),
    click.option("--quad-steps", type=click.IntRange(min=1), default=5, show_default=True,
                 help="Quadrature nodes for diagonal estimates."),
]

_OUTPUT_OPTS = [
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                 show_default=True, help="Output format."),
    click.option("--out", type=click.Path(), default=None,
                 help="Output path (stdout when omitted)."),
    click.option("--server", default=None,
                 help="Base URL of a running service (in-process when omitted)."),
]

_REPLICATION_OPTS = [
    click.option("--seeds", default=None,
                 help="Comma-separated generator seeds, one replicate per seed."),
    click.option("--reps", type=click.IntRange(min=1), default=None,
                 help="Replicate count (seeds 0..N-1 unless --seeds is given)."),
]


@click.group(cls=_Cli, name="netcomm")
@click.version_option(version=netcomm.__version__, prog_name="netcomm")
def main() -> None:
    """Walk-based network analysis: centrality scores, communicability
    indices, ranking comparisons and kernel benchmarks."""


def _build_config(**kw: Any) -> ExperimentConfig:
    try:
        seeds_text = kw.pop("seeds", None)
        reps = kw.pop("reps", None)
        if seeds_text is not None or reps is not None:
            kw["seeds"], kw["reps"] = _resolve_replication(seeds_text, reps)
        if "top_percents" in kw and isinstance(kw["top_percents"], str):
            kw["top_percents"] = _parse_percent_list(kw["top_percents"])
        cfg = ExperimentConfig(**kw)
        cfg.validate()
        return cfg
    except ValueError as exc:
        _fail(str(exc), 1)
        raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# commands


@main.command()
@click.option("--generate", "generate_spec", required=True,
              help='Generator spec, e.g. "smallw:n=5000,d=1,p=0.1".')
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True,
              help="Edge-list destination; metadata lands next to it.")
@click.option("--server", default=None,
              help="Base URL of a running service (in-process when omitted).")
def generate(generate_spec: str, seed: int, out: str, server: str | None) -> None:
    """Generate a graph and write its canonical edge list plus a
    JSON metadata sidecar."""
    client = ServiceClient(server)
    body = _call(client, "/generate", {"spec": generate_spec, "seed": seed})
    Path(out).write_text(body["edge_list"])
    sidecar = schemas.GenerateSidecar(
        spec=body["spec"], seed=body["seed"], **body["graph"]
    )
    Path(out + ".meta.json").write_text(_json_text(sidecar.model_dump()))
    info = body["graph"]
    click.echo(f"wrote {out}: n={info['n']} m={info['m']}", err=True)


@main.command()
@_apply(_INPUT_OPTS)
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed when --generate is used.")
@click.option("--method", type=click.Choice(METHODS), default="exp-total",
              show_default=True)
@_apply(_SOLVER_OPTS)
@_apply(_OUTPUT_OPTS)
def centrality(seed: int, **kw: Any) -> None:
    """Score every node and rank them (CSV: node_id, score, rank)."""
    cfg = _build_config(seeds=str(seed), **kw)
    client = ServiceClient(cfg.server)
    body = _call(client, "/centrality", {
        "graph": cfg.graph_payload(cfg.seeds[0]),
        "method": cfg.method,
        "beta": cfg.beta,
        "alpha_fraction": cfg.alpha_fraction,
        "alpha": cfg.alpha,
        "settings": cfg.settings_payload(),
        "include_report": cfg.fmt == "json",
    })
    if cfg.fmt == "json":
        _write_output(_json_text(body), cfg.out)
        return
    scores = body["scores"]
    rank_of = {node: pos + 1 for pos, node in enumerate(body["ranking"])}
    rows: list[Sequence[Any]] = [("node_id", "score", "rank")]
    rows += [(i, _fmt_value(scores[i]), rank_of[i]) for i in range(len(scores))]
    _write_output(_csv(rows), cfg.out)


@main.command()
@_apply(_INPUT_OPTS)
@click.option("--method-a", type=click.Choice(METHODS), default="exp-total",
              show_default=True)
@click.option("--method-b", type=click.Choice(METHODS), default="exp-subgraph",
              show_default=True)
@click.option("--top-percents", default="10,1", show_default=True,
              help="Comma-separated top-percent cutoffs.")
@click.option("--top-k", type=click.IntRange(min=1), default=None,
              help="Explicit prefix length evaluated alongside the percents.")
@click.option("--curve", is_flag=True, help="Include the per-depth isim curve.")
@_apply(_SOLVER_OPTS)
@_apply(_REPLICATION_OPTS)
@_apply(_OUTPUT_OPTS)
def compare(method_a: str, method_b: str, top_k: int | None, curve: bool,
            **kw: Any) -> None:
    """Compare the rankings of two methods on the same graph."""
    cfg = _build_config(method=method_a, method_b=method_b, **kw)
    client = ServiceClient(cfg.server)
    bodies = []
    for seed in cfg.seeds:
        bodies.append(_call(client, "/compare", {
            "graph": cfg.graph_payload(seed),
            "method_a": cfg.method,
            "method_b": cfg.method_b,
            "beta": cfg.beta,
            "alpha_fraction": cfg.alpha_fraction,
            "alpha": cfg.alpha,
            "settings": cfg.settings_payload(),
            "percents": list(cfg.top_percents),
            "top_k": top_k,
            "include_curve": curve,
        }))
    if cfg.reps == 1:
        _write_compare_single(bodies[0], cfg, top_k, curve)
    else:
        _write_compare_replicated(bodies, cfg, top_k, curve)


def _write_compare_single(body: dict[str, Any], cfg: ExperimentConfig,
                          top_k: int | None, curve: bool) -> None:
    if cfg.fmt == "json":
        _write_output(_json_text(body), cfg.out)
        return
    rows: list[Sequence[Any]] = [("metric", "value")]
    rows.append(("cc_full", _fmt_value(body["cc_full"])))
    for p in cfg.top_percents:
        key = _percent_key(p)
        rows.append((f"cc_top_{key}", _fmt_value(body["cc_top"][key])))
    rows.append(("isim_full", _fmt_value(body["isim_full"])))
    for p in cfg.top_percents:
        key = _percent_key(p)
        rows.append((f"isim_top_{key}", _fmt_value(body["isim_top"][key])))
    if top_k is not None:
        rows.append(("cc_top_k", _fmt_value(body["cc_top_k"])))
        rows.append(("isim_top_k", _fmt_value(body["isim_top_k"])))
    if curve and body.get("isim_curve") is not None:
        for k, value in enumerate(body["isim_curve"], start=1):
            rows.append((f"isim_curve_{k}", _fmt_value(value)))
    _write_output(_csv(rows), cfg.out)


def _write_compare_replicated(bodies: list[dict[str, Any]], cfg: ExperimentConfig,
                              top_k: int | None, curve: bool) -> None:
    percent_keys = [_percent_key(p) for p in cfg.top_percents]
    curves = [b["isim_curve"] for b in bodies] if curve else []
    aggregate = schemas.CompareAggregate(
        cc_full=_stat([b["cc_full"] for b in bodies]),
        cc_top={k: _stat_optional([b["cc_top"][k] for b in bodies]) for k in percent_keys},
        isim_full=_stat([b["isim_full"] for b in bodies]),
        isim_top={k: _stat([b["isim_top"][k] for b in bodies]) for k in percent_keys},
        cc_top_k=(_stat_optional([b["cc_top_k"] for b in bodies])
                  if top_k is not None else None),
        isim_top_k=(_stat([b["isim_top_k"] for b in bodies])
                    if top_k is not None else None),
        isim_curve_mean=(np.mean(curves, axis=0).tolist() if curves else None),
        isim_curve_std=(np.std(curves, axis=0, ddof=1).tolist() if curves else None),
    )
    if cfg.fmt == "json":
        payload = schemas.CompareReplication(
            spec=cfg.generate_spec or "",
            seeds=list(cfg.seeds),
            replicates=[schemas.CompareResponse(**b) for b in bodies],
            aggregate=aggregate,
        )
        _write_output(_json_text(payload.model_dump(mode="json")), cfg.out)
        return
    rows: list[Sequence[Any]] = [("metric", "mean", "std")]
    rows.append(_stat_row("cc_full", aggregate.cc_full))
    for key in percent_keys:
        rows.append(_stat_row(f"cc_top_{key}", aggregate.cc_top[key]))
    rows.append(_stat_row("isim_full", aggregate.isim_full))
    for key in percent_keys:
        rows.append(_stat_row(f"isim_top_{key}", aggregate.isim_top[key]))
    if top_k is not None:
        rows.append(_stat_row("cc_top_k", aggregate.cc_top_k))
        rows.append(_stat_row("isim_top_k", aggregate.isim_top_k))
    if aggregate.isim_curve_mean is not None:
        stds = aggregate.isim_curve_std or []
        for k, mean in enumerate(aggregate.isim_curve_mean, start=1):
            std = stds[k - 1] if k - 1 < len(stds) else None
            rows.append((f"isim_curve_{k}", _fmt_value(mean), _fmt_value(std)))
    _write_output(_csv(rows), cfg.out)


_REPORT_FIELDS = (
    "kernel", "n", "m", "C", "EE", "C_over_n", "C_over_m", "EE_over_n",
    "lambda1", "lambda2", "upper_bound", "bounds_ok", "spectral_converged",
    "log_normalized_C", "beta", "alpha", "alpha_fraction",
)
_REPORT_NUMERIC = tuple(
    f for f in _REPORT_FIELDS if f not in ("kernel", "bounds_ok", "spectral_converged")
)


@main.command()
@_apply(_INPUT_OPTS)
@click.option("--kernel", type=click.Choice(["exp", "resolvent"]), default="exp",
              show_default=True)
@_apply(_SOLVER_OPTS)
@_apply(_REPLICATION_OPTS)
@_apply(_OUTPUT_OPTS)
def report(kernel: str, **kw: Any) -> None:
    """Whole-network communicability report (C, EE, bounds, spectrum)."""
    cfg = _build_config(**kw)
    client = ServiceClient(cfg.server)
    bodies = []
    for seed in cfg.seeds:
        bodies.append(_call(client, "/report", {
            "graph": cfg.graph_payload(seed),
            "kernel": kernel,
            "beta": cfg.beta,
            "alpha_fraction": cfg.alpha_fraction,
            "alpha": cfg.alpha,
            "settings": cfg.settings_payload(),
        }))
    if cfg.reps == 1:
        body = bodies[0]
        if cfg.fmt == "json":
            _write_output(_json_text(body), cfg.out)
            return
        rows: list[Sequence[Any]] = [("metric", "value")]
        rep = body["report"]
        for name in _REPORT_FIELDS:
            rows.append((name, _fmt_value(rep[name])))
        _write_output(_csv(rows), cfg.out)
        return
    _write_report_replicated(bodies, cfg)


def _write_report_replicated(bodies: list[dict[str, Any]], cfg: ExperimentConfig) -> None:
    reports = [b["report"] for b in bodies]
    aggregate = {
        name: _stat_optional([r[name] for r in reports]) for name in _REPORT_NUMERIC
    }
    if cfg.fmt == "json":
        payload = schemas.ReportReplication(
            spec=cfg.generate_spec or "",
            seeds=list(cfg.seeds),
            replicates=[schemas.ReportResponse(**b) for b in bodies],
            aggregate=aggregate,
        )
        _write_output(_json_text(payload.model_dump(mode="json")), cfg.out)
        return
    rows: list[Sequence[Any]] = [("metric", "mean", "std")]
    for name in _REPORT_FIELDS:
        if name in _REPORT_NUMERIC:
            rows.append(_stat_row(name, aggregate[name]))
        else:
            values = [r[name] for r in reports]
            uniform = all(v == values[0] for v in values)
            rows.append((name, _fmt_value(values[0]) if uniform else "--", "--"))
    _write_output(_csv(rows), cfg.out)


@main.command()
@_apply(_INPUT_OPTS)
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed when --generate is used.")
@click.option("--method", type=click.Choice(METHODS), default="exp-total",
              show_default=True)
@click.option("--reps", type=click.IntRange(min=1), default=3, show_default=True,
              help="Timing repetitions on the same graph.")
@_apply(_OUTPUT_OPTS)
def bench(seed: int, reps: int, method: str, **kw: Any) -> None:
    """Time the load, spectral and kernel phases of one method."""
    cfg = _build_config(method=method, seeds=str(seed), **kw)
    client = ServiceClient(cfg.server)
    body = _call(client, "/bench", {
        "graph": cfg.graph_payload(cfg.seeds[0]),
        "method": cfg.method,
        "repetitions": reps,
    })
    if cfg.fmt == "json":
        _write_output(_json_text(body), cfg.out)
        return
    rows: list[Sequence[Any]] = [
        ("rep", "load_seconds", "lambda1_seconds", "kernel_seconds", "total_seconds")
    ]
    for i, run in enumerate(body["runs"], start=1):
        rows.append((i, _fmt_value(run["load_seconds"]),
                     _fmt_value(run["lambda1_seconds"]),
                     _fmt_value(run["kernel_seconds"]),
                     _fmt_value(run["total_seconds"])))
    _write_output(_csv(rows), cfg.out)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port)
