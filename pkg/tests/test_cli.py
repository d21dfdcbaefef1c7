"""Command-line client exercised through the installed console script."""

from __future__ import annotations

import csv
import io
import json
import shutil
import subprocess
from pathlib import Path

import jsonschema
import pytest

NETCOMM = shutil.which("netcomm")

pytestmark = pytest.mark.skipif(NETCOMM is None, reason="console script not installed")

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "schemas"


def run_cli(*args, expect=0):
    proc = subprocess.run(
        [NETCOMM, *args], capture_output=True, text=True, timeout=300,
    )
    assert proc.returncode == expect, proc.stderr
    return proc


def load_schema(name):
    return json.loads((SCHEMA_DIR / name).read_text())


def validate(payload, schema_name):
    jsonschema.validate(payload, load_schema(schema_name))


def read_csv(text):
    return list(csv.reader(io.StringIO(text)))


def test_generate_ring(tmp_path):
    out = tmp_path / "ring.txt"
    run_cli("generate", "--generate", "ring:n=6", "--seed", "0", "--out", str(out))
    assert out.read_text() == "0 1\n0 5\n1 2\n2 3\n3 4\n4 5\n"
    sidecar = json.loads((tmp_path / "ring.txt.meta.json").read_text())
    validate(sidecar, "generate_sidecar.schema.json")
    assert sidecar["n"] == 6
    assert sidecar["m"] == 6


def test_generate_reruns_identical(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    for out in (a, b):
        run_cli("generate", "--generate", "pref:n=40,d=2", "--seed", "7",
                "--out", str(out))
    assert a.read_bytes() == b.read_bytes()


def test_centrality_csv(tmp_path, karate_path):
    out = tmp_path / "scores.csv"
    run_cli("centrality", "--input", str(karate_path), "--method", "exp-total",
            "--format", "csv", "--out", str(out))
    rows = read_csv(out.read_text())
    assert rows[0] == ["node_id", "score", "rank"]
    assert len(rows) == 35
    by_node = {int(r[0]): r for r in rows[1:]}
    assert by_node[33][2] == "1"
    assert by_node[0][2] == "2"
    top_score = float(by_node[33][1])
    assert all(float(r[1]) <= top_score for r in rows[1:])


def test_centrality_json_schema(tmp_path, karate_path):
    out = tmp_path / "scores.json"
    run_cli("centrality", "--input", str(karate_path), "--method", "res-subgraph",
            "--format", "json", "--out", str(out))
    payload = json.loads(out.read_text())
    validate(payload, "centrality_response.schema.json")
    assert payload["report"]["EE_over_n"] == pytest.approx(1.2090, abs=5e-3)


def test_compare_csv(tmp_path, karate_path):
    out = tmp_path / "cmp.csv"
    run_cli("compare", "--input", str(karate_path), "--method-a", "exp-total",
            "--method-b", "exp-subgraph", "--top-percents", "10,1",
            "--format", "csv", "--out", str(out))
    rows = dict(read_csv(out.read_text())[1:])
    assert float(rows["isim_top_1"]) == 0.0
    assert float(rows["isim_top_10"]) == pytest.approx(1 / 12, abs=1e-6)
    assert float(rows["isim_full"]) == pytest.approx(0.0439, abs=5e-3)


def test_compare_replicated(tmp_path):
    out = tmp_path / "rep.json"
    run_cli("compare", "--generate", "pref:n=300,d=8", "--seeds", "0,1,2",
            "--method-a", "exp-total", "--method-b", "exp-subgraph",
            "--format", "json", "--out", str(out))
    payload = json.loads(out.read_text())
    validate(payload, "compare_replication.schema.json")
    assert len(payload["replicates"]) == 3
    agg = payload["aggregate"]
    assert agg["cc_full"]["mean"] == pytest.approx(1.0)
    assert agg["isim_full"]["mean"] == 0.0


def test_report_fields(tmp_path, karate_path):
    out = tmp_path / "report.csv"
    run_cli("report", "--input", str(karate_path), "--kernel", "resolvent",
            "--format", "csv", "--out", str(out))
    rows = dict(read_csv(out.read_text())[1:])
    assert rows["kernel"] == "resolvent"
    assert float(rows["C_over_n"]) == pytest.approx(5.1263, abs=5e-3)
    assert rows["bounds_ok"] == "true"


def test_report_replicated(tmp_path):
    out = tmp_path / "rep.csv"
    run_cli("report", "--generate", "smallw:n=100,d=2,p=0.1", "--reps", "3",
            "--format", "csv", "--out", str(out))
    rows = read_csv(out.read_text())
    assert rows[0] == ["metric", "mean", "std"]
    table = {r[0]: r[1:] for r in rows[1:]}
    assert table["kernel"] == ["exp", "--"]
    assert float(table["n"][0]) == 100.0
    assert float(table["n"][1]) == 0.0


def test_bench_csv(tmp_path):
    out = tmp_path / "bench.csv"
    run_cli("bench", "--generate", "pref:n=200,d=2", "--reps", "2",
            "--format", "csv", "--out", str(out))
    rows = read_csv(out.read_text())
    assert rows[0] == ["rep", "load_seconds", "lambda1_seconds",
                       "kernel_seconds", "total_seconds"]
    assert len(rows) == 3
    assert all(float(r[4]) > 0 for r in rows[1:])


def test_csv_deterministic(tmp_path):
    args = ("compare", "--generate", "smallw:n=80,d=2,p=0.2", "--seeds", "4,5",
            "--method-a", "exp-total", "--method-b", "res-total",
            "--format", "csv")
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    run_cli(*args, "--out", str(a))
    run_cli(*args, "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_exit_missing_file(tmp_path):
    proc = run_cli("centrality", "--input", str(tmp_path / "nope.txt"), expect=1)
    assert "error" in proc.stderr.lower()


def test_exit_both_sources(tmp_path, karate_path):
    run_cli("centrality", "--input", str(karate_path),
            "--generate", "ring:n=4", expect=1)


def test_exit_bad_method(karate_path):
    run_cli("centrality", "--input", str(karate_path),
            "--method", "bogus", expect=1)


def test_exit_alpha_out_of_range(karate_path):
    proc = run_cli("centrality", "--input", str(karate_path),
                   "--method", "res-total", "--alpha", "9.0", expect=1)
    assert "alpha" in proc.stderr


def test_exit_nonconvergence(karate_path):
    run_cli("centrality", "--input", str(karate_path), "--restart", "1",
            "--max-restarts", "1", expect=2)


@pytest.fixture(scope="module")
def karate_path(tmp_path_factory):
    from netcomm.datasets import karate_club
    from netcomm.graph import dump_edges

    path = tmp_path_factory.mktemp("data") / "karate.txt"
    path.write_text(dump_edges(karate_club()))
    return path
