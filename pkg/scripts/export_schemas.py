"""Regenerate the JSON schemas shipped under schemas/.

Every JSON payload the service or CLI can emit has a pydantic model; this
script dumps each model's JSON schema so external consumers can validate
outputs without importing the package. Run from the repository root:

    python3 scripts/export_schemas.py
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from netcomm.service import schemas

MODELS = [
    schemas.HealthResponse,
    schemas.ErrorDetail,
    schemas.GenerateResponse,
    schemas.GenerateSidecar,
    schemas.CentralityResponse,
    schemas.CompareResponse,
    schemas.CompareReplication,
    schemas.ReportResponse,
    schemas.ReportReplication,
    schemas.BenchResponse,
]


def _snake(name: str) -> str:
    return re.sub(r"(?<!^)(?=[A-Z])", "_", name).lower()


def main() -> None:
    out_dir = Path(__file__).resolve().parent.parent / "schemas"
    out_dir.mkdir(exist_ok=True)
    for model in MODELS:
        path = out_dir / f"{_snake(model.__name__)}.schema.json"
        schema = model.model_json_schema()
        path.write_text(json.dumps(schema, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path.relative_to(out_dir.parent)}")


if __name__ == "__main__":
    main()
