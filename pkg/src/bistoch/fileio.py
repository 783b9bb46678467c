"""File formats: JSON operators and collections, CSV traces, JSON reports.

Operator files: {"weights": [...], "matrix": [[...]]}.
Collection files: {"weights": [...], "functions": [[...], ...]} where each
function row has one value per point.  All numbers are decimal doubles.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .entropy import EntropyTrace
from .errors import SpaceMismatch, ValidationError
from .operator import DenseOperator, from_matrix
from .space import Collection, FiniteSpace, Observable, make_space


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: expected a JSON object")
    return data


def load_operator(path) -> DenseOperator:
    data = _load_json(path)
    if "weights" not in data or "matrix" not in data:
        raise ValidationError(f"{path}: operator files need 'weights' and 'matrix'")
    space = make_space(data["weights"])
    return from_matrix(space, data["matrix"])


def save_operator(path, operator: DenseOperator) -> None:
    payload = {
        "weights": list(operator.space.weights),
        "matrix": operator.matrix.tolist(),
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def load_collection(path, space: FiniteSpace | None = None) -> tuple[FiniteSpace, Collection]:
    data = _load_json(path)
    if "weights" not in data or "functions" not in data:
        raise ValidationError(f"{path}: collection files need 'weights' and 'functions'")
    own_space = make_space(data["weights"])
    if space is not None and own_space != space:
        raise SpaceMismatch(f"{path}: collection weights differ from the operator's")
    target = space if space is not None else own_space
    rows = data["functions"]
    if not isinstance(rows, list) or not rows:
        raise ValidationError(f"{path}: 'functions' must be a non-empty list of rows")
    functions = [Observable(target, row) for row in rows]
    return target, Collection(functions)


def save_collection(path, collection: Collection) -> None:
    payload = {
        "weights": list(collection.space.weights),
        "functions": [f.values.tolist() for f in collection],
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def _scale(value: float, base: str) -> float:
    return value / math.log(2) if base == "2" else value


def trace_csv(trace: EntropyTrace, base: str = "e") -> str:
    """Render a trace as CSV with columns n,H,H_over_n."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n", "H", "H_over_n"])
    for row in trace.rows:
        writer.writerow([row.n, repr(_scale(row.entropy, base)), repr(_scale(row.slope, base))])
    return out.getvalue()


def rows_csv(header: list[str], rows: list[list]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return out.getvalue()


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def emit(text: str, output_path=None) -> None:
    if output_path is None:
        print(text, end="")
    else:
        Path(output_path).write_text(text, encoding="utf-8")
