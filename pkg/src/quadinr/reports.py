"""Machine-readable report assembly shared by every CLI command.

Reports validate against the schema shipped in data/report.schema.json.
Published hardware figures appear only under the clearly separated
"reference_values" key so computed results are never mixed with quoted
ones.
"""

from __future__ import annotations

import csv
import datetime
import importlib.resources
import io
import json

import jsonschema

from . import __version__

_SCHEMA = None


def report_schema() -> dict:
    global _SCHEMA
    if _SCHEMA is None:
        ref = importlib.resources.files("quadinr").joinpath("data/report.schema.json")
        _SCHEMA = json.loads(ref.read_text())
    return _SCHEMA


def _sanitize(obj):
    """Make numpy scalars/arrays JSON-friendly."""
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def build_report(command: str, inputs: dict, results: dict,
                 reference_values: dict | None = None,
                 seed: int | None = None,
                 timestamp: bool = True) -> dict:
    report = {
        "command": command,
        "tool_version": __version__,
        "seed": seed,
        "timestamp": (datetime.datetime.now(datetime.timezone.utc).isoformat()
                      if timestamp else None),
        "inputs": _sanitize(inputs),
        "results": _sanitize(results),
        "reference_values": _sanitize(reference_values),
    }
    jsonschema.validate(report, report_schema())
    return report


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False)


def loads(text: str) -> dict:
    return json.loads(text)


def write_report(report: dict, path=None) -> str:
    text = dumps(report)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text


def _flatten(prefix: str, obj, row: dict):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, row)
    elif isinstance(obj, list):
        row[prefix] = json.dumps(obj)
    else:
        row[prefix] = obj


def rows_to_csv(rows: list[dict]) -> str:
    """Flatten a list of nested row dicts into CSV text."""
    flat_rows = []
    for r in rows:
        flat: dict = {}
        _flatten("", r, flat)
        flat_rows.append(flat)
    fields: list[str] = []
    for fr in flat_rows:
        for k in fr:
            if k not in fields:
                fields.append(k)
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=fields)
    writer.writeheader()
    for fr in flat_rows:
        writer.writerow(fr)
    return out.getvalue()
