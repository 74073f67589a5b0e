"""JSON files for spaces, weights and functions; JSON/CSV reports."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from .space import Ball, FiniteMetricMeasureSpace

__all__ = [
    "space_to_dict",
    "space_from_dict",
    "load_space",
    "save_space",
    "load_values",
    "save_values",
    "file_hash",
    "to_jsonable",
    "dumps_report",
    "write_report",
]


def space_to_dict(space: FiniteMetricMeasureSpace) -> dict:
    d = {"n": space.n, "distances": space.dist.tolist(), "measure": space.measure.tolist()}
    if space.labels is not None:
        d["labels"] = list(space.labels)
    if space.coords is not None:
        d["coords"] = space.coords.tolist()
    return d


def space_from_dict(d: dict) -> FiniteMetricMeasureSpace:
    dist = np.asarray(d["distances"], dtype=float)
    if "n" in d and int(d["n"]) != dist.shape[0]:
        raise ValueError(f"space file declares n={d['n']} but has {dist.shape[0]} rows")
    return FiniteMetricMeasureSpace(dist, d["measure"], labels=d.get("labels"), coords=d.get("coords"))


def load_space(path) -> FiniteMetricMeasureSpace:
    with open(path) as fh:
        return space_from_dict(json.load(fh))


def save_space(space: FiniteMetricMeasureSpace, path) -> None:
    Path(path).write_text(json.dumps(space_to_dict(space)) + "\n")


def load_values(path) -> np.ndarray:
    """Weight or function file: ``{"values": [...]}``."""
    with open(path) as fh:
        d = json.load(fh)
    return np.asarray(d["values"], dtype=float)


def save_values(values, path) -> None:
    Path(path).write_text(json.dumps({"values": np.asarray(values, dtype=float).tolist()}) + "\n")


def file_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def to_jsonable(obj):
    if isinstance(obj, Ball):
        return obj.to_dict()
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(v) for v in obj)
    if isinstance(obj, np.ndarray):
        if obj.dtype.kind == "f" and not np.isfinite(obj).all():
            return to_jsonable(obj.tolist())
        return obj.tolist()
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def dumps_report(report, fmt: str = "json", rows=None) -> str:
    """Serialize a report.  CSV needs ``rows`` (a list of flat dicts)."""
    if fmt == "json":
        return json.dumps(to_jsonable(report), indent=2) + "\n"
    if fmt == "csv":
        if not rows:
            raise ValueError("this report has no tabular form")
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(to_jsonable(row))
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def write_report(report, path=None, fmt: str = "json", rows=None) -> str:
    text = dumps_report(report, fmt, rows)
    if path is not None:
        Path(path).write_text(text)
    return text
