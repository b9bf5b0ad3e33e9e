"""Config documents (YAML or JSON) for the command line.

Example::

    input:
      dataset: tiktok          # or  csv: path/to/series.csv
    seed: 42
    stages:
      - kind: oversample
        params: {n: 60, strategy: exp_adaptive}
      - kind: integral_match
      - kind: smooth
        params: {s: 1.0}
      - kind: noise
        params: {snr_db: 30}
    output:
      csv: out.csv
      json: out.json
      svg: out.svg
      average_n: 60

Relative paths resolve against the directory of the config file.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np
import yaml

from .core import TimeSeries, validate
from .datasets import BUILTIN, Registry
from .errors import ValidationError
from .pipeline import STAGE_KINDS, PipelineConfig, StageDescriptor, resolve_stage

_number = {"type": "number"}
_seed = {"type": "integer", "minimum": 0, "maximum": 2**64 - 1}

STAGE_PARAMS = {
    "oversample": {
        "n": {"type": "integer", "minimum": 2},
        "strategy": {"type": "string"},
        "alpha": _number,
        "lam": _number,
        "gamma": _number,
    },
    "integral_match": {"kappa": _number},
    "smooth": {"s": {"type": ["number", "null"]}},
    "repeat": {"k": {"type": "integer", "minimum": 1}},
    "trend": {"expr": {"type": "string"}},
    "noise": {
        "snr_db": {"oneOf": [_number, {"type": "array", "items": _number}]},
        "std": _number,
        "seed": _seed,
    },
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["input"],
    "properties": {
        "input": {
            "type": "object",
            "additionalProperties": False,
            "minProperties": 1,
            "maxProperties": 1,
            "properties": {"dataset": {"type": "string"}, "csv": {"type": "string"}},
        },
        "seed": _seed,
        "stages": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["kind"],
                "properties": {
                    "kind": {"enum": list(STAGE_KINDS)},
                    "params": {"type": "object"},
                },
                "allOf": [
                    {
                        "if": {"properties": {"kind": {"const": kind}}},
                        "then": {
                            "properties": {
                                "params": {"type": "object", "additionalProperties": False, "properties": props}
                            }
                        },
                    }
                    for kind, props in STAGE_PARAMS.items()
                ],
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "csv": {"type": "string"},
                "json": {"type": "string"},
                "svg": {"type": "string"},
                "average_n": {"type": "integer", "minimum": 1},
            },
        },
    },
}


class ConfigError(ValidationError):
    """Config document rejected; ``path`` locates the offending key."""

    def __init__(self, message, path=""):
        super().__init__(f"{path or '<root>'}: {message}")
        self.path = path


@dataclass(frozen=True)
class OutputOptions:
    csv: Optional[Path] = None
    json: Optional[Path] = None
    svg: Optional[Path] = None
    average_n: Optional[int] = None


@dataclass(frozen=True)
class Document:
    """A validated config: the raw mapping plus what it resolves to."""

    raw: dict
    pipeline: PipelineConfig
    output: OutputOptions


def _path_str(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


def parse_document(raw, base_dir: Path = Path("."), registry: Registry = BUILTIN) -> Document:
    """Validate a decoded config mapping and resolve it into a pipeline."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    err = jsonschema.exceptions.best_match(validator.iter_errors(raw))
    if err is not None:
        raise ConfigError(err.message, _path_str(err.absolute_path))

    stages = []
    for i, item in enumerate(raw.get("stages", [])):
        params = item.get("params") or {}
        try:
            stage = StageDescriptor(item["kind"], params)
            resolve_stage(stage, i, 0)
            stages.append(stage)
        except ValidationError as exc:
            raise ConfigError(str(exc), f"stages[{i}]") from None

    source_spec = raw["input"]
    if "dataset" in source_spec:
        try:
            record = registry[source_spec["dataset"]]
        except ValidationError as exc:
            raise ConfigError(str(exc), "input.dataset") from None
        source = record.to_series
    else:
        path = base_dir / source_spec["csv"]
        source = lambda: read_csv(path)  # noqa: E731

    out = raw.get("output", {})
    output = OutputOptions(
        csv=base_dir / out["csv"] if "csv" in out else None,
        json=base_dir / out["json"] if "json" in out else None,
        svg=base_dir / out["svg"] if "svg" in out else None,
        average_n=out.get("average_n"),
    )
    return Document(raw, PipelineConfig(source, tuple(stages), raw.get("seed")), output)


def load_document(path, registry: Registry = BUILTIN) -> Document:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config: {exc}".replace("\n", " ")) from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    return parse_document(raw, path.parent, registry)


# --------------------------------------------------------------------------
# CSV series I/O


def format_series(ts: TimeSeries) -> str:
    """``x,y`` CSV text; ``repr`` of each float round-trips exactly."""
    buf = io.StringIO()
    buf.write("x,y\n")
    for xv, yv in zip(ts.x.tolist(), ts.y.tolist()):
        buf.write(f"{xv!r},{yv!r}\n")
    return buf.getvalue()


def write_csv(ts: TimeSeries, path) -> None:
    Path(path).write_text(format_series(ts), encoding="utf-8")


def parse_series(text: str, origin: str = "<csv>") -> TimeSeries:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["x", "y"]:
        raise ValidationError(f"{origin}: expected header 'x,y'")
    xs, ys = [], []
    for lineno, row in enumerate(rows[1:], 2):
        if not row:
            continue
        if len(row) != 2:
            raise ValidationError(f"{origin}:{lineno}: expected 2 fields, got {len(row)}")
        try:
            xs.append(float(row[0]))
            ys.append(float(row[1]))
        except ValueError:
            raise ValidationError(f"{origin}:{lineno}: non-numeric field") from None
    return validate(np.array(xs), np.array(ys))


def read_csv(path) -> TimeSeries:
    path = Path(path)
    return parse_series(path.read_text(encoding="utf-8"), str(path))
