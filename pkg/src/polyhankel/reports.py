"""Measure config files and report serialisation.

A measure config is a JSON document::

    {"n": 2, "factor": {"family": "power_weight", "beta": 1}}
    {"n": 2, "factors": [{"family": "atomic", "atoms": [["1/2", "1/2"], ...]}, ...]}

Rationals are written as ``"p/q"`` strings (integers may be bare). Reports
are CSV tables or JSON objects; JSON reports carry a ``kind`` and are
checked against the schemas below before they are written.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import jsonschema

from .moments import Atomic, InvalidParameter, MeasureError, PowerWeight, ProductMeasure
from .numeric import format_real


class ConfigError(MeasureError):
    """Malformed measure config."""


def _number(x, where: str):
    if isinstance(x, bool):
        raise ConfigError(f"{where}: boolean is not a number")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"{where}: not a rational literal {x!r}") from None
    raise ConfigError(f"{where}: expected a number or 'p/q' string, got {x!r}")


def _factor(spec, where: str):
    if not isinstance(spec, dict):
        raise ConfigError(f"{where}: factor must be an object")
    family = spec.get("family")
    if family == "power_weight":
        beta = spec.get("beta", 1)
        if isinstance(beta, str):
            beta = _number(beta, f"{where}.beta")
            if beta.denominator != 1:
                raise InvalidParameter(f"{where}: PowerWeight needs an integer beta, got {beta}")
            beta = int(beta)
        return PowerWeight(beta)
    if family == "atomic":
        atoms = spec.get("atoms")
        if not isinstance(atoms, list):
            raise ConfigError(f"{where}: atomic factor needs an 'atoms' list")
        pairs = []
        for i, pair in enumerate(atoms):
            if not isinstance(pair, list) or len(pair) != 2:
                raise ConfigError(f"{where}.atoms[{i}]: expected [t, w]")
            pairs.append((_number(pair[0], f"{where}.atoms[{i}]"), _number(pair[1], f"{where}.atoms[{i}]")))
        return Atomic(tuple(pairs), tail_incomplete=bool(spec.get("tail_incomplete", False)))
    raise ConfigError(f"{where}: unknown family {family!r}")


def measure_from_dict(doc: dict) -> ProductMeasure:
    if not isinstance(doc, dict):
        raise ConfigError("measure config must be a JSON object")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigError(f"'n' must be a positive integer, got {n!r}")
    if "factors" in doc:
        specs = doc["factors"]
        if not isinstance(specs, list) or len(specs) != n:
            raise ConfigError(f"'factors' must list exactly n={n} factors")
    elif "factor" in doc:
        specs = [doc["factor"]] * n
    else:
        raise ConfigError("config needs 'factors' or 'factor'")
    return ProductMeasure(tuple(_factor(s, f"factors[{i}]") for i, s in enumerate(specs)))


def load_measure(path) -> ProductMeasure:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return measure_from_dict(doc)


def measure_to_dict(pm: ProductMeasure) -> dict:
    factors = []
    for f in pm.factors:
        if isinstance(f, PowerWeight):
            factors.append({"family": "power_weight", "beta": f.beta})
        else:
            d = {"family": "atomic", "atoms": [[format_real(t), format_real(w)] for t, w in f.atoms]}
            if f.tail_incomplete:
                d["tail_incomplete"] = True
            factors.append(d)
    return {"n": pm.n, "factors": factors}


# ---------------------------------------------------------------------------
# writers


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def json_text(obj: dict) -> str:
    validate_report(obj)
    return json.dumps(obj, indent=2) + "\n"


def emit(text: str, out=None, stream=None) -> None:
    if out is None or out == "-":
        (stream or sys.stdout).write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# schemas

_RATIONAL = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
_INDEX = {"type": "array", "items": {"type": "integer"}}

VERDICT_SCHEMA = {
    "type": "object",
    "required": ["kind", "verdict", "witness_s", "witness_part", "h", "g"],
    "properties": {
        "kind": {"const": "verdict"},
        "verdict": {"enum": ["always_compact_dim1", "compact", "not_compact"]},
        "witness_s": {"oneOf": [_INDEX, {"type": "null"}]},
        "witness_part": {"oneOf": [{"type": "string", "pattern": r"^[TD](,[TD])*$"}, {"type": "null"}]},
        "s": {"oneOf": [_INDEX, {"type": "null"}]},
        "part": {"oneOf": [{"type": "string"}, {"type": "null"}]},
        "h": {"type": ["string", "null"]},
        "g": {"type": ["string", "null"]},
    },
    "allOf": [
        {
            "if": {"properties": {"verdict": {"const": "not_compact"}}},
            "then": {"properties": {"witness_s": _INDEX, "witness_part": {"type": "string"}}},
        },
        {
            "if": {"properties": {"verdict": {"const": "compact"}}},
            "then": {"properties": {"h": {"type": "string"}, "g": {"type": "string"}}},
        },
    ],
}

MANIFEST_SCHEMA = {
    "type": "object",
    "required": ["kind", "n", "K", "radii", "quadrature", "layers"],
    "properties": {
        "kind": {"const": "counterexample"},
        "n": {"type": "integer", "minimum": 2},
        "K": {"type": "integer", "minimum": 2},
        "radii": {"type": "array", "items": _RATIONAL},
        "quadrature": {"type": "object", "required": ["radial_order", "angular_order"]},
        "layers": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["k", "ring", "arc_half_width", "sigma", "kernel_integral", "kernel_budget"],
                "properties": {
                    "k": {"type": "integer", "minimum": 1},
                    "ring": {"type": "array", "items": _RATIONAL, "minItems": 2, "maxItems": 2},
                    "arc_half_width": _RATIONAL,
                    "sigma": _RATIONAL,
                    "kernel_integral": {"type": "number", "minimum": 0},
                    "kernel_budget": {"type": "number"},
                },
            },
        },
    },
}

TABLE_SCHEMA = {
    "type": "object",
    "required": ["kind", "columns", "rows"],
    "properties": {
        "kind": {"enum": ["moments", "gram", "decay", "cesaro", "limit", "q_profile"]},
        "columns": {"type": "array", "items": {"type": "string"}},
        "rows": {"type": "array", "items": {"type": "array"}},
    },
}

SCHEMAS = {"verdict": VERDICT_SCHEMA, "counterexample": MANIFEST_SCHEMA}


def schema_for(obj: dict) -> dict:
    return SCHEMAS.get(obj.get("kind"), TABLE_SCHEMA)


def validate_report(obj: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``obj`` is not a well-formed report."""
    jsonschema.validate(obj, schema_for(obj))
    if obj.get("kind") in TABLE_SCHEMA["properties"]["kind"]["enum"]:
        width = len(obj["columns"])
        for row in obj["rows"]:
            if len(row) != width:
                raise jsonschema.ValidationError(f"row of width {len(row)} in a {width}-column table")


def table_json(kind: str, header: Sequence[str], rows: Iterable[Sequence], **extra) -> dict:
    return {"kind": kind, "columns": list(header), "rows": [list(r) for r in rows], **extra}
