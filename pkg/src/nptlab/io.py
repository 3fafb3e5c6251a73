"""JSON wire formats for operators, pure states, construction specs and reports."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .constructions import ConstructionSpec, SpecError
from .qcore import BipartitePureState, ComplexOperator

SCHEMA_VERSION = "1.0"


def _pairs(arr: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(arr).reshape(-1)]


def _complex(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def operator_to_json(op: ComplexOperator) -> dict:
    return {
        "dimA": op.dimA,
        "dimB": op.dimB,
        "matrix": [_pairs(row) for row in op.data],
    }


def operator_from_json(obj: dict) -> ComplexOperator:
    try:
        data = _complex(obj["matrix"])
        return ComplexOperator(data, int(obj["dimA"]), int(obj["dimB"]))
    except KeyError as exc:
        raise ValueError(f"operator JSON missing field {exc}") from None


def state_to_json(psi: BipartitePureState) -> dict:
    return {"dimA": psi.dimA, "dimB": psi.dimB, "vector": _pairs(psi.amplitudes)}


def state_from_json(obj: dict) -> BipartitePureState:
    try:
        return BipartitePureState(_complex(obj["vector"]), int(obj["dimA"]), int(obj["dimB"]))
    except KeyError as exc:
        raise ValueError(f"state JSON missing field {exc}") from None


def load_schema(name: str) -> dict:
    text = resources.files("nptlab.schemas").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(obj, name: str) -> None:
    """Validate against a shipped schema; raises ``ValueError`` naming the failing field."""
    import jsonschema

    try:
        jsonschema.validate(obj, load_schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValueError(f"{name} schema violation at {where}: {exc.message}") from None


def read_json(path: str | Path):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def load_spec(path: str | Path) -> ConstructionSpec:
    obj = read_json(path)
    validate(obj, "construction_spec")
    try:
        return ConstructionSpec.from_dict(obj)
    except TypeError as exc:
        raise SpecError(str(exc)) from None


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
