"""JSON system files: parsing, validation and canonical serialisation.

Weights are exact: JSON integers or strings "p/q". Floats are refused.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import jsonschema

from .system import DirectTerm, HypergraphSystem, normalized
from .tensor import SparseTensor, TensorError

SYSTEM_SCHEMA_ID = "hyperobs.system/1"

_weight = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$"},
    ]
}
_tensor = {
    "type": "object",
    "required": ["order", "entries"],
    "additionalProperties": False,
    "properties": {
        "order": {"type": "integer", "minimum": 1},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["idx", "w"],
                "additionalProperties": False,
                "properties": {
                    "idx": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
                    "w": _weight,
                },
            },
        },
    },
}
SYSTEM_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["n"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SYSTEM_SCHEMA_ID},
        "n": {"type": "integer", "minimum": 1},
        "labels": {"type": "array", "items": {"type": "string"}},
        "normalize_weights": {"type": "boolean"},
        "dynamics": {"type": "array", "items": _tensor},
        "inputs": {"type": "array", "items": {"type": "array", "items": _tensor}},
        "outputs": {"type": "array", "items": {"type": "array", "items": _tensor}},
        "direct": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["output", "input", "order", "entries"],
                "additionalProperties": False,
                "properties": {
                    "output": {"type": "integer", "minimum": 1},
                    "input": {"type": "integer", "minimum": 1},
                    "order": _tensor["properties"]["order"],
                    "entries": _tensor["properties"]["entries"],
                },
            },
        },
        "sigma": {"type": "array", "items": _weight},
        "design": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "d_max": {"type": "integer", "minimum": 1},
                "p": {"type": "integer", "minimum": 1},
                "r_relax": {"type": "integer", "minimum": 1},
            },
        },
    },
}


class SystemFileError(ValueError):
    """Invalid system file; ``where`` names the offending field or line."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where
        self.message = message


def parse_weight(w) -> Fraction:
    if isinstance(w, bool) or isinstance(w, float):
        raise ValueError(f"weight {w!r} is not exact")
    return Fraction(w.replace(" ", "")) if isinstance(w, str) else Fraction(w)


def format_weight(w: Fraction) -> str:
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


@dataclass
class SystemFile:
    """The raw file content: weights as written plus analysis settings."""

    system: HypergraphSystem
    normalize_weights: bool = False
    sigma: Optional[List[Fraction]] = None
    design: Dict[str, int] = field(default_factory=dict)

    def effective(self) -> HypergraphSystem:
        """The system to analyse, with factorial normalisation applied if requested."""
        return normalized(self.system) if self.normalize_weights else self.system


def _path(parts: Sequence) -> str:
    return "/".join(str(p) for p in parts) or "<root>"


def _tensor_from(spec: Dict, n: int, where: str) -> SparseTensor:
    order = spec["order"]
    T = SparseTensor(order, n)
    for k, e in enumerate(spec["entries"]):
        loc = f"{where}/entries/{k}"
        idx = tuple(e["idx"])
        if len(idx) != order:
            raise SystemFileError(loc + "/idx", f"has {len(idx)} indices, tensor order is {order}")
        if any(i > n for i in idx):
            raise SystemFileError(loc + "/idx", f"index out of range 1..{n}")
        try:
            T.add(idx, parse_weight(e["w"]))
        except (ValueError, ZeroDivisionError) as exc:
            raise SystemFileError(loc + "/w", str(exc)) from None
    return T


def system_from_dict(data: Dict) -> SystemFile:
    validator = jsonschema.Draft202012Validator(SYSTEM_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise SystemFileError(_path(e.absolute_path), e.message)
    n = data["n"]
    dyn = tuple(_tensor_from(t, n, f"dynamics/{k}") for k, t in enumerate(data.get("dynamics", [])))
    inputs = tuple(
        tuple(_tensor_from(t, n, f"inputs/{j}/{k}") for k, t in enumerate(ts)) for j, ts in enumerate(data.get("inputs", []))
    )
    outputs = tuple(
        tuple(_tensor_from(t, n, f"outputs/{i}/{k}") for k, t in enumerate(ts)) for i, ts in enumerate(data.get("outputs", []))
    )
    direct = []
    for k, d in enumerate(data.get("direct", [])):
        if d["output"] > len(outputs):
            raise SystemFileError(f"direct/{k}/output", f"refers to output {d['output']} but only {len(outputs)} exist")
        direct.append(DirectTerm(d["output"], d["input"], _tensor_from(d, n, f"direct/{k}")))
    labels = tuple(data.get("labels", ()))
    if labels and len(labels) != n:
        raise SystemFileError("labels", f"expected {n} labels, got {len(labels)}")
    sigma = None
    if "sigma" in data:
        if len(data["sigma"]) != n:
            raise SystemFileError("sigma", f"expected {n} entries, got {len(data['sigma'])}")
        try:
            sigma = [parse_weight(v) for v in data["sigma"]]
        except (ValueError, ZeroDivisionError) as exc:
            raise SystemFileError("sigma", str(exc)) from None
    try:
        sys = HypergraphSystem(n, dyn, inputs, outputs, tuple(direct), labels)
    except TensorError as exc:
        raise SystemFileError("<root>", str(exc)) from None
    return SystemFile(sys, bool(data.get("normalize_weights", False)), sigma, dict(data.get("design", {})))


def loads_system(text: str) -> SystemFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemFileError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return system_from_dict(data)


def load_system(path: str) -> SystemFile:
    with open(path, encoding="utf-8") as fh:
        return loads_system(fh.read())


def _tensor_dict(T: SparseTensor) -> Dict:
    return {
        "order": T.order,
        "entries": [{"idx": list(idx), "w": format_weight(w)} for idx, w in sorted(T.items())],
    }


def system_to_dict(sf: SystemFile) -> Dict:
    s = sf.system
    out: Dict[str, Any] = {"schema": SYSTEM_SCHEMA_ID, "n": s.n}
    if s.labels:
        out["labels"] = list(s.labels)
    out["normalize_weights"] = sf.normalize_weights
    out["dynamics"] = [_tensor_dict(T) for T in s.dynamics]
    if s.inputs:
        out["inputs"] = [[_tensor_dict(T) for T in ts] for ts in s.inputs]
    out["outputs"] = [[_tensor_dict(T) for T in ts] for ts in s.outputs]
    if s.direct:
        out["direct"] = [{"output": d.output, "input": d.input, **_tensor_dict(d.tensor)} for d in s.direct]
    if sf.sigma is not None:
        out["sigma"] = [format_weight(v) for v in sf.sigma]
    if sf.design:
        out["design"] = dict(sorted(sf.design.items()))
    return out


def dumps_system(sf: SystemFile) -> str:
    return json.dumps(system_to_dict(sf), indent=2, sort_keys=False) + "\n"
