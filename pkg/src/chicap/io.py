"""JSON and CSV serialization against the published schemas.

Complex matrices are nested row-major lists of ``[re, im]`` pairs.
Non-finite reals are written as the strings ``Infinity``, ``-Infinity``
and ``NaN`` so every document stays strict JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math
from functools import cache
from importlib import resources

import numpy as np
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from .channel import CqChannel, Ensemble
from .errors import ValidationError
from .solver import CapacityReport

SCHEMAS = ("real", "matrix", "channel", "ensemble", "state", "fourier", "report", "family")


class SchemaError(ValidationError):
    """Document does not match its schema; ``path`` is a JSON pointer."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path


@cache
def _registry() -> Registry:
    root = resources.files("chicap") / "schemas"
    pairs = []
    for name in SCHEMAS:
        doc = json.loads((root / f"{name}.json").read_text())
        pairs.append((f"{name}.json", Resource.from_contents(doc)))
    return Registry().with_resources(pairs)


def schema(name: str) -> dict:
    return _registry()[f"{name}.json"].contents


def validate(doc, name: str) -> None:
    validator = Draft202012Validator(schema(name), registry=_registry())
    err = next(iter(sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))), None)
    if err is not None:
        pointer = "".join(f"/{p}" for p in err.absolute_path)
        raise SchemaError(err.message, pointer)


def real_to_json(x):
    if x is None:
        return None
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return int(x)
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return x


def real_from_json(x) -> float:
    return float(x)  # float() already parses the three special strings


def matrix_to_json(a) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def matrix_from_json(doc) -> np.ndarray:
    arr = np.asarray(doc, dtype=float)
    if arr.ndim != 3 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"matrix must be square, got shape {arr.shape[:2]}")
    return arr[..., 0] + 1j * arr[..., 1]


def channel_to_json(ch: CqChannel) -> dict:
    return {"dim": ch.dim, "outputs": [matrix_to_json(s) for s in ch.outputs]}


def channel_from_json(doc) -> CqChannel:
    validate(doc, "channel")
    outs = []
    for i, m in enumerate(doc["outputs"]):
        a = matrix_from_json(m)
        if a.shape[0] != doc["dim"]:
            raise SchemaError(f"output has dimension {a.shape[0]}, expected {doc['dim']}", f"/outputs/{i}")
        outs.append(a)
    return CqChannel(np.stack(outs))


def ensemble_from_json(doc) -> Ensemble:
    validate(doc, "ensemble")
    return Ensemble(np.asarray(doc["weights"], dtype=float), np.asarray(doc["support"], dtype=float))


def state_from_json(doc) -> np.ndarray:
    validate(doc, "state")
    return matrix_from_json(doc["state"])


def fourier_from_json(doc):
    from .orbit import FourierState

    validate(doc, "fourier")
    c = np.asarray(doc["coefficients"], dtype=float)
    return FourierState(c[:, 0] + 1j * c[:, 1], doc.get("indices"))


def report_to_json(rep: CapacityReport, config: dict) -> dict:
    return {
        "capacity_nats": real_to_json(rep.capacity_nats),
        "capacity_bits": real_to_json(rep.capacity_bits),
        "optimal_p": [float(x) for x in rep.optimal_p],
        "omega": matrix_to_json(rep.omega),
        "per_letter_divergence": [real_to_json(x) for x in rep.per_letter_divergence],
        "duality_gap": real_to_json(rep.duality_gap),
        "iterations": int(rep.iterations),
        "converged": bool(rep.converged),
        "config": config,
    }


def report_from_json(doc) -> CapacityReport:
    validate(doc, "report")
    return CapacityReport(
        capacity_nats=real_from_json(doc["capacity_nats"]),
        optimal_p=np.asarray(doc["optimal_p"], dtype=float),
        omega=matrix_from_json(doc["omega"]),
        per_letter_divergence=np.array([real_from_json(x) for x in doc["per_letter_divergence"]]),
        duality_gap=real_from_json(doc["duality_gap"]),
        iterations=doc["iterations"],
        converged=doc["converged"],
        diagnostics={"config": doc["config"]},
    )


def dumps(doc) -> str:
    """Deterministic JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()
