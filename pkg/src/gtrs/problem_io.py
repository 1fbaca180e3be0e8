"""Problem and result files.

A problem file is a JSON document::

    {"format": 1, "n": 2,
     "q0": {"A": [[0, 0, 1.0], [0, 1, 2.0], [1, 1, 1.0]], "b": [0, 0], "c": 0},
     "q1": {"A": [[0, 1, -1.0]], "b": [0, 0], "c": 0},
     "meta": {"name": "E1"}}

Matrix entries are 0-based upper-triangle triplets ``[i, j, value]`` with
``i <= j``; repeated ``(i, j)`` pairs are summed (with a warning).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .quad_model import Pencil, Quadratic, SparseSymMatrix

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ProblemFile:
    pencil: Pencil
    meta: dict = field(default_factory=dict)


def _parse_quadratic(sec, n, name):
    if not isinstance(sec, dict):
        raise InputError(f"section {name!r} must be an object")
    entries = sec.get("A", [])
    trip = []
    for e in entries:
        if not isinstance(e, (list, tuple)) or len(e) != 3:
            raise InputError(f"{name}.A entries must be [i, j, value] triplets")
        i, j, v = e
        if not (isinstance(i, int) and isinstance(j, int)) or isinstance(i, bool) or isinstance(j, bool):
            raise InputError(f"{name}.A indices must be integers, got {e}")
        if i > j:
            raise InputError(f"{name}.A entry {e} is below the diagonal; store i <= j only")
        trip.append((i, j, float(v)))
    keys = [(i, j) for i, j, _ in trip]
    if len(set(keys)) != len(keys):
        warnings.warn(f"{name}.A has repeated entries; they are summed", stacklevel=3)
    A = SparseSymMatrix.from_triplets(n, trip)
    b = sec.get("b")
    b = np.zeros(n) if b is None else np.asarray(b, dtype=float)
    if b.shape != (n,):
        raise InputError(f"{name}.b must have length {n}")
    c = float(sec.get("c", 0.0))
    return Quadratic(A, b, c)


def parse_problem(doc):
    """Validate a decoded problem document."""
    if not isinstance(doc, dict):
        raise InputError("problem file must be a JSON object")
    fmt = doc.get("format", FORMAT_VERSION)
    if fmt != FORMAT_VERSION:
        raise InputError(f"unsupported format version {fmt}")
    n = doc.get("n")
    if not isinstance(n, int) or n < 1:
        raise InputError("n must be a positive integer")
    try:
        q0 = _parse_quadratic(doc["q0"], n, "q0")
        q1 = _parse_quadratic(doc["q1"], n, "q1")
    except KeyError as err:
        raise InputError(f"missing section {err}") from None
    except (TypeError, ValueError) as err:
        if isinstance(err, InputError):
            raise
        raise InputError(str(err)) from None
    return ProblemFile(Pencil(q0, q1), dict(doc.get("meta", {})))


def load_problem(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as err:
        raise InputError(f"{path}: not valid JSON ({err})") from None
    except OSError as err:
        raise InputError(f"{path}: {err.strerror}") from None
    return parse_problem(doc)


def _quadratic_doc(q):
    return {"A": [[i, j, v] for i, j, v in q.A.triplets()], "b": q.b.tolist(), "c": q.c}


def problem_to_doc(pencil, meta=None):
    """Canonical document: entries sorted by (i, j), duplicates already summed."""
    doc = {"format": FORMAT_VERSION, "n": pencil.n,
           "q0": _quadratic_doc(pencil.q0), "q1": _quadratic_doc(pencil.q1)}
    if meta:
        doc["meta"] = dict(meta)
    return doc


def dumps_problem(pencil, meta=None):
    return json.dumps(problem_to_doc(pencil, meta), indent=1, sort_keys=True)


def save_problem(path, pencil, meta=None):
    with open(path, "w") as fh:
        fh.write(dumps_problem(pencil, meta))
        fh.write("\n")


def dumps_result(doc):
    """Stable serialization: sorted keys, repr-exact floats."""
    return json.dumps(doc, indent=1, sort_keys=True, allow_nan=True)
