"""JSON problem files.

Schema::

    {"vertex_count": 12,
     "faces": [[0, 1, 7, 6], ...],
     "targets": [2.0, ...],
     "initial_k": [1.0, ...],          optional, default all ones
     "k": [...],                       optional, explicit state for drawing
     "reference_k": [...],             optional, expected solution
     "solver": {"method": "newton", "step_size": 0.05, ...}}   optional

Syntax errors and field errors raise :class:`ProblemFileError` with the
line number. Combinatorial invariants are checked separately by
:meth:`ProblemFile.build_complex` so callers can tell the two apart.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..cellcomplex import CellComplex, validate
from ..errors import ProblemFileError

METHODS = ("newton", "flow")
INTEGRATORS = ("euler", "rk4")

_TOP_KEYS = {"vertex_count", "faces", "targets", "initial_k", "k", "reference_k", "solver"}
_SOLVER_FLOATS = ("step_size", "residual_tol", "max_time", "escape_threshold", "tol")
_SOLVER_INTS = ("record_every", "max_iter")
_SOLVER_KEYS = {"method", "integrator", *_SOLVER_FLOATS, *_SOLVER_INTS}


@dataclass(frozen=True)
class ProblemFile:
    vertex_count: int
    faces: Tuple[Tuple[int, ...], ...]
    targets: np.ndarray
    initial_k: np.ndarray
    k: Optional[np.ndarray] = None
    reference_k: Optional[np.ndarray] = None
    solver: Dict[str, Any] = field(default_factory=dict)

    def build_complex(self) -> CellComplex:
        return validate(self.faces, self.vertex_count)


class _Locator:
    """Maps a field name to the line where its key first appears."""

    def __init__(self, text: str):
        self.text = text

    def line(self, key: str) -> Optional[int]:
        m = re.search(r'"%s"\s*:' % re.escape(key), self.text)
        return self.text.count("\n", 0, m.start()) + 1 if m else None

    def fail(self, key: str, path: str, msg: str):
        line = self.line(key)
        where = f"line {line}, " if line else ""
        raise ProblemFileError(f"{where}field '{path}': {msg}")


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _positive_vector(loc: _Locator, key: str, raw, n: int) -> np.ndarray:
    if not isinstance(raw, list):
        loc.fail(key, key, "expected a list of numbers")
    if len(raw) != n:
        loc.fail(key, key, f"expected {n} entries (vertex_count), got {len(raw)}")
    for i, x in enumerate(raw):
        if not _is_num(x) or not math.isfinite(x) or x <= 0:
            loc.fail(key, f"{key}[{i}]", f"must be a positive finite number, got {x!r}")
    return np.array(raw, dtype=float)


def _parse_solver(loc: _Locator, raw) -> Dict[str, Any]:
    if not isinstance(raw, dict):
        loc.fail("solver", "solver", "expected an object")
    for key in raw:
        if key not in _SOLVER_KEYS:
            loc.fail(key, f"solver.{key}", "unknown option")
    out: Dict[str, Any] = {}
    if "method" in raw:
        if raw["method"] not in METHODS:
            loc.fail("method", "solver.method", f"must be one of {list(METHODS)}")
        out["method"] = raw["method"]
    if "integrator" in raw:
        if raw["integrator"] not in INTEGRATORS:
            loc.fail("integrator", "solver.integrator", f"must be one of {list(INTEGRATORS)}")
        out["integrator"] = raw["integrator"]
    for key in _SOLVER_FLOATS:
        if key in raw:
            x = raw[key]
            if not _is_num(x) or not math.isfinite(x) or x <= 0:
                loc.fail(key, f"solver.{key}", f"must be a positive number, got {x!r}")
            out[key] = float(x)
    for key in _SOLVER_INTS:
        if key in raw:
            x = raw[key]
            if not _is_int(x) or x < 1:
                loc.fail(key, f"solver.{key}", f"must be a positive integer, got {x!r}")
            out[key] = x
    return out


def parse_problem(text: str) -> ProblemFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    loc = _Locator(text)
    if not isinstance(data, dict):
        raise ProblemFileError("line 1: top level must be a JSON object")
    for key in data:
        if key not in _TOP_KEYS:
            loc.fail(key, key, "unknown field")
    for key in ("vertex_count", "faces", "targets"):
        if key not in data:
            raise ProblemFileError(f"missing required field '{key}'")

    n = data["vertex_count"]
    if not _is_int(n) or n < 1:
        loc.fail("vertex_count", "vertex_count", f"must be a positive integer, got {n!r}")

    faces_raw = data["faces"]
    if not isinstance(faces_raw, list) or not faces_raw:
        loc.fail("faces", "faces", "expected a nonempty list of vertex cycles")
    faces: List[Tuple[int, ...]] = []
    for p, face in enumerate(faces_raw):
        if not isinstance(face, list) or not all(_is_int(v) for v in face):
            loc.fail("faces", f"faces[{p}]", "expected a list of integer vertex indices")
        faces.append(tuple(face))

    targets = _positive_vector(loc, "targets", data["targets"], n)
    initial_k = (_positive_vector(loc, "initial_k", data["initial_k"], n)
                 if "initial_k" in data else np.ones(n))
    k = _positive_vector(loc, "k", data["k"], n) if "k" in data else None
    ref = (_positive_vector(loc, "reference_k", data["reference_k"], n)
           if "reference_k" in data else None)
    solver = _parse_solver(loc, data["solver"]) if "solver" in data else {}
    return ProblemFile(n, tuple(faces), targets, initial_k, k, ref, solver)


def load_problem(path) -> ProblemFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse_problem(text)


def problem_to_dict(c: CellComplex, targets: Sequence[float], **extra) -> Dict[str, Any]:
    """Inverse of :func:`parse_problem`, for writing fixtures."""
    out: Dict[str, Any] = {
        "vertex_count": c.vertex_count,
        "faces": [list(f) for f in c.faces],
        "targets": [float(x) for x in targets],
    }
    for key, val in extra.items():
        out[key] = val if isinstance(val, dict) else [float(x) for x in val]
    return out
