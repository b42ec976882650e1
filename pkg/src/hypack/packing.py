"""Assembly of per-face quantities into vertex totals and the global Hessian.

All solver mathematics runs in log-curvature coordinates ``s = log k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from . import facepack
from .cellcomplex import CellComplex
from .errors import DomainError
from .hyptrig import HOROCYCLE_TOL, CurveKind, classify


@dataclass(frozen=True)
class CurvatureState:
    """Per-vertex geodesic curvatures held in log form."""

    s: np.ndarray = field(repr=False)

    def __post_init__(self):
        s = np.array(self.s, dtype=float)
        if s.ndim != 1 or not np.all(np.isfinite(s)):
            raise DomainError("log-curvatures must be a finite 1-d vector")
        s.flags.writeable = False
        object.__setattr__(self, "s", s)

    @classmethod
    def from_k(cls, k: Sequence[float]) -> "CurvatureState":
        k = np.asarray(k, dtype=float)
        if np.any(~(k > 0)):
            raise DomainError("geodesic curvatures must be positive")
        return cls(np.log(k))

    @classmethod
    def horocycles(cls, n: int) -> "CurvatureState":
        return cls(np.zeros(n))

    @property
    def k(self) -> np.ndarray:
        return np.exp(self.s)

    def __len__(self) -> int:
        return len(self.s)


def _s_vector(c: CellComplex, state) -> np.ndarray:
    s = state.s if isinstance(state, CurvatureState) else np.asarray(state, dtype=float)
    if s.shape != (c.vertex_count,):
        raise DomainError(f"expected {c.vertex_count} curvatures, got shape {s.shape}")
    return s


def evaluate(c: CellComplex, s: np.ndarray, jacobian: bool = False):
    """Vertex totals ``L(s)`` and optionally ``dL/ds``.

    Face contributions are accumulated in a fixed order (by face size, then
    face index) so results are reproducible bit for bit.
    """
    n_v = c.vertex_count
    big_l = np.zeros(n_v)
    m = np.zeros((n_v, n_v)) if jacobian else None
    for _, verts in c.size_groups:
        out = facepack.face_batch(s[verts], jacobian=jacobian)
        np.add.at(big_l, verts, out[1])
        if jacobian:
            np.add.at(m, (verts[:, :, None], verts[:, None, :]), out[2])
    return (big_l, m) if jacobian else big_l


def total_curvatures(c: CellComplex, state: CurvatureState) -> np.ndarray:
    """Total geodesic curvature at each vertex, summed over incident faces."""
    return evaluate(c, _s_vector(c, state))


def global_jacobian(c: CellComplex, state: CurvatureState) -> np.ndarray:
    """``M[i, j] = dL_i / ds_j``; the Hessian of the convex potential."""
    return evaluate(c, _s_vector(c, state), jacobian=True)[1]


def face_dual_curvatures(c: CellComplex, state: CurvatureState) -> np.ndarray:
    s = _s_vector(c, state)
    kp = np.empty(len(c.faces))
    for faces, verts in c.size_groups:
        kp[faces] = np.hypot(1.0, np.exp(facepack.solve_log_u(s[verts])))
    return kp


def face_areas(c: CellComplex, state: CurvatureState) -> np.ndarray:
    s = _s_vector(c, state)
    area = np.empty(len(c.faces))
    for faces, verts in c.size_groups:
        _, big_l = facepack.face_batch(s[verts])
        area[faces] = (verts.shape[1] - 2) * math.pi - big_l.sum(axis=1)
    return area


def energy_gap(c: CellComplex, s_from: Sequence[float], s_to: Sequence[float],
               targets: Sequence[float], quadrature_points: int = 32) -> float:
    """Change of the target-shifted potential between two states.

    Integrates the closed 1-form ``sum_i (L_i - target_i) ds_i`` along the
    straight segment with Gauss-Legendre quadrature.
    """
    if quadrature_points < 8:
        raise DomainError("quadrature_points must be at least 8")
    a = _s_vector(c, s_from)
    b = _s_vector(c, s_to)
    targets = np.asarray(targets, dtype=float)
    d = b - a
    if not np.any(d):
        return 0.0
    x, w = np.polynomial.legendre.leggauss(quadrature_points)
    t = 0.5 * (x + 1.0)
    vals = [np.dot(evaluate(c, a + ti * d) - targets, d) for ti in t]
    return float(0.5 * np.dot(w, vals))


def classify_vertices(state: CurvatureState, tol: float = HOROCYCLE_TOL) -> List[CurveKind]:
    return [classify(float(k), tol) for k in state.k]
