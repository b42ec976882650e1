"""Per-polygon engine: dual circle, face quantities, Jacobian and disk layout.

Batched routines operate on ``(m, n)`` arrays of log-curvatures, i.e. ``m``
faces with ``n`` vertices each; the single-face functions are thin wrappers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import hyptrig
from .errors import ConvergenceFailure, DomainError, NumericalDegeneracy, TooFewVertices
from .hyptrig import CurveKind, DualCurvature

ANGLE_TOL = 1e-12
MAX_ROOT_ITER = 200


def _check_ks(ks: Sequence[float]) -> np.ndarray:
    ks = np.asarray(ks, dtype=float)
    if ks.ndim != 1:
        raise DomainError("expected a 1-d sequence of curvatures")
    if ks.size < 3:
        raise TooFewVertices(f"a face needs at least 3 vertices, got {ks.size}")
    if np.any(~(ks > 0)) or np.any(~np.isfinite(ks)):
        raise DomainError("geodesic curvatures must be positive and finite")
    return ks


def solve_log_u(logk: np.ndarray) -> np.ndarray:
    """Solve ``sum_i arctan(u / k_i) = pi`` for every row of ``logk``.

    Returns ``log u``. The unknown is ``t = log u``, so the problem is scale
    free in ``k``. Since ``arctan`` is increasing, the root lies in
    ``[log(tan(pi/n) min k), log(tan(pi/n) max k)]``; Newton steps leaving
    the current bracket are replaced by bisection.
    """
    logk = np.atleast_2d(np.asarray(logk, dtype=float))
    n = logk.shape[1]
    if n < 3:
        raise TooFewVertices(f"a face needs at least 3 vertices, got {n}")
    shift = math.log(math.tan(math.pi / n))
    lo = logk.min(axis=1) + shift
    hi = logk.max(axis=1) + shift
    t = 0.5 * (lo + hi)
    active = np.ones(t.shape, dtype=bool)

    for _ in range(MAX_ROOT_ITER):
        x = np.exp(t[active, None] - logk[active])
        phi = np.arctan(x).sum(axis=1) - math.pi
        dphi = (x / (1.0 + x * x)).sum(axis=1)

        done = np.abs(phi) <= 0.25 * ANGLE_TOL
        idx = np.flatnonzero(active)
        a_lo, a_hi = lo[idx], hi[idx]
        a_lo = np.where(phi < 0, t[idx], a_lo)
        a_hi = np.where(phi > 0, t[idx], a_hi)
        lo[idx], hi[idx] = a_lo, a_hi

        step = t[idx] - phi / dphi
        outside = ~((step > a_lo) & (step < a_hi))
        step = np.where(outside, 0.5 * (a_lo + a_hi), step)
        collapsed = (a_hi - a_lo) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(t[idx]))
        t[idx] = np.where(done, t[idx], step)
        active[idx[done | collapsed]] = False
        if not active.any():
            return t
    raise ConvergenceFailure("dual-curvature root finder exceeded its iteration cap")


@dataclass(frozen=True)
class FaceGeometry:
    """Geometry of one packed polygon; arrays follow the face cycle."""

    ks: np.ndarray
    dual: DualCurvature
    theta: np.ndarray
    total_curvature: np.ndarray
    arc_length: np.ndarray
    area: float

    @property
    def kp(self) -> float:
        return self.dual.kp

    @property
    def n(self) -> int:
        return len(self.ks)


def face_batch(logk: np.ndarray, jacobian: bool = False):
    """Evaluate many same-size faces at once.

    Returns ``(u, L)`` or, with ``jacobian=True``, ``(u, L, M)`` where
    ``M[f, j, i] = dL_j / ds_i`` is the face Hessian in log coordinates.
    """
    logk = np.atleast_2d(np.asarray(logk, dtype=float))
    u = np.exp(solve_log_u(logk))[:, None]
    k = np.exp(logk)
    if not jacobian:
        return u[:, 0], hyptrig.total_curvature_ku(k, u)

    big_l, f_x, _ = hyptrig.total_curvature_partials_ku(k, u)
    kp = np.hypot(1.0, u)
    w = 1.0 / (u * u + k * k)
    a = k * w
    # half the sum of dtheta_j/du over the face
    s = a.sum(axis=1, keepdims=True)
    # k_i * f_y(k_j) * dk_P/dk_i
    m = -2.0 * (u * u / (kp * s))[:, :, None] * a[:, :, None] * a[:, None, :]
    idx = np.arange(k.shape[1])
    m[:, idx, idx] += k * f_x
    return u[:, 0], big_l, m


def solve_dual_curvature(ks: Sequence[float]) -> DualCurvature:
    ks = _check_ks(ks)
    return DualCurvature.from_u(math.exp(solve_log_u(np.log(ks))[0]))


def face_geometry(ks: Sequence[float]) -> FaceGeometry:
    ks = _check_ks(ks)
    dual = solve_dual_curvature(ks)
    theta = hyptrig.angle_ku(ks, dual.u)
    big_l = hyptrig.total_curvature_ku(ks, dual.u)
    area = (len(ks) - 2) * math.pi - math.fsum(big_l)
    return FaceGeometry(ks, dual, theta, big_l, big_l / ks, area)


def face_jacobian(ks: Sequence[float]) -> np.ndarray:
    """Matrix ``J[j, i] = dL_j / dk_i`` for one face."""
    ks = _check_ks(ks)
    _, _, m = face_batch(np.log(ks)[None, :], jacobian=True)
    return m[0] / ks[None, :]


def dual_sensitivity(ks: Sequence[float]) -> np.ndarray:
    """``dk_P / dk_i`` from implicit differentiation of the angle-sum equation."""
    ks = _check_ks(ks)
    dual = solve_dual_curvature(ks)
    dth_dk, dth_dkp = hyptrig.d_inner_angle(ks, dual)
    return -dth_dk / np.sum(dth_dkp)


# --- Poincare disk realisation -------------------------------------------


@dataclass(frozen=True)
class VertexCurve:
    center: Tuple[float, float]
    radius: float
    kind: CurveKind
    k: float

    def hyperbolic_curvature(self) -> float:
        """Geodesic curvature of this Euclidean circle in the Poincare disk."""
        c2 = self.center[0] ** 2 + self.center[1] ** 2
        return abs(1.0 + self.radius ** 2 - c2) / (2.0 * self.radius)


@dataclass(frozen=True)
class FaceLayout:
    """One face drawn in the unit disk with the dual circle centred at 0.

    Tangent point ``i`` sits at polar angle ``theta_0 + ... + theta_{i-1}``;
    vertex curve ``i`` runs from tangent point ``i`` to ``i + 1``.
    """

    geometry: FaceGeometry
    dual_radius: float
    tangent_points: np.ndarray
    curves: List[VertexCurve]

    @property
    def n(self) -> int:
        return len(self.curves)

    def orthogonality_residuals(self) -> np.ndarray:
        """|cos| of the angle between each curve and the dual circle at its endpoints."""
        out = []
        for i, curve in enumerate(self.curves):
            c = np.asarray(curve.center)
            for t in (self.tangent_points[i], self.tangent_points[(i + 1) % self.n]):
                out.append(abs(np.dot(t, t - c)) / (np.linalg.norm(t) * np.linalg.norm(t - c)))
        return np.array(out)

    def tangency_residuals(self) -> np.ndarray:
        """Relative gap between consecutive curves, which touch from opposite sides."""
        out = []
        for i in range(self.n):
            a, b = self.curves[i - 1], self.curves[i]
            d = math.dist(a.center, b.center)
            out.append(abs(d - (a.radius + b.radius)) / (a.radius + b.radius))
        return np.array(out)

    def outside_curves(self, pts: np.ndarray) -> np.ndarray:
        keep = np.ones(len(pts), dtype=bool)
        for curve in self.curves:
            d2 = ((pts - np.asarray(curve.center)) ** 2).sum(axis=1)
            keep &= d2 > curve.radius ** 2
        return keep


def layout_face(ks: Sequence[float]) -> FaceLayout:
    geom = face_geometry(ks)
    rho = geom.dual.disk_radius
    phi = np.concatenate(([0.0], np.cumsum(geom.theta)[:-1]))
    tangents = rho * np.column_stack((np.cos(phi), np.sin(phi)))
    if np.any(geom.theta <= 0):
        raise NumericalDegeneracy("two tangent points coincide")
    curves = []
    for i, (k, th) in enumerate(zip(geom.ks, geom.theta)):
        mid = phi[i] + 0.5 * th
        dist = rho / math.cos(0.5 * th)
        center = (dist * math.cos(mid), dist * math.sin(mid))
        curves.append(VertexCurve(center, rho * math.tan(0.5 * th), hyptrig.classify(k), float(k)))
    return FaceLayout(geom, rho, tangents, curves)


def face_area_oracle(layout: FaceLayout, sample_count: int = 10 ** 6,
                     rng: Optional[np.random.Generator] = None,
                     chunk: int = 200_000) -> Tuple[float, float]:
    """Monte-Carlo hyperbolic area of the region between the arcs.

    Samples uniformly in the Euclidean dual disk and integrates the density
    ``4 / (1 - |z|^2)^2`` over points lying outside every vertex curve.
    Returns ``(estimate, standard_error)``.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    rho = layout.dual_radius
    total = 0.0
    total_sq = 0.0
    left = int(sample_count)
    while left > 0:
        m = min(chunk, left)
        left -= m
        r = rho * np.sqrt(rng.random(m))
        a = 2.0 * math.pi * rng.random(m)
        pts = np.column_stack((r * np.cos(a), r * np.sin(a)))
        w = 4.0 / (1.0 - r * r) ** 2
        w = np.where(layout.outside_curves(pts), w, 0.0)
        total += w.sum()
        total_sq += (w * w).sum()
    n = int(sample_count)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    scale = math.pi * rho * rho
    return scale * mean, scale * math.sqrt(var / n)
