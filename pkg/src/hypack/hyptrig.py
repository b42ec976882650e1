"""Closed-form quantities for one generalized circle meeting a dual circle.

Every function here describes a single vertex curve of geodesic curvature
``k`` that crosses the dual circle (curvature ``k_P > 1``) orthogonally at
two tangency points. Functions accept scalars or numpy arrays and broadcast.

The dual circle is carried as ``u = sqrt(k_P**2 - 1)``. In that variable

    cot(theta / 2) = k / u,

so ``theta = 2 arctan(u / k)`` for circles, horocycles and hypercycles
alike. The total geodesic curvature of the arc inside the dual disk is

    L = 2 k G(z) / k_P,   z = (k**2 - 1) / k_P**2,

where ``G(z) = arctan(sqrt z) / sqrt z`` for ``z > 0`` and
``arctanh(sqrt(-z)) / sqrt(-z)`` for ``z < 0``. Both are the same power
series ``sum (-z)**n / (2n + 1)``, which is used near ``z = 0`` (the
horocycle ``k = 1``) so nothing branches or cancels there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np

from .errors import DomainError

ArrayLike = Union[float, np.ndarray]

# Smallest admissible k_P - 1 when a dual curvature is given as k_P itself.
KP_GUARD = 1e-14
HOROCYCLE_TOL = 1e-12

_SERIES_RADIUS = 0.05
_SERIES_TERMS = 24


class CurveKind(Enum):
    HYPERCYCLE = "hypercycle"
    HOROCYCLE = "horocycle"
    CIRCLE = "circle"

    @property
    def vertex_class(self) -> str:
        return {"hypercycle": "V1", "horocycle": "V2", "circle": "V3"}[self.value]


def classify(k: float, tol: float = HOROCYCLE_TOL) -> CurveKind:
    if not k > 0:
        raise DomainError(f"geodesic curvature must be positive, got {k!r}")
    if abs(k - 1.0) <= tol:
        return CurveKind.HOROCYCLE
    return CurveKind.HYPERCYCLE if k < 1.0 else CurveKind.CIRCLE


@dataclass(frozen=True)
class GeneralizedCurvature:
    k: float

    def __post_init__(self):
        if not (self.k > 0 and math.isfinite(self.k)):
            raise DomainError(f"geodesic curvature must be positive, got {self.k!r}")

    @property
    def kind(self) -> CurveKind:
        return classify(self.k)

    @property
    def radius(self) -> float:
        """Hyperbolic radius (distance to the axis for hypercycles)."""
        kind = self.kind
        if kind is CurveKind.HOROCYCLE:
            return math.inf
        if kind is CurveKind.CIRCLE:
            return float(arccoth(self.k))
        return float(arctanh(self.k))


@dataclass(frozen=True)
class DualCurvature:
    """Curvature ``kp`` of the dual circle together with ``u = sqrt(kp**2 - 1)``."""

    kp: float
    u: float

    @classmethod
    def from_kp(cls, kp: float) -> "DualCurvature":
        kp = float(kp)
        if not (math.isfinite(kp) and kp - 1.0 >= KP_GUARD):
            raise DomainError(f"dual curvature must exceed 1 by {KP_GUARD}, got {kp!r}")
        return cls(kp, math.sqrt((kp - 1.0) * (kp + 1.0)))

    @classmethod
    def from_u(cls, u: float) -> "DualCurvature":
        u = float(u)
        if not (u > 0 and math.isfinite(u)):
            raise DomainError(f"u = sqrt(kp^2 - 1) must be positive, got {u!r}")
        return cls(math.hypot(1.0, u), u)

    @property
    def radius(self) -> float:
        """Hyperbolic radius of the dual circle."""
        return math.asinh(1.0 / self.u)

    @property
    def disk_radius(self) -> float:
        """Euclidean radius of the dual circle centred at the origin of the unit disk."""
        return 1.0 / (self.kp + self.u)


DualLike = Union[DualCurvature, float]


def arccoth(x: ArrayLike) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    if np.any(~(np.abs(x) > 1)):
        raise DomainError("arccoth requires |x| > 1")
    return _scalar(0.5 * np.sign(x) * np.log1p(2.0 / (np.abs(x) - 1.0)))


def arctanh(x: ArrayLike) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    if np.any(~(np.abs(x) < 1)):
        raise DomainError("arctanh requires |x| < 1")
    return _scalar(0.5 * np.log1p(2.0 * x / (1.0 - x)))


def _scalar(a: np.ndarray) -> ArrayLike:
    return a[()] if a.ndim == 0 else a


def _prepare(k: ArrayLike, dual: DualLike) -> Tuple[np.ndarray, float, float]:
    k = np.asarray(k, dtype=float)
    if np.any(~(k > 0)) or np.any(~np.isfinite(k)):
        raise DomainError("geodesic curvature must be positive and finite")
    if not isinstance(dual, DualCurvature):
        dual = DualCurvature.from_kp(dual)
    return k, dual.kp, dual.u


# --- the series G(z) and its derivative -----------------------------------


def _g_series(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    g = np.zeros_like(z)
    dg = np.zeros_like(z)
    for n in range(_SERIES_TERMS - 1, -1, -1):
        g = g * (-z) + 1.0 / (2 * n + 1)
    for n in range(_SERIES_TERMS - 1, 0, -1):
        dg = dg * (-z) - n / (2 * n + 1)
    return g, dg


def atan_ratio(z: np.ndarray, one_plus_z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``G(z)`` and ``G'(z)`` for ``z > -1``.

    ``one_plus_z`` must be passed separately; near ``z = -1`` it is far more
    accurate than ``1 + z`` computed from ``z``.
    """
    z = np.asarray(z, dtype=float)
    one_plus_z = np.broadcast_to(np.asarray(one_plus_z, dtype=float), z.shape)
    g = np.empty_like(z)
    dg = np.empty_like(z)

    small = np.abs(z) < _SERIES_RADIUS
    pos = z >= _SERIES_RADIUS
    neg = z <= -_SERIES_RADIUS

    if small.any():
        g[small], dg[small] = _g_series(z[small])
    if pos.any():
        r = np.sqrt(z[pos])
        g[pos] = np.arctan(r) / r
    if neg.any():
        r = np.sqrt(-z[neg])
        g[neg] = 0.5 * np.log((1.0 + r) ** 2 / one_plus_z[neg]) / r
    far = ~small
    if far.any():
        dg[far] = (1.0 / one_plus_z[far] - g[far]) / (2.0 * z[far])
    return g, dg


# --- kernel in (k, u) form; used directly by the face engine --------------


def angle_ku(k: np.ndarray, u: np.ndarray) -> np.ndarray:
    return 2.0 * np.arctan(u / k)


def total_curvature_ku(k: np.ndarray, u: np.ndarray) -> np.ndarray:
    kp = np.hypot(1.0, u)
    kp2 = kp * kp
    g, _ = atan_ratio((k - 1.0) * (k + 1.0) / kp2, (u * u + k * k) / kp2)
    return 2.0 * k * g / kp


def total_curvature_partials_ku(k: np.ndarray, u: np.ndarray):
    """Return ``(L, dL/dk, dL/dk_P)`` at fixed ``k_P`` resp. fixed ``k``."""
    kp = np.hypot(1.0, u)
    kp2 = kp * kp
    g, dg = atan_ratio((k - 1.0) * (k + 1.0) / kp2, (u * u + k * k) / kp2)
    big_l = 2.0 * k * g / kp
    f_x = 2.0 * g / kp + 4.0 * k * k * dg / (kp2 * kp)
    f_y = -2.0 * k / (u * u + k * k)
    return big_l, f_x, f_y


# --- public scalar/array API --------------------------------------------


def inner_angle(k: ArrayLike, dual: DualLike) -> ArrayLike:
    """Angle at the dual-circle centre subtended by the arc of the vertex curve."""
    k, _, u = _prepare(k, dual)
    return _scalar(angle_ku(k, u))


def d_inner_angle(k: ArrayLike, dual: DualLike) -> Tuple[ArrayLike, ArrayLike]:
    """``(d theta / d k, d theta / d k_P)``."""
    k, kp, u = _prepare(k, dual)
    denom = k * k + u * u
    return _scalar(-2.0 * u / denom), _scalar(2.0 * kp * k / (u * denom))


def arc_total_curvature(k: ArrayLike, dual: DualLike) -> ArrayLike:
    """Total geodesic curvature of the vertex arc inside the dual disk."""
    k, _, u = _prepare(k, dual)
    return _scalar(total_curvature_ku(k, u))


def d_arc_total_curvature(k: ArrayLike, dual: DualLike) -> Tuple[ArrayLike, ArrayLike]:
    """Partial derivatives ``(f_x, f_y)`` of the total curvature in ``k`` and ``k_P``."""
    k, _, u = _prepare(k, dual)
    _, f_x, f_y = total_curvature_partials_ku(k, u)
    return _scalar(f_x), _scalar(f_y)


def arc_length(k: ArrayLike, dual: DualLike) -> ArrayLike:
    k, _, u = _prepare(k, dual)
    return _scalar(total_curvature_ku(k, u) / k)


def edge_distance(ki: float, kj: float, tol: float = HOROCYCLE_TOL) -> float:
    """Length of the edge joining two generalized vertices.

    Circles contribute ``arccoth k``, hypercycles ``arctanh k``; a horocycle
    sits at an ideal point, making the distance infinite.
    """
    total = 0.0
    for k in (ki, kj):
        kind = classify(k, tol)
        if kind is CurveKind.HOROCYCLE:
            return math.inf
        total += arccoth(k) if kind is CurveKind.CIRCLE else arctanh(k)
    return float(total)
