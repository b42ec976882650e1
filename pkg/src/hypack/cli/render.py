"""Deterministic text renderings: JSON reports, CSV traces and SVG faces."""
from __future__ import annotations

import json
import math
from typing import Any, List

import numpy as np

from ..facepack import FaceLayout
from ..hyptrig import CurveKind
from ..solvers import Trajectory


def format_float(x: float) -> str:
    """17 significant digits; non-finite values become ``null``."""
    x = float(x)
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _scalar(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(obj, level: int) -> str:
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        pad = "  " * (level + 1)
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_scalar(v) for v in obj) + "]"
        pad = "  " * (level + 1)
        return ("[\n" + ",\n".join(pad + _emit(v, level + 1) for v in obj)
                + "\n" + "  " * level + "]")
    return _scalar(obj)


def dumps(obj: Any) -> str:
    """JSON text with keys in insertion order and fixed float formatting."""
    return _emit(obj, 0) + "\n"


def trace_csv(traj: Trajectory) -> str:
    n = len(traj.states[0]) if traj.states else 0
    header = ["t", "residual_inf", "residual_2"] + [f"s_{i}" for i in range(n)]
    lines = [",".join(header)]
    for t, s, ri, r2 in zip(traj.times, traj.states, traj.residual_inf, traj.residual_2):
        lines.append(",".join(f"{x:.16e}" for x in (t, ri, r2, *s)))
    return "\n".join(lines) + "\n"


# --- SVG -----------------------------------------------------------------

_STROKE = 0.006
_CURVE_DASH = {
    CurveKind.CIRCLE: None,
    CurveKind.HOROCYCLE: "0.006 0.012",
    CurveKind.HYPERCYCLE: "0.04 0.012 0.006 0.012",
}
_CURVE_COLOR = {
    CurveKind.CIRCLE: "#1f5fa8",
    CurveKind.HOROCYCLE: "#2a8a3e",
    CurveKind.HYPERCYCLE: "#b5462b",
}


def _circle(cls: str, cx: float, cy: float, r: float, stroke: str, fill: str = "none",
            dash: str = None, extra: str = "") -> str:
    # y is negated so the drawing has the usual orientation
    attrs = [f'class="{cls}"', f'cx="{format_float(cx)}"',
             f'cy="{format_float(-cy + 0.0)}"',
             f'r="{format_float(r)}"', f'fill="{fill}"', f'stroke="{stroke}"', f'stroke-width="{_STROKE}"']
    if dash:
        attrs.append(f'stroke-dasharray="{dash}"')
    if extra:
        attrs.append(extra)
    return "  <circle " + " ".join(attrs) + "/>"


def face_svg(layout: FaceLayout, face_index: int = 0) -> str:
    """Draw one packed face in the Poincare disk.

    Vertex curves are full Euclidean circles clipped to the closed unit disk;
    each carries its kind in the class attribute.
    """
    geom = layout.geometry
    out: List[str] = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.1 -1.1 2.2 2.2" '
        'width="600" height="600">',
        f"  <title>face {face_index}: n={geom.n}, k_P={format_float(geom.kp)}</title>",
        '  <defs><clipPath id="unit-disk"><circle cx="0" cy="0" r="1"/></clipPath></defs>',
        _circle("reference", 0.0, 0.0, 1.0, "#000000"),
        _circle("dual", 0.0, 0.0, layout.dual_radius, "#555555", dash="0.03 0.02"),
    ]
    for i, curve in enumerate(layout.curves):
        kind = curve.kind.value
        out.append(_circle(
            f"vertex-curve {kind}", curve.center[0], curve.center[1], curve.radius,
            _CURVE_COLOR[curve.kind], dash=_CURVE_DASH[curve.kind],
            extra=(f'clip-path="url(#unit-disk)" data-vertex="{i}" '
                   f'data-k="{format_float(curve.k)}"')))
    for i, (x, y) in enumerate(layout.tangent_points):
        out.append(_circle("tangent", x, y, 0.012, "none", fill="#000000",
                           extra=f'data-index="{i}"'))
    out.append("</svg>")
    return "\n".join(out) + "\n"
