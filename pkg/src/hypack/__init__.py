"""Generalized hyperbolic circle packings on polygonal cell complexes.

Vertex curves may be circles, horocycles or hypercycles; given target total
geodesic curvatures at the vertices, the packing is found by Newton's method
or the combinatorial Ricci flow in log-curvature coordinates.
"""
from .admissibility import AdmissibilityVerdict, Mode, bound_for_subset, check_target
from .cellcomplex import CellComplex, quad_annulus, triangle_fan, validate
from .facepack import face_geometry, layout_face, solve_dual_curvature
from .packing import CurvatureState, global_jacobian, total_curvatures
from .solvers import (
    FlowOptions,
    NewtonOptions,
    SolveReport,
    Status,
    Trajectory,
    convergence_report,
    newton_solve,
    ricci_flow,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityVerdict", "CellComplex", "CurvatureState", "FlowOptions", "Mode",
    "NewtonOptions", "SolveReport", "Status", "Trajectory", "bound_for_subset",
    "check_target", "convergence_report", "face_geometry", "global_jacobian",
    "layout_face", "newton_solve", "quad_annulus", "ricci_flow", "solve_dual_curvature",
    "total_curvatures", "triangle_fan", "validate",
]
