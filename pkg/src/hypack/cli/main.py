"""``hypack`` command line.

Exit codes: 0 success or converged, 1 negative verdict (invalid complex in
``validate``, inadmissible target, unconverged solve, bad face index),
2 input errors, 3 advisory (admissible under sampling only).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

import numpy as np

from .. import admissibility, facepack, packing, solvers
from ..errors import (
    ComplexError,
    FaceIndexOutOfRange,
    HypackError,
    InvalidOptions,
    ProblemFileError,
    SolveFailed,
    UnsolvedState,
)
from ..packing import CurvatureState
from .problem import ProblemFile, load_problem
from .render import dumps, face_svg, trace_csv

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_ADVISORY = 3


def _emit(text: str, out: Optional[str], stdout: Optional[TextIO]) -> None:
    if out is None:
        (stdout or sys.stdout).write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise ProblemFileError(f"cannot write {out}: {exc.strerror}") from None


def _load(path: str):
    problem = load_problem(path)
    try:
        c = problem.build_complex()
    except ComplexError as exc:
        raise ProblemFileError(f"invalid complex: {exc}") from None
    return problem, c


def _flow_options(problem: ProblemFile, escape: Optional[float]) -> solvers.FlowOptions:
    keys = ("step_size", "max_time", "residual_tol", "integrator", "record_every",
            "escape_threshold")
    kw = {k: problem.solver[k] for k in keys if k in problem.solver}
    if escape is not None:
        kw["escape_threshold"] = escape
    return solvers.FlowOptions(**kw)


def _newton_options(problem: ProblemFile, escape: Optional[float]) -> solvers.NewtonOptions:
    kw = {k: problem.solver[k] for k in ("tol", "max_iter", "escape_threshold")
          if k in problem.solver}
    if escape is not None:
        kw["escape_threshold"] = escape
    return solvers.NewtonOptions(**kw)


def _run(problem, c, method, escape):
    """Solve and return ``(report, trajectory or None, message or None)``."""
    s0 = np.log(problem.initial_k)
    if method == "flow":
        traj, report = solvers.ricci_flow(c, s0, problem.targets, _flow_options(problem, escape))
        return report, traj, None
    try:
        report = solvers.newton_solve(c, s0, problem.targets,
                                      opts=_newton_options(problem, escape))
        return report, None, None
    except SolveFailed as exc:
        return exc.report, None, str(exc)


def solve_report(problem: ProblemFile, c, method: str, exact_limit: int,
                 escape: Optional[float]) -> dict:
    report, _, message = _run(problem, c, method, escape)
    verdict = admissibility.check_target(c, problem.targets, exact_limit=exact_limit)
    state = report.state
    out = {
        "status": report.status.value,
        "method": method,
        "iterations": report.iterations,
        "time": report.time,
        "residual_inf": report.residual_inf,
        "residual_2": report.residual_2,
        "convergence_rate": report.fit.rate if report.fit else None,
        "r_squared": report.fit.r_squared if report.fit else None,
        "k": state.k,
        "s": state.s,
        "vertex_classes": [kind.vertex_class for kind in report.vertex_classes],
        "vertex_kinds": [kind.value for kind in report.vertex_classes],
        "face_dual_curvatures": packing.face_dual_curvatures(c, state),
        "total_curvatures": report.total_curvatures,
        "targets": report.targets,
        "admissibility": verdict.to_dict(),
    }
    if message:
        out["message"] = message
    if problem.reference_k is not None:
        out["reference_error"] = float(np.max(np.abs(state.k - problem.reference_k)))
    out["options"] = {
        "method": method,
        "exact_limit": exact_limit,
        "initial_k": problem.initial_k,
        "flow": _flow_options(problem, escape).to_dict(),
        "newton": _newton_options(problem, escape).to_dict(),
    }
    return out


# --- subcommands ---------------------------------------------------------


def cmd_validate(path: str, stdout: Optional[TextIO] = None) -> int:
    problem = load_problem(path)
    try:
        c = problem.build_complex()
    except ComplexError as exc:
        (stdout or sys.stdout).write(f"invalid: {exc}\n")
        return EXIT_NEGATIVE
    (stdout or sys.stdout).write(f"valid: {c.summary()}\n")
    return EXIT_OK


def cmd_check_target(path: str, exact_limit: int = 20, out: Optional[str] = None,
                     stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    problem, c = _load(path)
    verdict = admissibility.check_target(c, problem.targets, exact_limit=exact_limit)
    _emit(dumps(verdict.to_dict()), out, stdout)
    if not verdict.admissible:
        return EXIT_NEGATIVE
    if verdict.mode is admissibility.Mode.SAMPLED:
        (stderr or sys.stderr).write(
            f"warning: {c.vertex_count} vertices exceed the exact limit "
            f"{exact_limit}; sampled verdict is not a proof\n")
        return EXIT_ADVISORY
    return EXIT_OK


def cmd_solve(path: str, method: Optional[str] = None, out: Optional[str] = None,
              exact_limit: int = 20, escape_threshold: Optional[float] = None,
              stdout: Optional[TextIO] = None) -> int:
    problem, c = _load(path)
    method = method or problem.solver.get("method", "newton")
    report = solve_report(problem, c, method, exact_limit, escape_threshold)
    _emit(dumps(report), out, stdout)
    if out is not None:
        (stdout or sys.stdout).write(
            f"{report['status']}: residual_inf={report['residual_inf']:.3e}\n")
    return EXIT_OK if report["status"] == solvers.Status.CONVERGED.value else EXIT_NEGATIVE


def cmd_trace(path: str, out: Optional[str] = None, escape_threshold: Optional[float] = None,
              stdout: Optional[TextIO] = None) -> int:
    problem, c = _load(path)
    report, traj, _ = _run(problem, c, "flow", escape_threshold)
    _emit(trace_csv(traj), out, stdout)
    return EXIT_OK if report.converged else EXIT_NEGATIVE


def cmd_export_svg(path: str, face: int = 0, out: Optional[str] = None,
                   method: Optional[str] = None, escape_threshold: Optional[float] = None,
                   stdout: Optional[TextIO] = None) -> int:
    problem, c = _load(path)
    if not 0 <= face < len(c.faces):
        raise FaceIndexOutOfRange(
            f"FaceIndexOutOfRange: face {face} outside [0, {len(c.faces)})")
    if problem.k is not None:
        state = CurvatureState.from_k(problem.k)
    else:
        method = method or problem.solver.get("method", "newton")
        report, _, message = _run(problem, c, method, escape_threshold)
        if not report.converged:
            raise UnsolvedState(
                f"UnsolvedState: {method} solve ended with status {report.status.value}"
                + (f" ({message})" if message else ""), report)
        state = report.state
    layout = facepack.layout_face(state.k[list(c.faces[face])])
    _emit(face_svg(layout, face), out, stdout)
    return EXIT_OK


# --- entry point ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypack",
        description="Generalized hyperbolic circle packings with prescribed total curvatures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the cell complex of a problem file")
    p.add_argument("problem")

    p = sub.add_parser("check-target", help="test the targets against every subset bound")
    p.add_argument("problem")
    p.add_argument("--exact-limit", type=int, default=20,
                   help="enumerate all subsets up to this many vertices (default 20)")
    p.add_argument("--out", help="write the verdict JSON here instead of stdout")

    p = sub.add_parser("solve", help="solve for the curvatures and write a JSON report")
    p.add_argument("problem")
    p.add_argument("--method", choices=("newton", "flow"))
    p.add_argument("--out", help="report path (default stdout)")
    p.add_argument("--exact-limit", type=int, default=20)
    p.add_argument("--escape-threshold", type=float)

    p = sub.add_parser("trace", help="run the Ricci flow and write its trajectory as CSV")
    p.add_argument("problem")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--escape-threshold", type=float)

    p = sub.add_parser("export-svg", help="draw one packed face in the Poincare disk")
    p.add_argument("problem")
    p.add_argument("--face", type=int, default=0)
    p.add_argument("--out", help="SVG path (default stdout)")
    p.add_argument("--method", choices=("newton", "flow"))
    p.add_argument("--escape-threshold", type=float)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args.problem)
        if args.command == "check-target":
            return cmd_check_target(args.problem, args.exact_limit, args.out)
        if args.command == "solve":
            return cmd_solve(args.problem, args.method, args.out, args.exact_limit,
                             args.escape_threshold)
        if args.command == "trace":
            return cmd_trace(args.problem, args.out, args.escape_threshold)
        return cmd_export_svg(args.problem, args.face, args.out, args.method,
                              args.escape_threshold)
    except (ProblemFileError, InvalidOptions) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (FaceIndexOutOfRange, UnsolvedState) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NEGATIVE
    except HypackError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
