"""Combinatorial Ricci flow and damped Newton for prescribed total curvatures.

Both work on ``s = log k``. The flow integrates ``ds/dt = -(L(s) - target)``,
the negative gradient flow of the convex potential whose gradient is ``L``;
Newton solves ``L(s) = target`` using the Hessian ``dL/ds``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import packing
from .admissibility import AdmissibilityVerdict
from .cellcomplex import CellComplex
from .errors import (
    InsufficientSamples,
    InvalidOptions,
    LinearSolveFailure,
    LineSearchStall,
    NonDecayingTrajectory,
    NonpositiveTarget,
)
from .packing import CurvatureState

log = logging.getLogger(__name__)

MIN_FIT_SAMPLES = 10
_NOISE_ULPS = 64


class Status(Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    DIVERGING = "Diverging"
    LINE_SEARCH_STALL = "LineSearchStall"


class Integrator(Enum):
    EULER = "euler"
    RK4 = "rk4"


@dataclass(frozen=True)
class FlowOptions:
    step_size: float = 0.05
    max_time: float = 500.0
    residual_tol: float = 1e-10
    integrator: Integrator = Integrator.RK4
    record_every: int = 1
    escape_threshold: float = 50.0
    # step halvings allowed when a step fails to decrease the residual
    max_halvings: int = 30

    def __post_init__(self):
        if isinstance(self.integrator, str):
            try:
                object.__setattr__(self, "integrator", Integrator(self.integrator.lower()))
            except ValueError:
                raise InvalidOptions(f"unknown integrator {self.integrator!r}") from None
        for name in ("step_size", "max_time", "residual_tol", "escape_threshold"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and val > 0 and math.isfinite(val)):
                raise InvalidOptions(f"{name} must be a positive number, got {val!r}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise InvalidOptions("record_every must be a positive integer")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["integrator"] = self.integrator.value
        return d


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-12
    max_iter: int = 100
    escape_threshold: float = 50.0
    # largest allowed |ds| per iteration (infinity norm)
    max_step: float = 5.0
    min_step_fraction: float = 2.0 ** -30

    def __post_init__(self):
        for name in ("tol", "escape_threshold", "max_step", "min_step_fraction"):
            val = getattr(self, name)
            if not (val > 0 and math.isfinite(val)):
                raise InvalidOptions(f"{name} must be a positive number, got {val!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidOptions("max_iter must be a positive integer")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Trajectory:
    times: List[float] = field(default_factory=list)
    states: List[np.ndarray] = field(default_factory=list)
    residual_inf: List[float] = field(default_factory=list)
    residual_2: List[float] = field(default_factory=list)

    def record(self, t: float, s: np.ndarray, r: np.ndarray) -> None:
        self.times.append(float(t))
        self.states.append(s.copy())
        self.residual_inf.append(float(np.max(np.abs(r))))
        self.residual_2.append(float(np.linalg.norm(r)))

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class ConvergenceFit:
    rate: float
    r_squared: float
    samples: int


@dataclass
class SolveReport:
    method: str
    status: Status
    state: CurvatureState
    total_curvatures: np.ndarray
    targets: np.ndarray
    iterations: int
    time: Optional[float] = None
    fit: Optional[ConvergenceFit] = None
    verdict: Optional[AdmissibilityVerdict] = None
    options: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    @property
    def residual(self) -> np.ndarray:
        return self.total_curvatures - self.targets

    @property
    def residual_inf(self) -> float:
        return float(np.max(np.abs(self.residual)))

    @property
    def residual_2(self) -> float:
        return float(np.linalg.norm(self.residual))

    @property
    def vertex_classes(self):
        return packing.classify_vertices(self.state)


def _check_inputs(c: CellComplex, s0, targets) -> Tuple[np.ndarray, np.ndarray]:
    s = s0.s if isinstance(s0, CurvatureState) else np.asarray(s0, dtype=float)
    s = np.array(s, dtype=float)
    if s.shape != (c.vertex_count,) or not np.all(np.isfinite(s)):
        raise InvalidOptions(f"initial state must be {c.vertex_count} finite log-curvatures")
    targets = np.asarray(targets, dtype=float)
    if targets.shape != (c.vertex_count,):
        raise NonpositiveTarget(f"expected {c.vertex_count} targets, got shape {targets.shape}")
    if np.any(~(targets > 0)) or np.any(~np.isfinite(targets)):
        raise NonpositiveTarget("targets must be positive and finite")
    return s, targets


def _flow_step(c: CellComplex, s: np.ndarray, r0: np.ndarray, h: float,
               integrator: Integrator, targets: np.ndarray) -> np.ndarray:
    if integrator is Integrator.EULER:
        return s - h * r0

    def rhs(x):
        return targets - packing.evaluate(c, x)

    k1 = -r0
    k2 = rhs(s + 0.5 * h * k1)
    k3 = rhs(s + 0.5 * h * k2)
    k4 = rhs(s + h * k3)
    return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def ricci_flow(c: CellComplex, s0, targets: Sequence[float],
               opts: Optional[FlowOptions] = None) -> Tuple[Trajectory, SolveReport]:
    """Integrate the combinatorial Ricci flow in log-curvature form.

    A step that increases ``||L - target||_2`` beyond rounding level is
    retried with half the step size. The run stops when the residual
    sup-norm reaches ``residual_tol`` (Converged), when ``||s||_inf``
    exceeds the escape threshold (Diverging), or at ``max_time``
    (MaxIterations).
    """
    opts = FlowOptions() if opts is None else opts
    s, targets = _check_inputs(c, s0, targets)
    r = packing.evaluate(c, s) - targets
    target_norm = np.linalg.norm(targets)
    traj = Trajectory()
    traj.record(0.0, s, r)

    t = 0.0
    steps = 0
    status = Status.MAX_ITERATIONS
    while True:
        if np.max(np.abs(r)) <= opts.residual_tol:
            status = Status.CONVERGED
            break
        if np.max(np.abs(s)) > opts.escape_threshold:
            status = Status.DIVERGING
            break
        if t >= opts.max_time * (1 - 1e-12):
            break

        h = min(opts.step_size, opts.max_time - t)
        norm = np.linalg.norm(r)
        # rounding level of the residual norm; along an escaping trajectory
        # the true decrease falls below it
        noise = _NOISE_ULPS * np.finfo(float).eps * (norm + target_norm)
        for _ in range(opts.max_halvings + 1):
            s_new = _flow_step(c, s, r, h, opts.integrator, targets)
            r_new = packing.evaluate(c, s_new) - targets
            if np.linalg.norm(r_new) <= norm + noise:
                break
            h *= 0.5
        s, r = s_new, r_new
        t += h
        steps += 1
        if steps % opts.record_every == 0:
            traj.record(t, s, r)
    if traj.times[-1] != t:
        traj.record(t, s, r)

    fit = None
    if status is Status.CONVERGED:
        try:
            fit = convergence_report(traj)
        except (InsufficientSamples, NonDecayingTrajectory) as exc:
            log.debug("rate fit declined: %s", exc)

    report = SolveReport(
        method="flow", status=status, state=CurvatureState(s),
        total_curvatures=r + targets, targets=targets, iterations=steps,
        time=t, fit=fit, options=opts.to_dict())
    return traj, report


def newton_solve(c: CellComplex, s0, targets: Sequence[float],
                 tol: float = 1e-12, max_iter: int = 100,
                 opts: Optional[NewtonOptions] = None) -> SolveReport:
    """Damped Newton iteration on ``L(s) = targets``.

    Each step solves ``M ds = -(L - targets)`` with the Hessian ``M`` (a
    symmetric, strictly diagonally dominant matrix), caps ``|ds|_inf`` at
    ``max_step`` and halves the step until ``||L - targets||_2`` decreases.

    Raises :class:`LineSearchStall` when no step fraction above
    ``min_step_fraction`` decreases the residual; the exception carries the
    last report. Non-convergence after ``max_iter`` steps or escape of
    ``||s||_inf`` beyond the threshold is returned as a report status.
    """
    if opts is None:
        opts = NewtonOptions(tol=tol, max_iter=max_iter)
    s, targets = _check_inputs(c, s0, targets)

    def make_report(status, it):
        return SolveReport(
            method="newton", status=status, state=CurvatureState(s),
            total_curvatures=big_l, targets=targets, iterations=it,
            options=opts.to_dict())

    big_l, m = packing.evaluate(c, s, jacobian=True)
    r = big_l - targets
    for it in range(opts.max_iter + 1):
        if np.max(np.abs(r)) <= opts.tol:
            return make_report(Status.CONVERGED, it)
        if np.max(np.abs(s)) > opts.escape_threshold:
            return make_report(Status.DIVERGING, it)
        if it == opts.max_iter:
            break
        try:
            ds = np.linalg.solve(m, -r)
        except np.linalg.LinAlgError:
            # The dominance margin of M decays like 1/k^2 when all curvatures
            # grow together, so an escaping run can hit exact singularity.
            ds = np.linalg.lstsq(m, -r, rcond=None)[0]
        if not np.all(np.isfinite(ds)):
            raise LinearSolveFailure(f"non-finite Newton step at iteration {it}",
                                     make_report(Status.LINE_SEARCH_STALL, it))
        big = np.max(np.abs(ds))
        if big > opts.max_step:
            ds *= opts.max_step / big

        norm = np.linalg.norm(r)
        frac = 1.0
        while True:
            trial = s + frac * ds
            l_trial = packing.evaluate(c, trial)
            r_trial = l_trial - targets
            if np.linalg.norm(r_trial) < norm:
                break
            frac *= 0.5
            if frac < opts.min_step_fraction:
                raise LineSearchStall(
                    f"line search stalled at iteration {it}; target is probably not admissible",
                    make_report(Status.LINE_SEARCH_STALL, it))
        s = trial
        big_l, m = packing.evaluate(c, s, jacobian=True)
        r = big_l - targets
    return make_report(Status.MAX_ITERATIONS, opts.max_iter)


def convergence_report(traj: Trajectory) -> ConvergenceFit:
    """Fit ``log ||L - target||_2 ~ a - rate * t`` on the second half of a run."""
    if len(traj) < MIN_FIT_SAMPLES:
        raise InsufficientSamples(f"need at least {MIN_FIT_SAMPLES} samples, got {len(traj)}")
    times = np.asarray(traj.times)
    res = np.asarray(traj.residual_2)
    tail = times >= 0.5 * times[-1]
    t_tail, r_tail = times[tail], res[tail]
    if len(t_tail) < MIN_FIT_SAMPLES // 2:
        raise InsufficientSamples("too few samples in the tail half")
    if np.any(r_tail <= 0) or np.any(np.diff(r_tail) > 0):
        raise NonDecayingTrajectory("tail residual is not monotonically decreasing")
    if r_tail[-1] > 0.1 * r_tail[0]:
        raise NonDecayingTrajectory("tail residual decays by less than a factor of 10")
    y = np.log(r_tail)
    slope, intercept = np.polyfit(t_tail, y, 1)
    pred = slope * t_tail + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ConvergenceFit(rate=float(-slope), r_squared=r2, samples=int(tail.sum()))
