import math

import numpy as np
import pytest

from hypack import packing, solvers
from hypack.errors import (
    InsufficientSamples,
    InvalidOptions,
    LineSearchStall,
    NonDecayingTrajectory,
    NonpositiveTarget,
)
from hypack.facepack import face_batch
from hypack.packing import CurvatureState
from hypack.solvers import FlowOptions, NewtonOptions, Status, Trajectory

from oracles import critical_scale


def symmetric_annulus_s(target):
    """All-equal annulus solution by bisection on one quad with equal corners."""
    def two_l(s):
        return 2 * face_batch(np.full((1, 4), s))[1][0, 0]

    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if two_l(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_fixed_point(annulus):
    traj, report = solvers.ricci_flow(annulus, np.zeros(12), [2 * math.sqrt(2)] * 12)
    assert report.status is Status.CONVERGED
    assert report.iterations == 0
    assert len(traj) == 1
    assert report.residual_inf < 1e-14


def test_flow_symmetric_annulus(annulus):
    traj, report = solvers.ricci_flow(annulus, np.zeros(12), [2.0] * 12)
    assert report.status is Status.CONVERGED
    assert report.residual_inf <= 1e-10
    assert np.ptp(report.state.s) < 1e-9
    assert report.state.s == pytest.approx([symmetric_annulus_s(2.0)] * 12, abs=1e-9)
    assert report.fit.rate > 0 and report.fit.r_squared > 0.99


def test_flow_residual_monotone(annulus):
    traj, _ = solvers.ricci_flow(annulus, np.zeros(12), np.linspace(1.0, 3.0, 12))
    assert np.all(np.diff(traj.residual_2) < 0)
    assert np.all(np.diff(traj.times) > 0)


def test_newton_matches_flow(annulus):
    _, flow = solvers.ricci_flow(annulus, np.zeros(12), [2.0] * 12)
    newton = solvers.newton_solve(annulus, np.zeros(12), [2.0] * 12)
    assert newton.status is Status.CONVERGED
    assert newton.residual_inf <= 1e-12
    assert newton.state.s == pytest.approx(flow.state.s, abs=1e-8)


def test_newton_round_trip_fan(fan):
    k = np.arange(7) / 2 + 0.3
    targets = packing.total_curvatures(fan, CurvatureState.from_k(k))
    report = solvers.newton_solve(fan, np.zeros(7), targets)
    assert report.converged
    assert report.state.k == pytest.approx(k, abs=1e-8)


def test_newton_uniqueness(fan):
    k = np.arange(7) / 2 + 0.3
    targets = packing.total_curvatures(fan, CurvatureState.from_k(k))
    rng = np.random.default_rng(0)
    a = solvers.newton_solve(fan, np.zeros(7), targets)
    b = solvers.newton_solve(fan, rng.normal(scale=2.0, size=7), targets)
    assert a.state.s == pytest.approx(b.state.s, abs=1e-8)


def test_flow_diverges_on_whole_set_violation(annulus):
    traj, report = solvers.ricci_flow(annulus, np.zeros(12), [100.0] * 12)
    assert report.status is Status.DIVERGING
    assert np.max(np.abs(report.state.s)) > 50
    assert report.fit is None


def test_newton_never_converges_on_violation(annulus):
    with pytest.raises(LineSearchStall) as info:
        solvers.newton_solve(annulus, np.zeros(12), [100.0] * 12)
    assert info.value.report.status is Status.LINE_SEARCH_STALL
    assert len(info.value.report.state) == 12


def test_newton_escape_is_reported(fan):
    rng = np.random.default_rng(3)
    d = rng.uniform(0.2, 1.0, 7)
    t_star, _ = critical_scale(fan, d)
    opts = NewtonOptions(escape_threshold=5.0)
    try:
        report = solvers.newton_solve(fan, np.zeros(7), d * t_star * 1.2, opts=opts)
    except LineSearchStall as exc:
        report = exc.report
    assert report.status is not Status.CONVERGED


def test_newton_max_iterations(annulus):
    report = solvers.newton_solve(annulus, np.zeros(12), [2.0] * 12, max_iter=1)
    assert report.status is Status.MAX_ITERATIONS
    assert report.iterations == 1


def test_flow_max_time(annulus):
    _, report = solvers.ricci_flow(annulus, np.zeros(12), [2.0] * 12, FlowOptions(max_time=1.0))
    assert report.status is Status.MAX_ITERATIONS
    assert report.time == pytest.approx(1.0)


def test_euler_integrator(annulus):
    opts = FlowOptions(integrator="euler", step_size=0.1)
    _, report = solvers.ricci_flow(annulus, np.zeros(12), [2.0] * 12, opts)
    assert report.converged
    assert report.state.s == pytest.approx([symmetric_annulus_s(2.0)] * 12, abs=1e-9)


def test_step_halving_keeps_monotone(fan):
    # an oversized step forces halving; the residual must still decrease
    opts = FlowOptions(step_size=5.0, max_time=200.0)
    traj, report = solvers.ricci_flow(fan, np.zeros(7), np.full(7, 1.2), opts)
    assert report.converged
    assert np.all(np.diff(traj.residual_2) <= 0)
    assert np.min(np.diff(traj.times)) < 5.0


def test_record_every(annulus):
    full, _ = solvers.ricci_flow(annulus, np.zeros(12), [2.0] * 12)
    sparse, report = solvers.ricci_flow(annulus, np.zeros(12), [2.0] * 12,
                                        FlowOptions(record_every=10))
    assert sparse.times[-1] == full.times[-1]
    assert len(sparse) == 1 + math.ceil(report.iterations / 10)
    assert sparse.times[1] == pytest.approx(full.times[10])


def test_flow_is_deterministic(fan):
    targets = np.linspace(0.5, 2.0, 7)
    a, ra = solvers.ricci_flow(fan, np.zeros(7), targets)
    b, rb = solvers.ricci_flow(fan, np.zeros(7), targets)
    assert a.times == b.times and a.residual_2 == b.residual_2
    assert np.array_equal(ra.state.s, rb.state.s)


@pytest.mark.parametrize("kwargs", [
    {"step_size": 0.0}, {"max_time": -1.0}, {"residual_tol": math.nan},
    {"integrator": "leapfrog"}, {"record_every": 0}, {"escape_threshold": 0.0},
])
def test_flow_options_validation(kwargs):
    with pytest.raises(InvalidOptions):
        FlowOptions(**kwargs)


@pytest.mark.parametrize("kwargs", [{"tol": 0.0}, {"max_iter": 0}, {"max_step": -1.0}])
def test_newton_options_validation(kwargs):
    with pytest.raises(InvalidOptions):
        NewtonOptions(**kwargs)


def test_input_validation(annulus):
    with pytest.raises(NonpositiveTarget):
        solvers.newton_solve(annulus, np.zeros(12), [0.0] * 12)
    with pytest.raises(NonpositiveTarget):
        solvers.ricci_flow(annulus, np.zeros(12), [1.0] * 11)
    with pytest.raises(InvalidOptions):
        solvers.newton_solve(annulus, np.zeros(11), [1.0] * 12)
    report = solvers.newton_solve(annulus, CurvatureState.horocycles(12), [2.0] * 12)
    assert report.converged


def test_convergence_report_fit():
    t = np.linspace(0, 10, 101)
    traj = Trajectory()
    for ti in t:
        r = np.array([3.0, 4.0]) * math.exp(-0.7 * ti)
        traj.record(ti, np.zeros(2), r)
    fit = solvers.convergence_report(traj)
    assert fit.rate == pytest.approx(0.7, rel=1e-10)
    assert fit.r_squared == pytest.approx(1.0)


def test_convergence_report_rejects_short_runs(annulus):
    traj, _ = solvers.ricci_flow(annulus, np.zeros(12), [2 * math.sqrt(2)] * 12)
    with pytest.raises(InsufficientSamples):
        solvers.convergence_report(traj)


def test_convergence_report_rejects_diverging_runs(annulus):
    traj, _ = solvers.ricci_flow(annulus, np.zeros(12), [100.0] * 12)
    with pytest.raises(NonDecayingTrajectory):
        solvers.convergence_report(traj)


def test_convergence_report_rejects_rising_tail():
    traj = Trajectory()
    for i in range(20):
        traj.record(float(i), np.zeros(1), np.array([1.0 + (i % 3)]))
    with pytest.raises(NonDecayingTrajectory):
        solvers.convergence_report(traj)


def test_report_classes(fan):
    k = np.array([2.0, 0.5, 1.0, 3.0, 0.4, 1.5, 0.9])
    targets = packing.total_curvatures(fan, CurvatureState.from_k(k))
    report = solvers.newton_solve(fan, np.zeros(7), targets)
    classes = [kind.vertex_class for kind in report.vertex_classes]
    assert classes[:2] == ["V3", "V1"]
    assert classes[3:] == ["V3", "V1", "V3", "V1"]
