import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypack import admissibility
from hypack.admissibility import Mode, bound_for_subset, check_target
from hypack.cellcomplex import quad_annulus, triangle_fan, validate
from hypack.errors import EmptySubset, NonpositiveTarget

from oracles import brute_admissible, critical_scale, subset_bound, subset_table

ANNULUS_TABLE = subset_table(quad_annulus())
FAN_TABLE = subset_table(triangle_fan())


def test_bound_examples(annulus, fan):
    assert bound_for_subset(annulus, range(12)) == pytest.approx(12 * math.pi)
    # the four vertices of a quad: 2 from the quad itself, 2 from each neighbour
    assert bound_for_subset(annulus, [0, 1, 7, 6]) == pytest.approx(6 * math.pi)
    assert bound_for_subset(fan, [0]) == pytest.approx(6 * math.pi)
    assert bound_for_subset(fan, [1]) == pytest.approx(2 * math.pi)
    assert bound_for_subset(fan, range(7)) == pytest.approx(6 * math.pi)
    with pytest.raises(EmptySubset):
        bound_for_subset(fan, [])


@settings(max_examples=100, deadline=None)
@given(st.sets(st.integers(0, 11), min_size=1))
def test_bound_matches_direct_count(subset):
    c = quad_annulus()
    assert bound_for_subset(c, subset) == pytest.approx(subset_bound(c.faces, subset))


def test_annulus_unit_targets(annulus):
    verdict = check_target(annulus, np.ones(12))
    assert verdict.admissible
    assert verdict.mode is Mode.EXACT
    assert verdict.subsets_checked == 2 ** 12 - 1
    assert verdict.witness is None


def test_fan_singleton_witness(fan):
    targets = np.ones(7)
    targets[0] = 6 * math.pi + 0.1
    verdict = check_target(fan, targets)
    assert not verdict.admissible
    assert verdict.witness.subset == (0,)
    assert verdict.witness.lhs >= verdict.witness.rhs
    assert verdict.to_dict()["witness"]["subset"] == [0]


def test_whole_set_violation(annulus):
    verdict = check_target(annulus, np.full(12, 100.0))
    assert not verdict.admissible
    w = verdict.witness
    assert w.lhs >= w.rhs == pytest.approx(bound_for_subset(annulus, w.subset))


def test_boundary_counts_as_violation(fan):
    # equality is not allowed
    targets = np.full(7, 0.1)
    targets[1] = 2 * math.pi
    assert not check_target(fan, targets).admissible
    targets[1] = 2 * math.pi - 1e-9
    assert check_target(fan, targets).admissible


@pytest.mark.parametrize("which, table", [("annulus", ANNULUS_TABLE), ("fan", FAN_TABLE)])
def test_agrees_with_enumeration(which, table, request):
    c = request.getfixturevalue(which)
    rng = np.random.default_rng(0)
    for _ in range(40):
        d = rng.uniform(0.1, 1.0, c.vertex_count)
        t_star, _ = critical_scale(c, d, table)
        targets = d * t_star * rng.uniform(0.8, 1.2)
        verdict = check_target(c, targets)
        assert verdict.admissible == brute_admissible(c, targets, table)
        if not verdict.admissible:
            w = verdict.witness
            assert math.fsum(targets[list(w.subset)]) >= subset_bound(c.faces, w.subset)


def test_witness_is_deterministic(annulus):
    targets = np.full(12, 4.0)
    first = check_target(annulus, targets)
    assert check_target(annulus, targets) == first


def test_parallel_matches_serial():
    c = quad_annulus(8)
    rng = np.random.default_rng(1)
    for scale in (0.9, 1.1):
        d = rng.uniform(0.2, 1.0, 16)
        t_star, _ = critical_scale(c, d)
        targets = d * t_star * scale
        serial = check_target(c, targets, workers=1)
        parallel = check_target(c, targets, workers=2)
        assert serial.admissible == parallel.admissible == (scale < 1)
        assert serial.witness == parallel.witness


def test_env_sets_workers(monkeypatch):
    monkeypatch.setenv("HYPACK_THREADS", "3")
    assert admissibility._resolve_workers(None) == 3
    monkeypatch.setenv("HYPACK_THREADS", "0")
    assert admissibility._resolve_workers(None) >= 1
    assert admissibility._resolve_workers(2) == 2


def test_sampled_mode_for_large_complexes():
    c = quad_annulus(15)
    verdict = check_target(c, np.ones(30))
    assert verdict.mode is Mode.SAMPLED
    assert verdict.admissible
    assert verdict.subsets_checked > 100_000


def test_sampled_mode_finds_obvious_violations():
    c = quad_annulus(15)
    targets = np.ones(30)
    targets[4] = 7.0
    verdict = check_target(c, targets)
    assert not verdict.admissible and verdict.witness.subset == (4,)
    # 30 * 3.5 exceeds the whole-set bound 30 pi
    verdict = check_target(c, np.full(30, 3.5))
    assert not verdict.admissible


def test_exact_limit_switches_mode(fan):
    assert check_target(fan, np.ones(7), exact_limit=6).mode is Mode.SAMPLED
    assert check_target(fan, np.ones(7), exact_limit=7).mode is Mode.EXACT


@pytest.mark.parametrize("bad", [[1.0] * 6, [1.0] * 6 + [0.0], [1.0] * 6 + [np.inf]])
def test_rejects_bad_targets(fan, bad):
    with pytest.raises(NonpositiveTarget):
        check_target(fan, bad)


def test_mixed_faces_against_enumeration():
    c = validate([[0, 1, 2, 3], [4, 0, 1], [4, 1, 2], [4, 2, 3], [4, 3, 0]], 5)
    table = subset_table(c)
    rng = np.random.default_rng(2)
    for _ in range(50):
        targets = rng.uniform(0.1, 4.0, 5)
        assert check_target(c, targets).admissible == brute_admissible(c, targets, table)
