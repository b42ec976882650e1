"""Membership test for the polytope of realisable total curvatures.

A target vector ``T`` is realisable iff for every nonempty vertex subset W

    sum_{w in W} T_w  <  pi * sum_{P touching W} min(N(P, W), N(P) - 2),

where ``N(P, W)`` counts the vertices of face P lying in W. Up to
``exact_limit`` vertices all subsets are enumerated in Gray-code order with
O(degree) incremental updates; beyond that a deterministic sample is tested
and a positive verdict is only advisory.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .cellcomplex import CellComplex
from .errors import NonpositiveTarget

SAMPLE_COUNT = 100_000
# Prefix bits fixed per enumeration chunk; keeps the canonical order
# independent of the worker count.
_CHUNK_BITS = 4


class Mode(Enum):
    EXACT = "Exact"
    SAMPLED = "Sampled"


@dataclass(frozen=True)
class Witness:
    subset: Tuple[int, ...]
    lhs: float
    rhs: float


@dataclass(frozen=True)
class AdmissibilityVerdict:
    admissible: bool
    mode: Mode
    witness: Optional[Witness] = None
    subsets_checked: int = 0

    def to_dict(self) -> dict:
        out = {"admissible": self.admissible, "mode": self.mode.value,
               "subsets_checked": self.subsets_checked, "witness": None}
        if self.witness is not None:
            out["witness"] = {"subset": list(self.witness.subset),
                              "lhs": self.witness.lhs, "rhs": self.witness.rhs}
        return out


def _bound_units(c: CellComplex, subset: Iterable[int]) -> int:
    return sum(min(hits, n - 2) for _, hits, n in c.subset_face_stats(subset))


def bound_for_subset(c: CellComplex, subset: Iterable[int]) -> float:
    """Right-hand side of the subset constraint for ``subset``."""
    return math.pi * _bound_units(c, subset)


def _witness(c: CellComplex, targets: np.ndarray, subset: Sequence[int]) -> Optional[Witness]:
    subset = tuple(sorted(int(v) for v in subset))
    lhs = math.fsum(targets[list(subset)])
    rhs = bound_for_subset(c, subset)
    return Witness(subset, lhs, rhs) if lhs >= rhs else None


def _scan_chunk(args) -> Tuple[int, Optional[Tuple[int, ...]]]:
    """Gray-code scan over the low bits with a fixed high-bit prefix.

    Returns the number of subsets visited and the first candidate violation
    (already confirmed with an exactly summed left-hand side).
    """
    vertex_faces, face_sizes, targets, prefix, low_bits = args
    n_v = len(targets)
    caps = [n - 2 for n in face_sizes]
    counts = [0] * len(face_sizes)
    members = [False] * n_v
    lhs = 0.0
    units = 0
    slack = 1e-9 * (1.0 + sum(targets))

    def toggle(v):
        nonlocal lhs, units
        if members[v]:
            members[v] = False
            lhs -= targets[v]
            for p in vertex_faces[v]:
                if counts[p] <= caps[p]:
                    units -= 1
                counts[p] -= 1
        else:
            members[v] = True
            lhs += targets[v]
            for p in vertex_faces[v]:
                counts[p] += 1
                if counts[p] <= caps[p]:
                    units += 1

    for v in range(low_bits, n_v):
        if prefix >> (v - low_bits) & 1:
            toggle(v)

    def check():
        if lhs >= math.pi * units - slack:
            subset = tuple(v for v in range(n_v) if members[v])
            if math.fsum(targets[v] for v in subset) >= math.pi * units:
                return subset
        return None

    visited = 0
    if prefix:
        visited += 1
        hit = check()
        if hit:
            return visited, hit
    for i in range(1, 1 << low_bits):
        # bit flipped between Gray codes i-1 and i
        toggle((i & -i).bit_length() - 1)
        visited += 1
        hit = check()
        if hit:
            return visited, hit
    return visited, None


def _resolve_workers(workers: Optional[int]) -> int:
    if workers is None:
        workers = int(os.environ.get("HYPACK_THREADS", "1") or 1)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def _exact(c: CellComplex, targets: np.ndarray, workers: int) -> AdmissibilityVerdict:
    n_v = c.vertex_count
    low_bits = max(n_v - _CHUNK_BITS, 0)
    jobs = [(c.vertex_faces, c.face_sizes, [float(t) for t in targets], prefix, low_bits)
            for prefix in range(1 << (n_v - low_bits))]
    if workers > 1 and n_v >= 16:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_chunk, jobs))
    else:
        results = []
        for job in jobs:
            results.append(_scan_chunk(job))
            if results[-1][1] is not None:
                break
    checked = 0
    for visited, hit in results:
        checked += visited
        if hit is not None:
            return AdmissibilityVerdict(False, Mode.EXACT, _witness(c, targets, hit), checked)
    return AdmissibilityVerdict(True, Mode.EXACT, None, checked)


def _sampled(c: CellComplex, targets: np.ndarray, samples: int, seed: int) -> AdmissibilityVerdict:
    n_v = c.vertex_count
    candidates: List[Tuple[int, ...]] = [(v,) for v in range(n_v)]
    candidates += [tuple(sorted(f)) for f in c.faces]
    candidates.append(tuple(range(n_v)))
    checked = 0
    for subset in candidates:
        checked += 1
        w = _witness(c, targets, subset)
        if w is not None:
            return AdmissibilityVerdict(False, Mode.SAMPLED, w, checked)

    rng = np.random.default_rng(seed)
    inc = c.incidence.astype(np.int64)
    caps = np.array(c.face_sizes) - 2
    block = 10_000
    for start in range(0, samples, block):
        m = min(block, samples - start)
        masks = rng.random((m, n_v)) < rng.random((m, 1))
        masks[~masks.any(axis=1), 0] = True
        counts = masks.astype(np.int64) @ inc
        rhs = math.pi * np.minimum(counts, caps).sum(axis=1)
        lhs = masks @ targets
        bad = np.flatnonzero(lhs >= rhs - 1e-9 * (1.0 + targets.sum()))
        for row in bad:
            w = _witness(c, targets, np.flatnonzero(masks[row]))
            if w is not None:
                return AdmissibilityVerdict(False, Mode.SAMPLED, w, checked + int(row) + 1)
        checked += m
    return AdmissibilityVerdict(True, Mode.SAMPLED, None, checked)


def check_target(c: CellComplex, targets: Sequence[float], exact_limit: int = 20,
                 samples: int = SAMPLE_COUNT, seed: int = 0,
                 workers: Optional[int] = None) -> AdmissibilityVerdict:
    """Decide whether ``targets`` lies in the admissible polytope.

    With ``vertex_count <= exact_limit`` every nonempty subset is checked
    and the first violated constraint in canonical order is returned as the
    witness. ``workers`` defaults to ``$HYPACK_THREADS`` (0 = all cores).
    """
    targets = np.asarray(targets, dtype=float)
    if targets.shape != (c.vertex_count,):
        raise NonpositiveTarget(f"expected {c.vertex_count} targets, got shape {targets.shape}")
    if np.any(~(targets > 0)) or np.any(~np.isfinite(targets)):
        raise NonpositiveTarget("targets must be positive and finite")
    if c.vertex_count <= exact_limit:
        return _exact(c, targets, _resolve_workers(workers))
    return _sampled(c, targets, samples, seed)

