"""Combinatorial polygonal cell complexes.

A complex is given by a vertex count and a list of faces, each face a cyclic
list of vertex indices. Only vertex-face incidence enters the geometry, so no
genus or orientability checks are made.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .errors import (
    DegenerateFace,
    EmptySubset,
    IndexOutOfRange,
    IsolatedVertex,
    LowDegreeVertex,
    MultiEdge,
    OverusedEdge,
)

Edge = Tuple[int, int]


def _edge(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


def _face_edges(face: Sequence[int]) -> List[Edge]:
    n = len(face)
    return [_edge(face[i], face[(i + 1) % n]) for i in range(n)]


@dataclass(frozen=True)
class CellComplex:
    """A validated finite polygonal cellular decomposition.

    Build instances with :func:`validate`; the constructor does not check
    anything.
    """

    vertex_count: int
    faces: Tuple[Tuple[int, ...], ...]
    edge_faces: Dict[Edge, Tuple[int, ...]]

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return tuple(self.edge_faces)

    @property
    def face_sizes(self) -> Tuple[int, ...]:
        return tuple(len(f) for f in self.faces)

    @cached_property
    def interior_edges(self) -> Tuple[Edge, ...]:
        return tuple(e for e, fs in self.edge_faces.items() if len(fs) == 2)

    @cached_property
    def boundary_edges(self) -> Tuple[Edge, ...]:
        return tuple(e for e, fs in self.edge_faces.items() if len(fs) == 1)

    @cached_property
    def boundary_vertices(self) -> Tuple[int, ...]:
        return tuple(sorted({v for e in self.boundary_edges for v in e}))

    @cached_property
    def vertex_faces(self) -> Tuple[Tuple[int, ...], ...]:
        incident: List[List[int]] = [[] for _ in range(self.vertex_count)]
        for p, face in enumerate(self.faces):
            for v in face:
                incident[v].append(p)
        return tuple(tuple(fs) for fs in incident)

    @cached_property
    def degrees(self) -> Tuple[int, ...]:
        deg = [0] * self.vertex_count
        for a, b in self.edge_faces:
            deg[a] += 1
            deg[b] += 1
        return tuple(deg)

    @cached_property
    def incidence(self) -> np.ndarray:
        """Boolean |V| x |F| vertex-face incidence matrix."""
        m = np.zeros((self.vertex_count, len(self.faces)), dtype=bool)
        for p, face in enumerate(self.faces):
            m[list(face), p] = True
        return m

    @cached_property
    def size_groups(self) -> Tuple[Tuple[np.ndarray, np.ndarray], ...]:
        """Faces grouped by size as ``(face_indices, vertex_matrix)`` pairs."""
        by_size: Dict[int, List[int]] = {}
        for p, face in enumerate(self.faces):
            by_size.setdefault(len(face), []).append(p)
        return tuple((np.array(idx), np.array([self.faces[p] for p in idx]))
                     for _, idx in sorted(by_size.items()))

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.vertex_count:
            raise IndexOutOfRange(
                f"vertex {v} outside [0, {self.vertex_count})")

    def faces_incident(self, v: int) -> List[int]:
        """Indices of all faces whose cycle contains ``v``."""
        self._check_vertex(v)
        return list(self.vertex_faces[v])

    def subset_face_stats(self, subset: Iterable[int]) -> List[Tuple[int, int, int]]:
        """Return ``(face, N(P, W), N(P))`` for every face touching ``W``."""
        w = set(subset)
        if not w:
            raise EmptySubset("vertex subset must be nonempty")
        for v in w:
            self._check_vertex(v)
        stats = []
        for p, face in enumerate(self.faces):
            hits = sum(1 for v in face if v in w)
            if hits:
                stats.append((p, hits, len(face)))
        return stats

    def summary(self) -> str:
        return (f"{self.vertex_count} vertices, {len(self.edge_faces)} edges "
                f"(interior: {len(self.interior_edges)}, boundary: "
                f"{len(self.boundary_edges)}), {len(self.faces)} faces")


def validate(raw_faces: Sequence[Sequence[int]], vertex_count: int) -> CellComplex:
    """Check a raw face list and build a :class:`CellComplex`.

    Checks run in a fixed order so the same input always reports the same
    first violation.
    """
    if int(vertex_count) != vertex_count or vertex_count < 1:
        raise IndexOutOfRange(f"vertex_count must be a positive integer, got {vertex_count!r}")
    vertex_count = int(vertex_count)

    faces: List[Tuple[int, ...]] = []
    for p, raw in enumerate(raw_faces):
        face = tuple(int(v) for v in raw)
        for v in face:
            if not 0 <= v < vertex_count:
                raise IndexOutOfRange(f"face {p}: vertex {v} outside [0, {vertex_count})")
        if len(face) < 3:
            raise DegenerateFace(f"DegenerateFace at face {p}: cycle has {len(face)} < 3 vertices")
        if len(set(face)) != len(face):
            raise DegenerateFace(f"DegenerateFace at face {p}: repeated vertex in {list(face)}")
        faces.append(face)

    edge_faces: Dict[Edge, List[int]] = {}
    seen_faces: Dict[frozenset, int] = {}
    for p, face in enumerate(faces):
        edges = _face_edges(face)
        if len(set(edges)) != len(edges):
            raise MultiEdge(f"MultiEdge at face {p}: an edge repeats within the cycle")
        key = frozenset(edges)
        if key in seen_faces:
            raise OverusedEdge(
                f"OverusedEdge at face {p}: duplicates face {seen_faces[key]}")
        seen_faces[key] = p
        for e in edges:
            edge_faces.setdefault(e, []).append(p)

    for e, fs in edge_faces.items():
        if len(fs) > 2:
            raise OverusedEdge(f"OverusedEdge: edge {list(e)} lies in faces {fs}")

    c = CellComplex(vertex_count, tuple(faces),
                    {e: tuple(fs) for e, fs in edge_faces.items()})

    for v in range(vertex_count):
        if not c.vertex_faces[v]:
            raise IsolatedVertex(f"IsolatedVertex: vertex {v} lies in no face")
    for v, d in enumerate(c.degrees):
        if d < 3:
            raise LowDegreeVertex(f"LowDegreeVertex: vertex {v} has degree {d} < 3")
    return c


def faces_incident(c: CellComplex, v: int) -> List[int]:
    return c.faces_incident(v)


def subset_face_stats(c: CellComplex, subset: Iterable[int]) -> List[Tuple[int, int, int]]:
    return c.subset_face_stats(subset)


def triangle_fan(spokes: int = 6) -> CellComplex:
    """Disk made of ``spokes`` triangles around vertex 0."""
    faces = [[0, i, i % spokes + 1] for i in range(1, spokes + 1)]
    return validate(faces, spokes + 1)


def quad_annulus(m: int = 6) -> CellComplex:
    """Annulus made of ``m`` quads; inner ring 0..m-1, outer ring m..2m-1."""
    faces = [[i, (i + 1) % m, m + (i + 1) % m, m + i] for i in range(m)]
    return validate(faces, 2 * m)
