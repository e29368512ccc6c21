"""Square-lattice geometry for the surface/toric code.

Qubits live on the edges of an ``L x L`` square lattice.  Vertex stars
``E_v`` (the four edges meeting at a vertex) support the X-type
stabilizers and double as the plaquettes of the feedback spin system;
face boundaries ``E_f`` support the Z-type stabilizers.

Edge indexing is row-major with two sublattices and is part of the
output contract (CSV dumps and hex serialisations depend on it):

* toric, linear size ``L``:
    - horizontal edge ``h(r, c) = r*L + c`` joins vertices ``(r, c)`` and
      ``(r, (c+1) % L)``,
    - vertical edge ``v(r, c) = L*L + r*L + c`` joins ``(r, c)`` and
      ``((r+1) % L, c)``,
    - vertex ``(r, c)`` has index ``r*L + c``; its star is
      ``{h(r,c), h(r,(c-1)%L), v(r,c), v((r-1)%L,c)}``,
    - face ``(r, c)`` has index ``r*L + c``; its boundary is
      ``{h(r,c), h((r+1)%L,c), v(r,c), v(r,(c+1)%L)}``.
* planar patch, linear size ``L``:
    - horizontal edges ``h(r, c) = r*L + c`` for ``r, c in [0, L)``,
    - vertical edges ``v(r, c) = L*L + r*(L-1) + c`` for
      ``r, c in [0, L-1)``; ``v(r, c)`` sits between ``h(r, c)`` /
      ``h(r, c+1)`` and ``h(r+1, c)`` / ``h(r+1, c+1)``,
    - stars sit at the interior junctions ``(r, x)``, ``x in [1, L-1]``,
      index ``r*(L-1) + (x-1)``; interior stars have four edges, stars in
      the top and bottom rows have three,
    - faces ``(r, c)``, ``r in [0, L-1)``, ``c in [0, L)``, index
      ``r*L + c``; the leftmost and rightmost faces have three edges.

  The patch leaves the left/right boundaries rough for Z-error chains
  (star defects can terminate there) and the top/bottom boundaries rough
  for X-error chains (face defects terminate there); this is one
  consistent choice among the possible patch terminations and encodes a
  single logical qubit.

One logical qubit is tracked on either geometry, with reference chains
made of horizontal edges only: the Z chain is row 0, the X chain is
column 0.  On the torus they wind around orthogonal handles and cross
exactly once at ``h(0, 0)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class Boundary(enum.Enum):
    TORIC = "toric"
    PLANAR = "planar"


@dataclass(frozen=True)
class LatticeGeometry:
    """Immutable incidence tables for one lattice.

    Arrays are padded with ``-1`` where a site has fewer than four edges
    (planar boundaries); ``vertex_degree`` / ``face_degree`` give the
    true counts.  Instances are safe to share across trial executors.
    """

    L: int
    boundary: Boundary
    edge_count: int
    vertex_count: int
    face_count: int
    vertex_edges: np.ndarray      # (V, 4) int64, -1 padded
    vertex_degree: np.ndarray     # (V,) int64
    face_edges: np.ndarray        # (F, 4) int64, -1 padded
    face_degree: np.ndarray       # (F,) int64
    edge_vertices: np.ndarray     # (E, 2) int64, -1 padded
    edge_faces: np.ndarray        # (E, 2) int64, -1 padded
    vertex_coords: np.ndarray     # (V, 2) int64, (row, col) of the star site
    face_coords: np.ndarray       # (F, 2) int64
    vertex_incidence: np.ndarray  # (V, E) uint8 star indicator
    face_incidence: np.ndarray    # (F, E) uint8 boundary indicator
    logical_z_edges: np.ndarray   # (L,) int64 reference Z chain (row 0)
    logical_x_edges: np.ndarray   # (L,) int64 reference X chain (column 0)
    _vertex_lookup: dict = field(repr=False, default_factory=dict)
    _face_lookup: dict = field(repr=False, default_factory=dict)

    def vertex_at(self, r: int, c: int) -> int:
        """Index of the star site at coordinates (r, c)."""
        return self._vertex_lookup[(r, c)]

    def face_at(self, r: int, c: int) -> int:
        return self._face_lookup[(r, c)]


def build_lattice(L: int, boundary: Boundary | str = Boundary.TORIC) -> LatticeGeometry:
    """Construct the geometry for linear size ``L`` (``L >= 2``)."""
    if L < 2:
        raise ValueError(f"lattice size must be >= 2, got {L}")
    if isinstance(boundary, str):
        boundary = Boundary(boundary.lower())
    if boundary is Boundary.TORIC:
        return _build_toric(L)
    return _build_planar(L)


def _build_toric(L: int) -> LatticeGeometry:
    E = 2 * L * L
    V = L * L
    F = L * L

    def h(r, c):
        return (r % L) * L + (c % L)

    def v(r, c):
        return L * L + (r % L) * L + (c % L)

    vertex_edges = np.full((V, 4), -1, dtype=np.int64)
    face_edges = np.full((F, 4), -1, dtype=np.int64)
    vertex_coords = np.zeros((V, 2), dtype=np.int64)
    face_coords = np.zeros((F, 2), dtype=np.int64)
    for r in range(L):
        for c in range(L):
            i = r * L + c
            vertex_edges[i] = [h(r, c), h(r, c - 1), v(r, c), v(r - 1, c)]
            face_edges[i] = [h(r, c), h(r + 1, c), v(r, c), v(r, c + 1)]
            vertex_coords[i] = (r, c)
            face_coords[i] = (r, c)

    return _finish(L, Boundary.TORIC, E, vertex_edges, face_edges,
                   vertex_coords, face_coords,
                   logical_z=np.arange(L, dtype=np.int64),           # h(0, c)
                   logical_x=np.arange(L, dtype=np.int64) * L)       # h(r, 0)


def _build_planar(L: int) -> LatticeGeometry:
    E = L * L + (L - 1) * (L - 1)
    V = L * (L - 1)   # interior junction stars
    F = L * (L - 1)

    def h(r, c):
        return r * L + c

    def v(r, c):
        return L * L + r * (L - 1) + c

    vertex_edges = np.full((V, 4), -1, dtype=np.int64)
    face_edges = np.full((F, 4), -1, dtype=np.int64)
    vertex_coords = np.zeros((V, 2), dtype=np.int64)
    face_coords = np.zeros((F, 2), dtype=np.int64)
    for r in range(L):
        for x in range(1, L):
            i = r * (L - 1) + (x - 1)
            edges = [h(r, x - 1), h(r, x)]
            if r > 0:
                edges.append(v(r - 1, x - 1))
            if r < L - 1:
                edges.append(v(r, x - 1))
            vertex_edges[i, :len(edges)] = edges
            vertex_coords[i] = (r, x)
    for r in range(L - 1):
        for c in range(L):
            i = r * L + c
            edges = [h(r, c), h(r + 1, c)]
            if c > 0:
                edges.append(v(r, c - 1))
            if c < L - 1:
                edges.append(v(r, c))
            face_edges[i, :len(edges)] = edges
            face_coords[i] = (r, c)

    return _finish(L, Boundary.PLANAR, E, vertex_edges, face_edges,
                   vertex_coords, face_coords,
                   logical_z=np.arange(L, dtype=np.int64),
                   logical_x=np.arange(L, dtype=np.int64) * L)


def _finish(L, boundary, E, vertex_edges, face_edges, vertex_coords,
            face_coords, logical_z, logical_x) -> LatticeGeometry:
    V = vertex_edges.shape[0]
    F = face_edges.shape[0]
    vertex_degree = (vertex_edges >= 0).sum(axis=1).astype(np.int64)
    face_degree = (face_edges >= 0).sum(axis=1).astype(np.int64)

    edge_vertices = np.full((E, 2), -1, dtype=np.int64)
    edge_faces = np.full((E, 2), -1, dtype=np.int64)
    for site, table in ((edge_vertices, vertex_edges), (edge_faces, face_edges)):
        for i in range(table.shape[0]):
            for e in table[i]:
                if e < 0:
                    continue
                if site[e, 0] < 0:
                    site[e, 0] = i
                elif site[e, 1] < 0:
                    site[e, 1] = i
                else:
                    raise AssertionError(f"edge {e} in more than two sites")

    vertex_incidence = np.zeros((V, E), dtype=np.uint8)
    face_incidence = np.zeros((F, E), dtype=np.uint8)
    for i in range(V):
        vertex_incidence[i, vertex_edges[i, :vertex_degree[i]]] = 1
    for i in range(F):
        face_incidence[i, face_edges[i, :face_degree[i]]] = 1

    geom = LatticeGeometry(
        L=L, boundary=boundary, edge_count=E, vertex_count=V, face_count=F,
        vertex_edges=vertex_edges, vertex_degree=vertex_degree,
        face_edges=face_edges, face_degree=face_degree,
        edge_vertices=edge_vertices, edge_faces=edge_faces,
        vertex_coords=vertex_coords, face_coords=face_coords,
        vertex_incidence=vertex_incidence, face_incidence=face_incidence,
        logical_z_edges=logical_z, logical_x_edges=logical_x,
    )
    for i in range(V):
        geom._vertex_lookup[tuple(vertex_coords[i])] = i
    for i in range(F):
        geom._face_lookup[tuple(face_coords[i])] = i
    return geom


def edges_of_vertex(geom: LatticeGeometry, v: int) -> np.ndarray:
    """Star ``E_v`` of vertex ``v`` (X-stabilizer support)."""
    if not 0 <= v < geom.vertex_count:
        raise IndexError(f"vertex index {v} out of range")
    return geom.vertex_edges[v, :geom.vertex_degree[v]].copy()


def edges_of_face(geom: LatticeGeometry, f: int) -> np.ndarray:
    """Boundary ``E_f`` of face ``f`` (Z-stabilizer support)."""
    if not 0 <= f < geom.face_count:
        raise IndexError(f"face index {f} out of range")
    return geom.face_edges[f, :geom.face_degree[f]].copy()


def adjacent_plaquettes(geom: LatticeGeometry, edge: int) -> np.ndarray:
    """Vertices whose star contains ``edge`` (two on the torus, one or
    two on the planar patch).  These are the plaquettes whose coupling
    terms an edge-spin flip toggles."""
    if not 0 <= edge < geom.edge_count:
        raise IndexError(f"edge index {edge} out of range")
    vs = geom.edge_vertices[edge]
    return vs[vs >= 0].copy()


def adjacent_faces(geom: LatticeGeometry, edge: int) -> np.ndarray:
    """Faces whose boundary contains ``edge`` (dual-sector counterpart of
    :func:`adjacent_plaquettes`)."""
    if not 0 <= edge < geom.edge_count:
        raise IndexError(f"edge index {edge} out of range")
    fs = geom.edge_faces[edge]
    return fs[fs >= 0].copy()
