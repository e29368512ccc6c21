"""Independent GF(2) coset oracle for homology classification.

Corrections clearing a syndrome form a coset of the cycle space: one
particular solution of H x = s plus the null space of the parity-check
matrix.  For small lattices the whole coset is enumerable with bitmask
integers, giving the exact set of minimum-weight corrections and their
homology classes without touching the matching decoder.
"""

from __future__ import annotations

import numpy as np


def _mask(edges) -> int:
    m = 0
    for e in edges:
        m |= 1 << int(e)
    return m


def check_masks(geom, sector: str) -> list[int]:
    if sector == "vertex":
        table, deg = geom.vertex_edges, geom.vertex_degree
    else:
        table, deg = geom.face_edges, geom.face_degree
    return [_mask(table[i, :deg[i]]) for i in range(deg.shape[0])]


def solve_gf2(rows: list[int], rhs: list[int], n_cols: int):
    """Row-reduce [rows | rhs]; return (particular solution, null-space basis)
    as bitmask ints, or (None, basis) when inconsistent."""
    rows = list(rows)
    rhs = list(rhs)
    pivots = {}
    for col in range(n_cols):
        piv = None
        for i, r in enumerate(rows):
            if i in pivots.values():
                continue
            if (r >> col) & 1:
                piv = i
                break
        if piv is None:
            continue
        pivots[col] = piv
        for i in range(len(rows)):
            if i != piv and (rows[i] >> col) & 1:
                rows[i] ^= rows[piv]
                rhs[i] ^= rhs[piv]
    for i, r in enumerate(rows):
        if r == 0 and rhs[i]:
            return None, []
    x = 0
    for col, i in pivots.items():
        if rhs[i]:
            x |= 1 << col
    free_cols = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free_cols:
        v = 1 << fc
        for col, i in pivots.items():
            if (rows[i] >> fc) & 1:
                v |= 1 << col
        basis.append(v)
    return x, basis


def min_weight_classes(geom, error_bits: np.ndarray, sector: str):
    """Enumerate every syndrome-clearing correction; return
    (min weight, set of (class bit) values achieved at min weight).

    The class bit is the intersection parity of the residual with the
    conjugate reference chain (X chain for the vertex sector, Z chain
    for the face sector).
    """
    n = geom.edge_count
    rows = check_masks(geom, sector)
    err = _mask(np.flatnonzero(error_bits))
    rhs = [bin(r & err).count("1") & 1 for r in rows]
    x0, basis = solve_gf2(rows, rhs, n)
    assert x0 is not None, "syndrome system must be consistent"
    ref = _mask(geom.logical_x_edges if sector == "vertex" else geom.logical_z_edges)

    best_w = None
    best_classes = set()
    corr = x0
    # Gray-code walk over the null space span
    k = len(basis)
    for g in range(1 << k):
        if g:
            corr ^= basis[(g & -g).bit_length() - 1]
        w = bin(corr).count("1")
        if best_w is None or w < best_w:
            best_w = w
            best_classes = set()
        if w == best_w:
            residual = corr ^ err
            best_classes.add(bin(residual & ref).count("1") & 1)
    return best_w, best_classes
