import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mftp.lattice import (Boundary, adjacent_faces, adjacent_plaquettes,
                          build_lattice, edges_of_face, edges_of_vertex)


def test_toric_counts_L4():
    g = build_lattice(4, "toric")
    assert (g.edge_count, g.vertex_count, g.face_count) == (32, 16, 16)


def test_toric_regularity_L2():
    g = build_lattice(2, "toric")
    assert (g.vertex_degree == 4).all()
    assert (g.face_degree == 4).all()
    # every edge appears in exactly 2 vertex stars and 2 face boundaries
    assert (g.vertex_incidence.sum(axis=0) == 2).all()
    assert (g.face_incidence.sum(axis=0) == 2).all()


def test_toric_L2_star_hand_derived():
    # star of vertex (0,0) on the 2x2 torus, from the documented indexing:
    # h(0,0)=0 east, h(0,1)=1 west (wrap), v(0,0)=4 south, v(1,0)=6 north
    g = build_lattice(2, "toric")
    assert sorted(edges_of_vertex(g, g.vertex_at(0, 0))) == [0, 1, 4, 6]


def test_planar_L3_hand_enumerated():
    g = build_lattice(3, "planar")
    assert g.edge_count == 13          # 9 horizontal + 4 vertical
    assert g.vertex_count == 6
    assert g.face_count == 6
    corner = g.vertex_at(0, 1)
    interior = g.vertex_at(1, 1)
    assert sorted(edges_of_vertex(g, corner)) == [0, 1, 9]
    assert sorted(edges_of_vertex(g, interior)) == [3, 4, 9, 11]
    assert len(edges_of_vertex(g, corner)) < len(edges_of_vertex(g, interior))
    assert sorted(edges_of_face(g, g.face_at(0, 0))) == [0, 3, 9]
    assert sorted(edges_of_face(g, g.face_at(0, 1))) == [1, 4, 9, 10]


def test_planar_degree_pattern():
    g = build_lattice(5, "planar")
    for v in range(g.vertex_count):
        r, _ = g.vertex_coords[v]
        assert g.vertex_degree[v] == (3 if r in (0, g.L - 1) else 4)
    for f in range(g.face_count):
        _, c = g.face_coords[f]
        assert g.face_degree[f] == (3 if c in (0, g.L - 1) else 4)


def test_toric_star_size_translation_invariant():
    g = build_lattice(4, "toric")
    sizes = {len(edges_of_vertex(g, v)) for v in range(g.vertex_count)}
    assert sizes == {4}


def test_adjacent_plaquettes():
    g = build_lattice(4, "toric")
    for e in range(g.edge_count):
        assert len(adjacent_plaquettes(g, e)) == 2
        assert len(adjacent_faces(g, e)) == 2
    gp = build_lattice(3, "planar")
    assert len(adjacent_plaquettes(gp, 0)) == 1   # h(0,0) touches one star only
    counts = {len(adjacent_plaquettes(gp, e)) for e in range(gp.edge_count)}
    assert counts == {1, 2}


@pytest.mark.parametrize("L", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("boundary", ["toric", "planar"])
def test_incidence_duality_exhaustive(L, boundary):
    g = build_lattice(L, boundary)
    for e in range(g.edge_count):
        for v in adjacent_plaquettes(g, e):
            assert e in edges_of_vertex(g, v)
        for f in adjacent_faces(g, e):
            assert e in edges_of_face(g, f)
    for v in range(g.vertex_count):
        for e in edges_of_vertex(g, v):
            assert v in adjacent_plaquettes(g, e)
    for f in range(g.face_count):
        for e in edges_of_face(g, f):
            assert f in adjacent_faces(g, e)


def test_torus_star_product_is_identity():
    # product of all vertex stabilizers covers every edge twice
    for L in (2, 3, 4, 6):
        g = build_lattice(L, "toric")
        assert not (g.vertex_incidence.sum(axis=0) & 1).any()
        assert not (g.face_incidence.sum(axis=0) & 1).any()


@pytest.mark.parametrize("boundary", ["toric", "planar"])
def test_reference_chains_zero_syndrome(boundary):
    for L in (2, 4, 5):
        g = build_lattice(L, boundary)
        z_mask = np.zeros(g.edge_count, dtype=np.uint8)
        z_mask[g.logical_z_edges] = 1
        x_mask = np.zeros(g.edge_count, dtype=np.uint8)
        x_mask[g.logical_x_edges] = 1
        assert not ((g.vertex_incidence @ z_mask) & 1).any()
        assert not ((g.face_incidence @ x_mask) & 1).any()
        # the chains hit each edge at most once and cross exactly once
        assert len(set(g.logical_z_edges)) == L
        assert len(set(g.logical_x_edges)) == L
        assert len(set(g.logical_z_edges) & set(g.logical_x_edges)) == 1


def test_rejects_small_lattice():
    with pytest.raises(ValueError):
        build_lattice(1)


def test_index_errors():
    g = build_lattice(3, "toric")
    with pytest.raises(IndexError):
        edges_of_vertex(g, g.vertex_count)
    with pytest.raises(IndexError):
        edges_of_face(g, -1)
    with pytest.raises(IndexError):
        adjacent_plaquettes(g, g.edge_count)


@settings(max_examples=20, deadline=None)
@given(L=st.integers(min_value=2, max_value=6),
       boundary=st.sampled_from([Boundary.TORIC, Boundary.PLANAR]))
def test_edge_membership_bounds(L, boundary):
    g = build_lattice(L, boundary)
    assert (g.vertex_incidence.sum(axis=0) <= 2).all()
    assert (g.face_incidence.sum(axis=0) <= 2).all()
    assert g.vertex_incidence.sum() == g.vertex_degree.sum()
    assert g.face_incidence.sum() == g.face_degree.sum()
