import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mielab.lattice import (
    block_cells,
    build_lattice,
    dual_graph,
    half_chain_partition,
    lattice_from_spec,
    make_partition,
    separates,
    strip_partition,
)


@given(st.integers(1, 7), st.integers(1, 7))
def test_triangular_edge_and_face_counts(Lx, Ly):
    lat = build_lattice("triangular", Lx, Ly)
    assert len(lat.edges) == (Lx - 1) * Ly + Lx * (Ly - 1) + (Lx - 1) * (Ly - 1)
    assert len(lat.faces()) == 2 * (Lx - 1) * (Ly - 1)
    assert lat.n_vertices - len(lat.edges) + len(lat.faces()) == 1


def test_triangular_3x3_has_16_edges():
    assert len(build_lattice("triangular", 3, 3).edges) == 16


@given(st.integers(1, 6), st.integers(2, 6))
def test_strip_partition_covers(Lx, Ly):
    lat = build_lattice("square", Lx, Ly)
    part = strip_partition(lat)
    assert part.check_cover(lat.n_vertices)
    assert part.A == frozenset(range(Lx))
    assert part.C == frozenset(range((Ly - 1) * Lx, Ly * Lx))


def test_half_chain_needs_two_boundary_sites():
    with pytest.raises(ValueError):
        half_chain_partition(build_lattice("square", 3, 1))
    part = half_chain_partition(build_lattice("square", 3, 4))
    assert part.A == frozenset({2, 5}) and part.C == frozenset({8, 11})


def test_unknown_geometry_and_kind():
    lat = build_lattice("square", 2, 2)
    with pytest.raises(ValueError):
        make_partition(lat, "ring")
    with pytest.raises(ValueError):
        make_partition(lat, "bulk_triple")
    with pytest.raises(ValueError):
        build_lattice("kagome", 2, 2)
    with pytest.raises(ValueError):
        build_lattice("square", 0, 2)


def test_cells_16x8_depth2():
    cells = block_cells(build_lattice("square", 16, 8), 2)
    assert cells.n_vertices == 5
    assert cells.edges == ((0, 1), (0, 2), (0, 3), (1, 3), (1, 4), (2, 3), (3, 4))
    assert len(cells.faces()) == 3
    assert cells.unblock() == list(range(128))
    dual = dual_graph(cells)
    assert dual.virtual == {"left": 3, "right": 4, "bottom": 5, "top": 6}


@given(st.sampled_from([(8, 4, 1), (16, 8, 1), (16, 8, 2), (24, 12, 1), (16, 16, 2), (24, 8, 1)]))
@settings(max_examples=10, deadline=None)
def test_cells_partition_sites_and_triangulate(case):
    Lx, Ly, dC = case
    cells = block_cells(build_lattice("square", Lx, Ly), dC)
    assert cells.unblock() == list(range(Lx * Ly))
    assert sum(len(c) for c in cells.cells) == Lx * Ly
    assert cells.n_vertices - len(cells.edges) + len(cells.faces()) == 1


def test_block_cells_rejects_indivisible():
    with pytest.raises(ValueError):
        block_cells(build_lattice("square", 10, 4), 1)


def test_dual_graph_rejects_square_sites():
    with pytest.raises(ValueError):
        dual_graph(build_lattice("square", 3, 3))


def test_dual_degrees_on_triangular():
    dual = dual_graph(build_lattice("triangular", 4, 3))
    assert all(dual.degree(f) == 3 for f in range(dual.n_faces))
    assert dual.n_edges == len(build_lattice("triangular", 4, 3).edges)


def test_separates_horizontal_cut():
    lat = build_lattice("triangular", 3, 2)
    dual = dual_graph(lat)
    part = strip_partition(lat)
    vertical = {k for k, e in enumerate(lat.edges) if (e[0] < 3) != (e[1] < 3)}
    walk = [k for k in range(dual.n_edges) if dual.crossing[k] in vertical]
    assert separates(walk, part, dual)
    assert not separates(walk[:-1], part, dual)


def test_lattice_from_spec_round_trip():
    for lat in (build_lattice("triangular", 3, 4), block_cells(build_lattice("square", 16, 8), 2)):
        again = lattice_from_spec(lat.spec())
        assert again.edges == lat.edges
