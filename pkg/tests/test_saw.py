import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mielab import saw
from mielab.bounds import LOG_MU_SQUARE_UPPER, MU_HEX
from mielab.lattice import (
    block_cells,
    build_lattice,
    bulk_triple_partition,
    dual_graph,
    half_chain_partition,
    separates,
    strip_partition,
)

from conftest import minimal_cut_sizes

SQUARE = (1, 4, 12, 36, 100, 284, 780, 2172, 5916, 16268, 44100)
TRIANGULAR = (1, 6, 30, 138, 618, 2730, 11946)
HEXAGONAL = (1, 3, 6, 12, 24, 48, 90, 174, 336, 648, 1218)


def test_square_counts():
    assert saw.count_table("square", 10) == SQUARE


def test_triangular_and_hexagonal_counts():
    assert saw.count_table("triangular", 6) == TRIANGULAR
    assert saw.count_table("hexagonal", 10) == HEXAGONAL
    assert saw.count_rooted_walks("hexagonal", 20) == 704304


def test_radius_guards_the_patch():
    assert saw.count_table("square", 6, radius=10) == SQUARE[:7]
    with pytest.raises(ValueError):
        saw.count_rooted_walks("square", 2, radius=1)


def test_polygon_counts():
    sq = saw.polygon_table("square", 12)
    assert [sq[l] for l in (4, 6, 8, 10, 12)] == [4, 12, 56, 280, 1488]
    assert saw.count_rooted_polygons("square", 5) == 0
    assert saw.count_rooted_polygons("hexagonal", 6) == 3
    assert saw.count_rooted_polygons("hexagonal", 10) == 15
    assert saw.count_rooted_polygons("triangular", 3) == 6
    assert saw.count_rooted_polygons("triangular", 4) == 12


def test_square_submultiplicative_all_pairs():
    for a in range(11):
        for b in range(11 - a):
            assert SQUARE[a + b] <= SQUARE[a] * SQUARE[b]


def test_hexagonal_growth_above_connective_constant():
    counts = saw.count_table("hexagonal", 18)
    for k in range(1, 19):
        assert counts[k] ** (1 / k) >= MU_HEX - 1e-12


def test_square_polygons_below_mu_upper():
    sq = saw.polygon_table("square", 12)
    assert all(sq[l] <= math.exp(LOG_MU_SQUARE_UPPER * l) for l in range(13))


def test_bad_inputs():
    with pytest.raises(ValueError):
        saw.count_table("kagome", 3)
    with pytest.raises(ValueError):
        saw.count_table("square", -1)


@given(st.integers(0, 20), st.integers(1, 10))
def test_submultiplicative_bound_dominates(n, k):
    counts = saw.count_table("hexagonal", 20)
    short = counts[: k + 1]
    assert saw.submultiplicative_bound(short, n, k) >= counts[n]


# --- separating walls against a vertex-subset oracle


WALL_CASES = [
    ("triangular", 3, 3, "strip"),
    ("triangular", 4, 3, "strip"),
    ("triangular", 3, 4, "strip"),
    ("triangular", 3, 5, "strip"),
    ("triangular", 3, 4, "half_chain"),
    ("triangular", 4, 4, "half_chain"),
]


def _lattice_and_partition(kind, Lx, Ly, geometry):
    lat = build_lattice(kind, Lx, Ly)
    part = strip_partition(lat) if geometry == "strip" else half_chain_partition(lat)
    return lat, part


@pytest.mark.parametrize("case", WALL_CASES)
def test_walls_match_minimal_cuts(case):
    lat, part = _lattice_and_partition(*case)
    dual = dual_graph(lat)
    walls = saw.enumerate_separating_walks(dual, part, saw.longest_possible_walk(dual, part.geometry))
    assert sorted(w.length for w in walls) == minimal_cut_sizes(lat, part)
    for w in walls:
        assert w.is_self_avoiding()
        assert separates(w.edges, part, dual)
        for k in range(w.length):
            assert not separates(w.edges[:k] + w.edges[k + 1:], part, dual)


def test_walls_on_cells_match_minimal_cuts():
    cells = block_cells(build_lattice("square", 16, 16), 2)
    part = strip_partition(cells)
    dual = dual_graph(cells)
    walls = saw.enumerate_separating_walks(dual, part, saw.longest_possible_walk(dual, "strip"))
    assert sorted(w.length for w in walls) == minimal_cut_sizes(cells, part)


def test_bulk_triple_walls_are_closed_loops():
    lat = build_lattice("triangular", 5, 5)
    part = bulk_triple_partition(lat, 12, 6, 18)
    dual = dual_graph(lat)
    walls = saw.enumerate_separating_walks(dual, part, 8)
    assert walls
    assert all(w.anchor == "closed_loop" and w.is_self_avoiding() for w in walls)
    # the shortest loop around a single bulk site crosses its six edges
    assert walls[0].length == 6


def test_c_side_region_contains_c_not_a():
    lat, part = _lattice_and_partition("triangular", 3, 4, "strip")
    dual = dual_graph(lat)
    for w in saw.enumerate_separating_walks(dual, part, 20):
        region = saw.c_side_region(w.edges, part, dual)
        assert part.C <= region and not (part.A & region)


# --- partition function and the certified tail


@pytest.mark.parametrize("case", WALL_CASES[:4])
@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_exact_partition_function(case, beta):
    lat, part = _lattice_and_partition(*case)
    dual = dual_graph(lat)
    z = saw.partition_function(dual, part, saw.WeightModel.per_edge(beta), saw.longest_possible_walk(dual, "strip"))
    assert z.tail_bound == 0.0
    assert z.total_upper == pytest.approx(sum(math.exp(-beta * s) for s in minimal_cut_sizes(lat, part)), rel=1e-12)


@given(st.integers(1, 8), st.floats(1.0, 4.0))
@settings(max_examples=40, deadline=None)
def test_truncated_sum_plus_tail_dominates_exact(l_max, beta):
    lat = build_lattice("triangular", 3, 5)
    part = strip_partition(lat)
    dual = dual_graph(lat)
    weight = saw.WeightModel.per_edge(beta)
    exact = saw.partition_function(dual, part, weight, saw.longest_possible_walk(dual, "strip")).total_upper
    trunc = saw.partition_function(dual, part, weight, l_max)
    assert trunc.exact_sum <= exact + 1e-15
    assert trunc.total_upper >= exact * (1 - 1e-12)


def test_tail_diverges_below_threshold():
    counts = saw.count_table("hexagonal", 12)
    assert saw.strip_tail_bound(0.3, 5, 2, counts, 12) == math.inf
    assert math.isfinite(saw.strip_tail_bound(2.0, 5, 2, counts, 12))


def test_edge_sum_weight_matches_per_edge():
    lat, part = _lattice_and_partition("triangular", 3, 3, "strip")
    dual = dual_graph(lat)
    walls = saw.enumerate_separating_walks(dual, part, 20)
    a = saw.WeightModel.per_edge(1.3)
    b = saw.WeightModel.edge_sum({k: 1.3 for k in range(len(lat.edges))})
    for w in walls:
        assert a.energy(w, dual) == pytest.approx(b.energy(w, dual))


def test_empty_dual_graph_gives_zero():
    lat = build_lattice("triangular", 1, 1)
    dual = dual_graph(lat)
    z = saw.partition_function(dual, strip_partition(lat), saw.WeightModel.per_edge(1.0), 4)
    assert z.total_upper == 0.0 and z.n_walks == 0


def test_loop_weights_shrink_with_beta():
    lo = saw.bulk_loop_weights(2.5, LOG_MU_SQUARE_UPPER, 4)
    hi = saw.bulk_loop_weights(3.5, LOG_MU_SQUARE_UPPER, 4)
    for key in lo:
        if isinstance(lo[key], float) and key != "nu" and key != "beta":
            assert hi[key] <= lo[key]
